//! Atomic types: everything the atomic formulas of the Boolean associate can
//! say about a structure with a tuple of set parameters, in a fixed normal
//! form.
//!
//! The parameters cut the universe into cells (one per sign pattern; a dotted
//! structure refines each cell by the dot constant). A cell is recorded as
//! empty, a singleton, or larger; singleton cells carry the colors and
//! orphan flag of their element, and the edge relation is recorded between
//! singleton cells, self-pairs included. One nullary bit records whether the
//! orphan set is empty.

use serde::{Deserialize, Serialize};

use crate::graph::Graph;

/// Which orphan information enters the normal form. The ablated variant
/// exists to reproduce the sensitivity of the composition method to the
/// choice of language; everything real uses `FULL`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Vocab {
    pub orphan_flags: bool,
    pub orphan_empty: bool,
}

pub const FULL: Vocab = Vocab {
    orphan_flags: true,
    orphan_empty: true,
};

pub const NO_ORPHAN: Vocab = Vocab {
    orphan_flags: false,
    orphan_empty: false,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Profile {
    pub colors: u32,
    pub orphan: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Cell {
    Empty,
    Singleton(Profile),
    Many,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct AtomicType {
    pub arity: u8,
    pub dotted: bool,
    pub orphan_empty: bool,
    /// Indexed by sign pattern; a dotted type appends the dot-refined halves
    /// at `index + (1 << arity)`.
    pub cells: Vec<Cell>,
    /// Sorted list of ordered singleton-cell pairs with an edge between
    /// their elements.
    pub edges: Vec<(u16, u16)>,
}

impl AtomicType {
    pub fn cell_count(&self) -> usize {
        (1usize << self.arity) * if self.dotted { 2 } else { 1 }
    }

    pub fn has_edge(&self, a: u16, b: u16) -> bool {
        self.edges.binary_search(&(a, b)).is_ok()
    }

    /// Stable byte encoding for digests.
    pub fn encode(&self, out: &mut Vec<u8>) {
        out.push(self.arity);
        out.push(self.dotted as u8);
        out.push(self.orphan_empty as u8);
        for c in &self.cells {
            match c {
                Cell::Empty => out.push(0),
                Cell::Many => out.push(1),
                Cell::Singleton(p) => {
                    out.push(2 + p.orphan as u8);
                    out.extend_from_slice(&p.colors.to_be_bytes());
                }
            }
        }
        out.push(b'/');
        for &(a, b) in &self.edges {
            out.extend_from_slice(&a.to_be_bytes());
            out.extend_from_slice(&b.to_be_bytes());
        }
    }
}

/// Atomic type of `(g [, dot], sets)` under `vocab`.
pub fn atomic_type(g: &Graph, dot: Option<u32>, sets: &[u64], vocab: Vocab) -> AtomicType {
    let j = sets.len();
    debug_assert!(j <= 12, "parameter tuple too long");
    let half = 1usize << j;
    let ncells = if dot.is_some() { 2 * half } else { half };
    let mut count = vec![0u8; ncells];
    let mut elem = vec![0u32; ncells];
    for v in 0..g.vertex_count() {
        let mut idx = 0usize;
        for (i, s) in sets.iter().enumerate() {
            if s >> v & 1 == 1 {
                idx |= 1 << i;
            }
        }
        if dot == Some(v) {
            idx += half;
        }
        if count[idx] < 2 {
            count[idx] += 1;
        }
        elem[idx] = if count[idx] == 1 { v } else { elem[idx] };
    }
    let cells: Vec<Cell> = (0..ncells)
        .map(|i| match count[i] {
            0 => Cell::Empty,
            1 => Cell::Singleton(Profile {
                colors: g.vertex_colors(elem[i]),
                orphan: vocab.orphan_flags && g.is_orphan(elem[i]),
            }),
            _ => Cell::Many,
        })
        .collect();
    let singles: Vec<u16> = (0..ncells)
        .filter(|&i| count[i] == 1)
        .map(|i| i as u16)
        .collect();
    let mut edges = Vec::new();
    for &a in &singles {
        for &b in &singles {
            if g.parent(elem[a as usize]) == Some(elem[b as usize]) {
                edges.push((a, b));
            }
        }
    }
    edges.sort_unstable();
    AtomicType {
        arity: j as u8,
        dotted: dot.is_some(),
        orphan_empty: vocab.orphan_empty && g.orphans() == 0,
        cells,
        edges,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Graph, Palette};

    fn pal() -> Palette {
        Palette::empty()
    }

    #[test]
    fn orphan_singleton_no_parameters() {
        let g = Graph::singleton(&pal(), false);
        let t = atomic_type(&g, None, &[], FULL);
        assert_eq!(t.cells.len(), 1);
        assert_eq!(
            t.cells[0],
            Cell::Singleton(Profile {
                colors: 0,
                orphan: true
            })
        );
        assert!(t.edges.is_empty());
        assert!(!t.orphan_empty);
    }

    #[test]
    fn self_loop_singleton() {
        let g = Graph::singleton(&pal(), true);
        let t = atomic_type(&g, None, &[], FULL);
        assert_eq!(
            t.cells[0],
            Cell::Singleton(Profile {
                colors: 0,
                orphan: false
            })
        );
        assert_eq!(t.edges, vec![(0, 0)]);
        assert!(t.orphan_empty);
    }

    #[test]
    fn c2_split_by_one_vertex() {
        let g = Graph::cycle(&pal(), 2);
        let t = atomic_type(&g, None, &[0b01], FULL);
        // Cell 1 = {v0}, cell 0 = {v1}; both singletons, edges both ways,
        // no self-loops.
        assert!(matches!(t.cells[0], Cell::Singleton(_)));
        assert!(matches!(t.cells[1], Cell::Singleton(_)));
        assert!(t.has_edge(0, 1) && t.has_edge(1, 0));
        assert!(!t.has_edge(0, 0) && !t.has_edge(1, 1));
    }

    #[test]
    fn dot_refines_cells() {
        let g = Graph::path(&pal(), 2);
        let t = atomic_type(&g, Some(0), &[], FULL);
        assert_eq!(t.cells.len(), 2);
        // Non-dot half holds the root, dot half holds vertex 0.
        assert!(matches!(t.cells[0], Cell::Singleton(p) if p.orphan));
        assert!(matches!(t.cells[1], Cell::Singleton(p) if !p.orphan));
        assert_eq!(t.edges, vec![(1, 0)]);
    }

    #[test]
    fn ablation_hides_orphans() {
        let a = Graph::singleton(&pal(), false);
        let t = atomic_type(&a, None, &[], NO_ORPHAN);
        assert_eq!(
            t.cells[0],
            Cell::Singleton(Profile {
                colors: 0,
                orphan: false
            })
        );
        assert!(!t.orphan_empty);
    }
}
