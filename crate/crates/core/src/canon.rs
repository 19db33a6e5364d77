//! Canonical keys for PF-graphs up to color- and dot-preserving isomorphism.
//!
//! Trees are coded bottom-up with sorted child codes (AHU); a cycle becomes
//! the lexicographically least rotation of its attached-tree codes; a graph
//! is the sorted list of its component codes. No general graph-isomorphism
//! machinery is needed.

use crate::graph::{classify, Dotted, Graph, Operand};

/// Deterministic byte encoding; equal keys exactly when isomorphic.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct CanonKey(pub Vec<u8>);

impl CanonKey {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }
}

/// Per-vertex payload folded into the tree codes.
fn local_code(g: &Graph, dot: Option<u32>, v: u32, out: &mut Vec<u8>) {
    let colors = g.vertex_colors(v);
    out.extend_from_slice(&colors.to_be_bytes());
    out.push(if dot == Some(v) { 1 } else { 0 });
}

/// AHU code of the tree hanging below `v`, descending only into children in
/// `allowed` (used to keep cycle vertices out of each other's trees).
fn tree_code(g: &Graph, dot: Option<u32>, v: u32, allowed: u64, out: &mut Vec<u8>) {
    out.push(b'(');
    local_code(g, dot, v, out);
    let mut kids: Vec<Vec<u8>> = g
        .children(v)
        .into_iter()
        .filter(|&c| allowed >> c & 1 == 1)
        .map(|c| {
            let mut buf = Vec::new();
            tree_code(g, dot, c, allowed, &mut buf);
            buf
        })
        .collect();
    kids.sort();
    for k in kids {
        out.extend_from_slice(&k);
    }
    out.push(b')');
}

fn component_code(g: &Graph, dot: Option<u32>, verts: &[u32], cycle: Option<&[u32]>) -> Vec<u8> {
    let mut set = 0u64;
    for &v in verts {
        set |= 1 << v;
    }
    match cycle {
        None => {
            // Tree component: the root is its unique orphan.
            let root = verts
                .iter()
                .copied()
                .find(|&v| g.is_orphan(v))
                .expect("tree component has an orphan");
            let mut out = vec![b'T'];
            tree_code(g, dot, root, set, &mut out);
            out
        }
        Some(cyc) => {
            let noncyclic = {
                let mut m = set;
                for &c in cyc {
                    m &= !(1 << c);
                }
                m
            };
            // Children filtered by `noncyclic` keep the walk out of the
            // cycle itself (a self-loop vertex is its own child).
            let codes: Vec<Vec<u8>> = cyc
                .iter()
                .map(|&c| {
                    let mut buf = Vec::new();
                    tree_code(g, dot, c, noncyclic, &mut buf);
                    buf
                })
                .collect();
            // Least rotation in parent order.
            let m = codes.len();
            let mut best: Option<Vec<u8>> = None;
            for start in 0..m {
                let mut cand = Vec::new();
                for i in 0..m {
                    cand.extend_from_slice(&codes[(start + i) % m]);
                }
                if best.as_ref().map_or(true, |b| cand < *b) {
                    best = Some(cand);
                }
            }
            let mut out = vec![b'C'];
            out.extend_from_slice(&(m as u32).to_be_bytes());
            out.extend_from_slice(&best.unwrap());
            out
        }
    }
}

fn key_of(g: &Graph, dot: Option<u32>) -> CanonKey {
    let mut out = Vec::new();
    for name in g.palette().names() {
        out.extend_from_slice(name.as_bytes());
        out.push(b';');
    }
    out.push(b'|');
    out.push(if dot.is_some() { b'D' } else { b'U' });
    let c = classify(g);
    let mut cycle_iter = c.cycles.iter();
    let mut comps: Vec<Vec<u8>> = c
        .components
        .iter()
        .map(|(_, old)| {
            let has_orphan = old.iter().any(|&v| g.is_orphan(v));
            let cyc = if has_orphan {
                None
            } else {
                Some(cycle_iter.next().expect("cycle per orphanless component"))
            };
            component_code(g, dot, old, cyc.map(|c| c.as_slice()))
        })
        .collect();
    comps.sort();
    for comp in comps {
        out.extend_from_slice(&comp);
    }
    CanonKey(out)
}

/// Canonical key of an undotted graph.
pub fn canonical_key(g: &Graph) -> CanonKey {
    key_of(g, None)
}

/// Canonical key of a dotted graph; the dot is folded into vertex codes.
pub fn canonical_key_dotted(d: &Dotted) -> CanonKey {
    key_of(&d.graph, Some(d.dot))
}

pub fn canonical_key_operand(op: &Operand) -> CanonKey {
    match op {
        Operand::Plain(g) => canonical_key(g),
        Operand::Dotted(d) => canonical_key_dotted(d),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{sum, Graph, Palette};

    fn pal() -> Palette {
        Palette::empty()
    }

    #[test]
    fn cycle_relabelings_collide() {
        let a = Graph::cycle(&pal(), 3);
        let b = a.relabel(&[2, 0, 1]);
        assert_eq!(canonical_key(&a), canonical_key(&b));
    }

    #[test]
    fn c3_differs_from_c2_plus_loop() {
        let a = Graph::cycle(&pal(), 3);
        let b = sum(&Graph::cycle(&pal(), 2), &Graph::singleton(&pal(), true)).unwrap();
        assert_ne!(canonical_key(&a), canonical_key(&b));
    }

    #[test]
    fn colors_distinguish() {
        let red = Palette::new(["red"]);
        let a = Graph::singleton_colored(&red, false, 1);
        let b = Graph::singleton(&pal(), false);
        let c = Graph::singleton_colored(&red, false, 0);
        assert_ne!(canonical_key(&a), canonical_key(&b));
        assert_ne!(canonical_key(&a), canonical_key(&c));
        assert_ne!(canonical_key(&b), canonical_key(&c));
    }

    #[test]
    fn dot_position_matters() {
        let g = Graph::path(&pal(), 2);
        let d0 = Dotted::new(g.clone(), 0).unwrap();
        let d1 = Dotted::new(g.clone(), 1).unwrap();
        assert_ne!(canonical_key_dotted(&d0), canonical_key_dotted(&d1));
        assert_ne!(canonical_key_dotted(&d0), canonical_key(&g));
    }

    #[test]
    fn component_order_is_immaterial() {
        let a = sum(&Graph::cycle(&pal(), 2), &Graph::path(&pal(), 3)).unwrap();
        let b = sum(&Graph::path(&pal(), 3), &Graph::cycle(&pal(), 2)).unwrap();
        assert_eq!(canonical_key(&a), canonical_key(&b));
    }
}
