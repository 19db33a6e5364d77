//! Ehrenfeucht-Fraisse game over Boolean associates, by exhaustive search.
//!
//! A round is a spoiler move on either side (an arbitrary vertex subset)
//! answered by the duplicator on the other; after `d` rounds the chosen
//! tuples must satisfy the same atomic formulas. The final agreement check
//! below evaluates the normal-form atomic formulas semantically, with bitset
//! algebra, on purpose not sharing the counting code behind
//! [`super::atomic::atomic_type`]: theory equality and duplicator wins are
//! cross-checking oracles.

use thiserror::Error;

use crate::graph::{mask_all, Graph, Operand};

use super::Limits;

#[derive(Debug, Error)]
pub enum EfError {
    #[error("{n} vertices exceed the per-round subset ceiling of 2^{bits}")]
    ResourceLimit { n: u32, bits: u32 },
    #[error("operands must share palette and dottedness")]
    OperandMismatch,
}

struct Side<'a> {
    g: &'a Graph,
    dot: Option<u32>,
}

impl Side<'_> {
    /// Denotation of the refined cell `eps` (plus dot sign) as a bitset.
    fn cell(&self, sets: &[u64], eps: usize, dot_half: Option<bool>) -> u64 {
        let mut m = mask_all(self.g.vertex_count());
        for (i, s) in sets.iter().enumerate() {
            if eps >> i & 1 == 1 {
                m &= s;
            } else {
                m &= !s;
            }
        }
        if let Some(in_dot) = dot_half {
            let dm = 1u64 << self.dot.expect("dot half of a dotted side");
            if in_dot {
                m &= dm;
            } else {
                m &= !dm;
            }
        }
        m
    }
}

/// Size class of a bitset: 0, 1, or 2-for-many.
fn size_class(m: u64) -> u8 {
    match m.count_ones() {
        0 => 0,
        1 => 1,
        _ => 2,
    }
}

fn singleton_facts(g: &Graph, m: u64) -> (u32, bool) {
    let v = m.trailing_zeros();
    (g.vertex_colors(v), g.is_orphan(v))
}

/// Do the two parameter tuples satisfy the same atomic formulas?
fn atoms_agree(x: &Side, xsets: &[u64], y: &Side, ysets: &[u64]) -> bool {
    debug_assert_eq!(xsets.len(), ysets.len());
    debug_assert_eq!(x.dot.is_some(), y.dot.is_some());
    let j = xsets.len();
    let halves: &[Option<bool>] = if x.dot.is_some() {
        &[Some(false), Some(true)]
    } else {
        &[None]
    };
    let mut x_singles = Vec::new();
    let mut y_singles = Vec::new();
    for eps in 0..1usize << j {
        for &h in halves {
            let cx = x.cell(xsets, eps, h);
            let cy = y.cell(ysets, eps, h);
            if size_class(cx) != size_class(cy) {
                return false;
            }
            if size_class(cx) == 1 {
                if singleton_facts(x.g, cx) != singleton_facts(y.g, cy) {
                    return false;
                }
                x_singles.push(cx.trailing_zeros());
                y_singles.push(cy.trailing_zeros());
            }
        }
    }
    for (i, (&ux, &uy)) in x_singles.iter().zip(&y_singles).enumerate() {
        for (k, (&wx, &wy)) in x_singles.iter().zip(&y_singles).enumerate() {
            let _ = (i, k);
            if (x.g.parent(ux) == Some(wx)) != (y.g.parent(uy) == Some(wy)) {
                return false;
            }
        }
    }
    (x.g.orphans() == 0) == (y.g.orphans() == 0)
}

fn duplicator_wins(
    x: &Side,
    y: &Side,
    xsets: &mut Vec<u64>,
    ysets: &mut Vec<u64>,
    d: u8,
    limits: &Limits,
) -> Result<bool, EfError> {
    if d == 0 {
        return Ok(atoms_agree(x, xsets, y, ysets));
    }
    for (n, g) in [(x.g.vertex_count(), "x"), (y.g.vertex_count(), "y")] {
        let _ = g;
        if n > limits.max_subset_bits {
            return Err(EfError::ResourceLimit {
                n,
                bits: limits.max_subset_bits,
            });
        }
    }
    let cx = 1u64 << x.g.vertex_count();
    let cy = 1u64 << y.g.vertex_count();
    // Spoiler moves on X, duplicator answers on Y.
    for a in 0..cx {
        xsets.push(a);
        let mut matched = false;
        for b in 0..cy {
            ysets.push(b);
            if duplicator_wins(x, y, xsets, ysets, d - 1, limits)? {
                matched = true;
                ysets.pop();
                break;
            }
            ysets.pop();
        }
        xsets.pop();
        if !matched {
            return Ok(false);
        }
    }
    // Spoiler moves on Y, duplicator answers on X.
    for b in 0..cy {
        ysets.push(b);
        let mut matched = false;
        for a in 0..cx {
            xsets.push(a);
            if duplicator_wins(x, y, xsets, ysets, d - 1, limits)? {
                matched = true;
                xsets.pop();
                break;
            }
            xsets.pop();
        }
        ysets.pop();
        if !matched {
            return Ok(false);
        }
    }
    Ok(true)
}

/// True when the duplicator wins the `d`-round game on the Boolean
/// associates of the two structures. Single-threaded by design.
pub fn ef_equal(x: &Operand, y: &Operand, d: u8, limits: &Limits) -> Result<bool, EfError> {
    if x.graph().palette() != y.graph().palette() || x.dot().is_some() != y.dot().is_some() {
        return Err(EfError::OperandMismatch);
    }
    let sx = Side {
        g: x.graph(),
        dot: x.dot(),
    };
    let sy = Side {
        g: y.graph(),
        dot: y.dot(),
    };
    duplicator_wins(&sx, &sy, &mut Vec::new(), &mut Vec::new(), d, limits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Graph, Palette};

    fn plain(g: Graph) -> Operand {
        Operand::Plain(g)
    }

    #[test]
    fn reflexive() {
        let pal = Palette::empty();
        let lim = Limits::default();
        for d in 0..=2u8 {
            let g = Graph::cycle(&pal, 2);
            assert!(ef_equal(&plain(g.clone()), &plain(g), d, &lim).unwrap());
        }
    }

    #[test]
    fn orphan_vs_loop_differ_at_depth0() {
        let pal = Palette::empty();
        let lim = Limits::default();
        let a = plain(Graph::singleton(&pal, false));
        let b = plain(Graph::singleton(&pal, true));
        assert!(!ef_equal(&a, &b, 0, &lim).unwrap());
    }

    #[test]
    fn c2_c3_split_by_depth() {
        let pal = Palette::empty();
        let lim = Limits::default();
        let a = plain(Graph::cycle(&pal, 2));
        let b = plain(Graph::cycle(&pal, 3));
        assert!(ef_equal(&a, &b, 0, &lim).unwrap());
        assert!(!ef_equal(&a, &b, 1, &lim).unwrap());
    }

    #[test]
    fn matches_theory_on_small_pairs() {
        use crate::enumerate::{enumerate_class, EnumClass};
        use crate::theory::{theory, TheoryCtx};
        let ctx = TheoryCtx::new(Palette::empty());
        let lim = Limits::default();
        let graphs = enumerate_class(EnumClass::All, 3, &ctx.palette);
        for d in 0..=1u8 {
            for a in &graphs {
                for b in &graphs {
                    let th_eq = theory(&ctx, a, d).unwrap() == theory(&ctx, b, d).unwrap();
                    let ef_eq =
                        ef_equal(&plain(a.clone()), &plain(b.clone()), d, &lim).unwrap();
                    assert_eq!(th_eq, ef_eq, "d={d} {a:?} vs {b:?}");
                }
            }
        }
    }
}
