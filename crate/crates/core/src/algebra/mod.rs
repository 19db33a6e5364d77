//! Composition lifted from graphs to theories, the closure of all theories
//! realizable by class-K structures, and the structural decomposition that
//! grounds the closure's completeness.
//!
//! `theory_op` computes the theory of a composition directly from the two
//! operand theories, cell algebra at the bottom and set images above. The
//! tests pit it against the witness route (compose concrete graphs, then
//! take the theory); agreement of the two routes is the composition lemma
//! made executable.

pub mod closure;
pub mod decompose;

use thiserror::Error;

use crate::graph::{ComposeKind, GraphError};
use crate::theory::atomic::{AtomicType, Cell, Profile};
use crate::theory::{Payload, TheoryCtx, TheoryError, TheoryId};

#[derive(Debug, Error)]
pub enum AlgebraError {
    #[error("operand depths differ: {0} vs {1}")]
    DepthMismatch(u8, u8),
    #[error("operand shapes do not match composition kind {0:?}")]
    ShapeMismatch(ComposeKind),
    #[error("theory {0:?} is not in the table")]
    UnknownTheory(TheoryId),
    #[error("witness of size {size} realizes a different theory than computed")]
    WitnessMismatch { size: u32 },
    #[error(transparent)]
    Theory(#[from] TheoryError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("bad table file: {0}")]
    BadTable(String),
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum OpSide {
    X,
    Y,
}

/// Composition semantics at the atomic level. The `x` side is the one whose
/// orphans may be reparented onto the `y` side's dot.
struct KindSem {
    x_dotted: bool,
    y_dotted: bool,
    reparent_x: bool,
    reparent_y: bool,
    result_dot: Option<OpSide>,
}

fn kind_sem(kind: ComposeKind) -> KindSem {
    match kind {
        ComposeKind::Sum => KindSem {
            x_dotted: false,
            y_dotted: false,
            reparent_x: false,
            reparent_y: false,
            result_dot: None,
        },
        ComposeKind::DotInto => KindSem {
            x_dotted: false,
            y_dotted: true,
            reparent_x: true,
            reparent_y: false,
            result_dot: None,
        },
        ComposeKind::DottedDot => KindSem {
            x_dotted: true,
            y_dotted: true,
            reparent_x: true,
            reparent_y: false,
            result_dot: Some(OpSide::X),
        },
        ComposeKind::Circular => KindSem {
            x_dotted: true,
            y_dotted: true,
            reparent_x: true,
            reparent_y: true,
            result_dot: None,
        },
        ComposeKind::SumRightDot => KindSem {
            x_dotted: false,
            y_dotted: true,
            reparent_x: false,
            reparent_y: false,
            result_dot: Some(OpSide::Y),
        },
        // Operands arrive swapped: x is the plain graph, y carries the dot.
        ComposeKind::DotPlusUndotted => KindSem {
            x_dotted: false,
            y_dotted: true,
            reparent_x: true,
            reparent_y: false,
            result_dot: Some(OpSide::Y),
        },
    }
}

/// Atomic type of the composition, from the operand atomic types alone.
///
/// Every result cell is the union of contributing input subcells; a subcell
/// keeps its identity so that edges of singleton result cells can be read
/// off the inputs, plus the reparenting edges from original orphans to the
/// other side's dot.
fn combine_atomic(sem: &KindSem, tx: &AtomicType, ty: &AtomicType) -> AtomicType {
    debug_assert_eq!(tx.arity, ty.arity);
    debug_assert_eq!(tx.dotted, sem.x_dotted);
    debug_assert_eq!(ty.dotted, sem.y_dotted);
    let j = tx.arity;
    let base = 1usize << j;
    let result_dotted = sem.result_dot.is_some();
    let ncells = base * if result_dotted { 2 } else { 1 };

    let side_type = |s: OpSide| -> &AtomicType {
        match s {
            OpSide::X => tx,
            OpSide::Y => ty,
        }
    };
    let side_dotted = |s: OpSide| -> bool {
        match s {
            OpSide::X => sem.x_dotted,
            OpSide::Y => sem.y_dotted,
        }
    };
    let reparented = |s: OpSide| -> bool {
        match s {
            OpSide::X => sem.reparent_x,
            OpSide::Y => sem.reparent_y,
        }
    };

    let contributors = |rc: usize| -> Vec<(OpSide, usize)> {
        let c = rc & (base - 1);
        if rc >= base {
            // Dot half of the result: only the dot-carrying side's dot half.
            let side = sem.result_dot.expect("dotted result");
            return vec![(side, c + base)];
        }
        let mut subs = Vec::new();
        for side in [OpSide::X, OpSide::Y] {
            if !side_dotted(side) {
                subs.push((side, c));
            } else if sem.result_dot == Some(side) {
                subs.push((side, c));
            } else {
                // This side's dot is forgotten: merge both halves.
                subs.push((side, c));
                subs.push((side, c + base));
            }
        }
        subs
    };

    let cell_count = |s: OpSide, idx: usize| -> u8 {
        match side_type(s).cells[idx] {
            Cell::Empty => 0,
            Cell::Singleton(_) => 1,
            Cell::Many => 2,
        }
    };

    let mut cells = Vec::with_capacity(ncells);
    // Singleton result cells with their unique input subcell and its
    // original profile.
    let mut singles: Vec<(usize, OpSide, usize, Profile)> = Vec::new();
    for rc in 0..ncells {
        let subs = contributors(rc);
        let mut total = 0u8;
        let mut unique = None;
        for &(s, idx) in &subs {
            let c = cell_count(s, idx);
            total = (total + c).min(2);
            if c == 1 {
                unique = Some((s, idx));
            }
        }
        cells.push(match total {
            0 => Cell::Empty,
            1 => {
                let (s, idx) = unique.expect("singleton cell has a source");
                let p = match side_type(s).cells[idx] {
                    Cell::Singleton(p) => p,
                    _ => unreachable!(),
                };
                singles.push((rc, s, idx, p));
                Cell::Singleton(Profile {
                    colors: p.colors,
                    orphan: p.orphan && !reparented(s),
                })
            }
            _ => Cell::Many,
        });
    }

    let mut edges = Vec::new();
    for &(rca, sa, ia, pa) in &singles {
        for &(rcb, sb, ib, _pb) in &singles {
            let holds = if sa == sb {
                side_type(sa).has_edge(ia as u16, ib as u16)
            } else {
                // Cross edge: a reparented orphan points at the other
                // side's dot, which lives in that side's dot half.
                reparented(sa) && pa.orphan && ib >= base
            };
            if holds {
                edges.push((rca as u16, rcb as u16));
            }
        }
    }
    edges.sort_unstable();

    AtomicType {
        arity: j,
        dotted: result_dotted,
        orphan_empty: (tx.orphan_empty || sem.reparent_x)
            && (ty.orphan_empty || sem.reparent_y),
        cells,
        edges,
    }
}

/// Theory of the composition from the operand theories. Well-definedness
/// (equal operand theories give an equal result no matter the witnesses) is
/// the composition lemma; the test suites check it against the witness
/// route rather than assuming it.
pub fn theory_op(
    ctx: &TheoryCtx,
    kind: ComposeKind,
    left: TheoryId,
    right: TheoryId,
) -> Result<TheoryId, AlgebraError> {
    let (x, y) = match kind {
        ComposeKind::DotPlusUndotted => (right, left),
        _ => (left, right),
    };
    let dx = ctx.interner.get(x);
    let dy = ctx.interner.get(y);
    if dx.depth != dy.depth {
        return Err(AlgebraError::DepthMismatch(dx.depth, dy.depth));
    }
    let sem = kind_sem(kind);
    if dx.dotted != sem.x_dotted || dy.dotted != sem.y_dotted || dx.arity != dy.arity {
        return Err(AlgebraError::ShapeMismatch(kind));
    }
    Ok(op_rec(ctx, kind, &sem, x, y))
}

fn op_rec(ctx: &TheoryCtx, kind: ComposeKind, sem: &KindSem, x: TheoryId, y: TheoryId) -> TheoryId {
    if let Some(hit) = ctx.op_memo.get(&(kind, x, y)) {
        return *hit;
    }
    let dx = ctx.interner.get(x);
    let dy = ctx.interner.get(y);
    let out = match (&dx.payload, &dy.payload) {
        (Payload::Atomic(a), Payload::Atomic(b)) => {
            ctx.interner.intern_atomic(combine_atomic(sem, a, b))
        }
        (Payload::Set(sa), Payload::Set(sb)) => {
            // A subset of the composed universe splits uniquely into one
            // subset per side, and every pair occurs.
            let mut members = std::collections::BTreeSet::new();
            for &si in sa {
                for &vi in sb {
                    members.insert(op_rec(ctx, kind, sem, si, vi));
                }
            }
            ctx.interner.intern_set(members)
        }
        _ => unreachable!("equal depths imply equal payload shapes"),
    };
    ctx.op_memo.insert((kind, x, y), out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate::{enumerate_class, enumerate_dotted, EnumClass};
    use crate::graph::{compose, Operand, Palette};
    use crate::theory::{theory_operand, TheoryCtx};

    fn operands(n_max: u32, pal: &Palette) -> (Vec<Operand>, Vec<Operand>) {
        let mut plain = Vec::new();
        let mut dotted = Vec::new();
        for n in 1..=n_max {
            for g in enumerate_class(EnumClass::All, n, pal) {
                plain.push(Operand::Plain(g));
            }
            for d in enumerate_dotted(EnumClass::All, n, pal) {
                dotted.push(Operand::Dotted(d));
            }
        }
        (plain, dotted)
    }

    /// The two routes to a composed theory agree: direct type composition
    /// versus composing witnesses and computing the theory.
    #[test]
    fn type_route_matches_witness_route() {
        let ctx = TheoryCtx::new(Palette::empty());
        let (plain, dotted) = operands(3, &ctx.palette);
        for d in 0..=1u8 {
            for kind in ComposeKind::ALL {
                let (ld, rd, _) = kind.shape();
                let lefts = if ld { &dotted } else { &plain };
                let rights = if rd { &dotted } else { &plain };
                for l in lefts.iter().take(10) {
                    for r in rights.iter().take(10) {
                        let tl = theory_operand(&ctx, l, d).unwrap();
                        let tr = theory_operand(&ctx, r, d).unwrap();
                        let fast = theory_op(&ctx, kind, tl, tr).unwrap();
                        let composed = compose(kind, l, r).unwrap();
                        let slow = theory_operand(&ctx, &composed, d).unwrap();
                        assert_eq!(fast, slow, "kind {kind:?} d {d} {l:?} {r:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn type_route_matches_witness_route_colored() {
        let pal = Palette::new(["red"]);
        let ctx = TheoryCtx::new(pal.clone());
        let (plain, dotted) = operands(2, &pal);
        for kind in ComposeKind::ALL {
            let (ld, rd, _) = kind.shape();
            let lefts = if ld { &dotted } else { &plain };
            let rights = if rd { &dotted } else { &plain };
            for l in lefts {
                for r in rights {
                    let tl = theory_operand(&ctx, l, 1).unwrap();
                    let tr = theory_operand(&ctx, r, 1).unwrap();
                    let fast = theory_op(&ctx, kind, tl, tr).unwrap();
                    let composed = compose(kind, l, r).unwrap();
                    let slow = theory_operand(&ctx, &composed, 1).unwrap();
                    assert_eq!(fast, slow, "kind {kind:?} {l:?} {r:?}");
                }
            }
        }
    }

    #[test]
    fn sum_is_commutative_on_theories() {
        let ctx = TheoryCtx::new(Palette::empty());
        let (plain, _) = operands(3, &ctx.palette);
        let ids: Vec<_> = plain
            .iter()
            .map(|p| theory_operand(&ctx, p, 1).unwrap())
            .collect();
        for &a in &ids {
            for &b in &ids {
                assert_eq!(
                    theory_op(&ctx, ComposeKind::Sum, a, b).unwrap(),
                    theory_op(&ctx, ComposeKind::Sum, b, a).unwrap()
                );
            }
        }
    }

    #[test]
    fn dotted_dot_is_associative_on_theories() {
        let ctx = TheoryCtx::new(Palette::empty());
        let (_, dotted) = operands(2, &ctx.palette);
        let ids: Vec<_> = dotted
            .iter()
            .map(|p| theory_operand(&ctx, p, 0).unwrap())
            .collect();
        for &a in &ids {
            for &b in &ids {
                for &c in &ids {
                    let ab_c = theory_op(
                        &ctx,
                        ComposeKind::DottedDot,
                        theory_op(&ctx, ComposeKind::DottedDot, a, b).unwrap(),
                        c,
                    )
                    .unwrap();
                    let a_bc = theory_op(
                        &ctx,
                        ComposeKind::DottedDot,
                        a,
                        theory_op(&ctx, ComposeKind::DottedDot, b, c).unwrap(),
                    )
                    .unwrap();
                    assert_eq!(ab_c, a_bc);
                }
            }
        }
    }

    #[test]
    fn shape_mismatch_rejected() {
        let ctx = TheoryCtx::new(Palette::empty());
        let g = Operand::Plain(crate::graph::Graph::singleton(&ctx.palette, false));
        let t = theory_operand(&ctx, &g, 0).unwrap();
        assert!(matches!(
            theory_op(&ctx, ComposeKind::DottedDot, t, t),
            Err(AlgebraError::ShapeMismatch(_))
        ));
    }
}
