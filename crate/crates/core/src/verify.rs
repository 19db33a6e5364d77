//! Seeded property runs wiring the big cross-checks together: theory
//! equality versus the EF game, well-definedness of the theory-level
//! compositions, and the orphan-ablation regression showing the normal form
//! needs the orphan information.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

use crate::algebra::theory_op;
use crate::enumerate::{enumerate_class, enumerate_dotted, EnumClass};
use crate::graph::{compose, ComposeKind, Graph, Operand, Palette};
use crate::theory::atomic::{atomic_type, FULL, NO_ORPHAN};
use crate::theory::ef::ef_equal;
use crate::theory::{theory_operand, Limits, TheoryCtx, TheoryId};

#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub name: String,
    pub cases: u64,
    pub failures: u64,
    pub notes: Vec<String>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    pub fn summary(&self) -> String {
        let mut s = format!(
            "{}: {} cases, {} failures",
            self.name, self.cases, self.failures
        );
        for n in &self.notes {
            let _ = write!(s, "\n  {n}");
        }
        s
    }
}

/// Theory equality versus duplicator wins, exhaustively over all pairs of
/// PF-graphs with at most `n_max` vertices at the given depths.
pub fn lemma5_suite(n_max: u32, depths: &[u8]) -> VerifyReport {
    let ctx = TheoryCtx::new(Palette::empty());
    let lim = Limits::default();
    let graphs: Vec<Graph> = (1..=n_max)
        .flat_map(|n| enumerate_class(EnumClass::All, n, &ctx.palette))
        .collect();
    let mut cases = 0;
    let mut failures = 0;
    let mut notes = Vec::new();
    for &d in depths {
        for a in &graphs {
            for b in &graphs {
                cases += 1;
                let th_eq = theory_operand(&ctx, &Operand::Plain(a.clone()), d).unwrap()
                    == theory_operand(&ctx, &Operand::Plain(b.clone()), d).unwrap();
                let ef_eq = ef_equal(
                    &Operand::Plain(a.clone()),
                    &Operand::Plain(b.clone()),
                    d,
                    &lim,
                )
                .unwrap();
                if th_eq != ef_eq {
                    failures += 1;
                    if notes.len() < 5 {
                        notes.push(format!("d={d}: {a:?} vs {b:?}: theory {th_eq}, game {ef_eq}"));
                    }
                }
            }
        }
    }
    VerifyReport {
        name: format!("lemma5 n<={n_max} d={depths:?}"),
        cases,
        failures,
        notes,
    }
}

fn bucket_by_theory(
    ctx: &TheoryCtx,
    ops: &[Operand],
    d: u8,
) -> BTreeMap<TheoryId, Vec<Operand>> {
    let mut buckets: BTreeMap<TheoryId, Vec<Operand>> = BTreeMap::new();
    for op in ops {
        let t = theory_operand(ctx, op, d).unwrap();
        buckets.entry(t).or_default().push(op.clone());
    }
    buckets
}

fn random_relabel(rng: &mut StdRng, op: &Operand) -> Operand {
    let g = op.graph();
    let mut perm: Vec<u32> = (0..g.vertex_count()).collect();
    perm.shuffle(rng);
    let rg = g.relabel(&perm);
    match op {
        Operand::Plain(_) => Operand::Plain(rg),
        Operand::Dotted(dd) => Operand::Dotted(
            crate::graph::Dotted::new(rg, perm[dd.dot as usize]).unwrap(),
        ),
    }
}

/// Well-definedness of every composition kind at the theory level: equal
/// operand theories give equal composed theories, with composed theories
/// computed on concrete witnesses by the subset-loop engine, and the
/// type-composition route cross-checked on top.
pub fn welldef_suite(seed: u64, tuples: u64, n_max: u32, d: u8) -> VerifyReport {
    let ctx = TheoryCtx::new(Palette::empty());
    let mut rng = StdRng::seed_from_u64(seed);
    let plain: Vec<Operand> = (1..=n_max)
        .flat_map(|n| enumerate_class(EnumClass::All, n, &ctx.palette))
        .map(Operand::Plain)
        .collect();
    let dotted: Vec<Operand> = (1..=n_max)
        .flat_map(|n| enumerate_dotted(EnumClass::All, n, &ctx.palette))
        .map(Operand::Dotted)
        .collect();
    let plain_buckets: Vec<Vec<Operand>> =
        bucket_by_theory(&ctx, &plain, d).into_values().collect();
    let dotted_buckets: Vec<Vec<Operand>> =
        bucket_by_theory(&ctx, &dotted, d).into_values().collect();

    let mut cases = 0;
    let mut failures = 0;
    let mut notes = Vec::new();
    let pick = |rng: &mut StdRng, dottedness: bool| -> (Operand, Operand) {
        let buckets = if dottedness {
            &dotted_buckets
        } else {
            &plain_buckets
        };
        let bucket = &buckets[rng.gen_range(0..buckets.len())];
        let a = bucket[rng.gen_range(0..bucket.len())].clone();
        let b = bucket[rng.gen_range(0..bucket.len())].clone();
        // Random relabelings keep the checks honest about labels.
        (random_relabel(rng, &a), random_relabel(rng, &b))
    };
    for _ in 0..tuples {
        let kind = ComposeKind::ALL[rng.gen_range(0..ComposeKind::ALL.len())];
        let (ld, rd, _) = kind.shape();
        let (x, x2) = pick(&mut rng, ld);
        let (y, y2) = pick(&mut rng, rd);
        cases += 1;
        let a = compose(kind, &x, &y).unwrap();
        let b = compose(kind, &x2, &y2).unwrap();
        let ta = theory_operand(&ctx, &a, d).unwrap();
        let tb = theory_operand(&ctx, &b, d).unwrap();
        if ta != tb {
            failures += 1;
            if notes.len() < 5 {
                notes.push(format!("{kind:?}: {x:?}/{x2:?} + {y:?}/{y2:?}"));
            }
            continue;
        }
        // The direct type-composition route must land on the same theory.
        let tx = theory_operand(&ctx, &x, d).unwrap();
        let ty = theory_operand(&ctx, &y, d).unwrap();
        let fast = theory_op(&ctx, kind, tx, ty).unwrap();
        if fast != ta {
            failures += 1;
            if notes.len() < 5 {
                notes.push(format!("{kind:?}: type route diverged"));
            }
        }
    }
    VerifyReport {
        name: format!("well-definedness seed={seed} tuples={tuples} n<={n_max} d={d}"),
        cases,
        failures,
        notes,
    }
}

/// Exhaustive well-definedness at depth 0 over all operand pairs up to
/// `n_max` vertices, every kind.
pub fn welldef_exhaustive(n_max: u32) -> VerifyReport {
    let ctx = TheoryCtx::new(Palette::empty());
    let d = 0;
    let plain: Vec<Operand> = (1..=n_max)
        .flat_map(|n| enumerate_class(EnumClass::All, n, &ctx.palette))
        .map(Operand::Plain)
        .collect();
    let dotted: Vec<Operand> = (1..=n_max)
        .flat_map(|n| enumerate_dotted(EnumClass::All, n, &ctx.palette))
        .map(Operand::Dotted)
        .collect();
    let plain_buckets: Vec<Vec<Operand>> =
        bucket_by_theory(&ctx, &plain, d).into_values().collect();
    let dotted_buckets: Vec<Vec<Operand>> =
        bucket_by_theory(&ctx, &dotted, d).into_values().collect();
    let mut cases = 0;
    let mut failures = 0;
    let mut notes = Vec::new();
    for kind in ComposeKind::ALL {
        let (ld, rd, _) = kind.shape();
        let lefts = if ld { &dotted_buckets } else { &plain_buckets };
        let rights = if rd { &dotted_buckets } else { &plain_buckets };
        for lb in lefts {
            for rb in rights {
                // All pairs within the two buckets must compose equally.
                let reference =
                    theory_operand(&ctx, &compose(kind, &lb[0], &rb[0]).unwrap(), d).unwrap();
                for l in lb {
                    for r in rb {
                        cases += 1;
                        let t =
                            theory_operand(&ctx, &compose(kind, l, r).unwrap(), d).unwrap();
                        if t != reference {
                            failures += 1;
                            if notes.len() < 5 {
                                notes.push(format!("{kind:?}: {l:?} + {r:?}"));
                            }
                        }
                    }
                }
            }
        }
    }
    VerifyReport {
        name: format!("well-definedness exhaustive d=0 n<={n_max}"),
        cases,
        failures,
        notes,
    }
}

/// The Remark-10 regression: with orphan information ablated from the
/// normal form, two structures agree on all ablated atomic formulas with a
/// parameter pinning a vertex whose orphan-ness differs, yet attaching a
/// root produces structures whose ablated atomic types differ. Returns the
/// report of the violation search; `failures == 0` would mean the ablation
/// regression FAILED to reproduce.
pub fn ablation_violation_found() -> bool {
    let pal = Palette::empty();
    // X: an orphan x next to a path u -> w; X': the same but x -> u.
    // Parameters: A1 = {root-to-be}, A2 = {x}.
    let xa = Graph::new(3, vec![None, Some(2), None], pal.clone(), vec![]).unwrap();
    let xb = Graph::new(3, vec![Some(1), Some(2), None], pal.clone(), vec![]).unwrap();
    let sets = [0b000u64, 0b001];
    let ta = atomic_type(&xa, None, &sets, NO_ORPHAN);
    let tb = atomic_type(&xb, None, &sets, NO_ORPHAN);
    if ta != tb {
        return false;
    }
    // With the full vocabulary they differ, which is the point of Orphan.
    if atomic_type(&xa, None, &sets, FULL) == atomic_type(&xb, None, &sets, FULL) {
        return false;
    }
    let za = crate::graph::attach_root(&xa).unwrap();
    let zb = crate::graph::attach_root(&xb).unwrap();
    // The composed parameters pin the new root and x.
    let sets_z = [0b1000u64, 0b0001];
    let ca = atomic_type(&za, None, &sets_z, NO_ORPHAN);
    let cb = atomic_type(&zb, None, &sets_z, NO_ORPHAN);
    ca != cb
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lemma5_small() {
        let report = lemma5_suite(3, &[0, 1]);
        assert!(report.passed(), "{}", report.summary());
    }

    #[test]
    fn welldef_exhaustive_small() {
        let report = welldef_exhaustive(3);
        assert!(report.passed(), "{}", report.summary());
    }

    #[test]
    fn welldef_random_small() {
        let report = welldef_suite(0xfeed, 50, 3, 1);
        assert!(report.passed(), "{}", report.summary());
    }

    #[test]
    fn ablation_reproduces_remark() {
        assert!(ablation_violation_found());
    }
}
