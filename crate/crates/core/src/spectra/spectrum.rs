//! Spectrum prefixes along two routes: a dynamic program over the closure
//! table (which sizes realize which theory), and exhaustive enumeration plus
//! evaluation. The routes check each other wherever both are feasible.

use std::collections::BTreeMap;

use crate::algebra::closure::{seeds, ClosureTable, KClass, RULES};
use crate::algebra::theory_op;
use crate::enumerate::{enumerate_class, EnumClass};
use crate::graph::mask_all;
use crate::mso::{eval, Formula};
use crate::par;
use crate::theory::{theory_operand, TheoryCtx, TheoryId};

use super::{theories_of, to_pf_sentence, SpectraError};

/// Largest horizon the evaluation route will enumerate exhaustively.
pub const EVAL_LIMIT: u32 = 8;

/// For every table theory, the sizes (up to `horizon`, as a bitmask with
/// bit `n-1` for size `n`) realized by some structure of its class. Complete
/// for class K because every K structure decomposes along the closure rules
/// with sizes adding up.
pub fn realizable_sizes(
    ctx: &TheoryCtx,
    table: &ClosureTable,
    horizon: u32,
) -> Result<BTreeMap<TheoryId, u64>, SpectraError> {
    assert!(horizon >= 1 && horizon <= 63);
    let full = mask_all(horizon);
    let mut sizes: BTreeMap<TheoryId, u64> = BTreeMap::new();
    for seed in seeds(&ctx.palette) {
        let t = theory_operand(ctx, &seed, table.d)?;
        *sizes.entry(t).or_default() |= 1;
    }
    let by_class: Vec<(KClass, Vec<TheoryId>)> = [
        KClass::FunctionGraph,
        KClass::Forest,
        KClass::DottedForest,
        KClass::DottedSingletonFn,
    ]
    .into_iter()
    .map(|c| (c, table.ids_of_class(c)))
    .collect();
    let class_ids = |c: KClass| -> &Vec<TheoryId> {
        &by_class.iter().find(|(k, _)| *k == c).unwrap().1
    };
    loop {
        let mut changed = false;
        for &(kind, cl, cr, _) in &RULES {
            let pairs: Vec<(TheoryId, TheoryId, u64, u64)> = class_ids(cl)
                .iter()
                .flat_map(|&a| {
                    class_ids(cr)
                        .iter()
                        .map(move |&b| (a, b))
                        .collect::<Vec<_>>()
                })
                .filter_map(|(a, b)| {
                    let ma = sizes.get(&a).copied().unwrap_or(0);
                    let mb = sizes.get(&b).copied().unwrap_or(0);
                    if ma == 0 || mb == 0 {
                        None
                    } else {
                        Some((a, b, ma, mb))
                    }
                })
                .collect();
            let results: Vec<(TheoryId, u64)> = par::try_map_slice(&pairs, |&(a, b, ma, mb)| {
                let t = theory_op(ctx, kind, a, b)?;
                let mut conv = 0u64;
                for i in 0..horizon {
                    if ma >> i & 1 == 1 {
                        conv |= mb << (i + 1);
                    }
                }
                Ok::<_, SpectraError>((t, conv & full))
            })?;
            for (t, conv) in results {
                let slot = sizes.entry(t).or_default();
                let next = *slot | conv;
                if next != *slot {
                    *slot = next;
                    changed = true;
                }
            }
        }
        if !changed {
            return Ok(sizes);
        }
    }
}

/// Exhaustive route: for each size up to the horizon, does some graph of
/// the class satisfy the sentence? Sizes are evaluated in parallel.
pub fn spectrum_eval_path(
    ctx: &TheoryCtx,
    sentence: &Formula,
    horizon: u32,
    class: EnumClass,
) -> Result<Vec<bool>, SpectraError> {
    if !sentence.is_sentence() {
        return Err(SpectraError::NotASentence);
    }
    assert!(
        horizon <= EVAL_LIMIT,
        "evaluation route is exhaustive; keep the horizon at {EVAL_LIMIT} or below"
    );
    let ns: Vec<u32> = (1..=horizon).collect();
    let out = par::try_map_slice(&ns, |&n| {
        for g in enumerate_class(class, n, &ctx.palette) {
            if eval(sentence, &g)? {
                return Ok::<_, SpectraError>(true);
            }
        }
        Ok(false)
    })?;
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct SpectrumReport {
    /// Membership per size `1..=horizon`.
    pub prefix: Vec<bool>,
    /// Which routes produced it.
    pub theory_path: bool,
    pub eval_path: bool,
}

/// Function-graph spectrum prefix of a sentence in either dialect.
///
/// Uses the table route when a table is supplied, the evaluation route when
/// the horizon allows it, and insists they agree when both ran.
pub fn spectrum_prefix(
    ctx: &TheoryCtx,
    table: Option<&ClosureTable>,
    sentence: &Formula,
    horizon: u32,
) -> Result<SpectrumReport, SpectraError> {
    let chi = to_pf_sentence(sentence)?;
    let from_table = match table {
        Some(table) => {
            let hits = theories_of(table, &chi)?;
            let sizes = realizable_sizes(ctx, table, horizon)?;
            let mut mask = 0u64;
            for t in hits {
                mask |= sizes.get(&t).copied().unwrap_or(0);
            }
            Some((0..horizon).map(|i| mask >> i & 1 == 1).collect::<Vec<_>>())
        }
        None => None,
    };
    let from_eval = if horizon <= EVAL_LIMIT {
        // The translated sentence is a function-dialect surrogate: its
        // models are function graphs either way.
        let direct = if sentence.uses_function() {
            sentence
        } else {
            &chi
        };
        Some(spectrum_eval_path(
            ctx,
            direct,
            horizon,
            EnumClass::FunctionGraph,
        )?)
    } else {
        None
    };
    match (from_table, from_eval) {
        (Some(a), Some(b)) => {
            if a != b {
                return Err(SpectraError::Algebra(
                    crate::algebra::AlgebraError::BadTable(format!(
                        "spectrum routes disagree: theory {a:?} vs eval {b:?}"
                    )),
                ));
            }
            Ok(SpectrumReport {
                prefix: a,
                theory_path: true,
                eval_path: true,
            })
        }
        (Some(a), None) => Ok(SpectrumReport {
            prefix: a,
            theory_path: true,
            eval_path: false,
        }),
        (None, Some(b)) => Ok(SpectrumReport {
            prefix: b,
            theory_path: false,
            eval_path: true,
        }),
        (None, None) => Err(SpectraError::DepthMismatch {
            depth: chi.depth(),
            table: 0,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::closure::{closure, ClosureOptions};
    use crate::graph::Palette;
    use crate::mso::parse;
    use crate::theory::theory;

    #[test]
    fn identity_spectrum_is_everything() {
        let ctx = TheoryCtx::new(Palette::empty());
        let table = closure(&ctx, 1, ClosureOptions::for_depth(1)).unwrap();
        let f = parse("forall x. f(x) = x").unwrap();
        let report = spectrum_prefix(&ctx, Some(&table), &f, 6).unwrap();
        assert!(report.theory_path && report.eval_path);
        assert_eq!(report.prefix, vec![true; 6]);
    }

    #[test]
    fn star_with_loop_hits_every_size() {
        // exists y. forall x. E(x, y): some vertex is everyone's parent.
        let ctx = TheoryCtx::new(Palette::empty());
        let f = parse("exists y. forall x. E(x, y)").unwrap();
        let report = spectrum_prefix(&ctx, None, &f, 8).unwrap();
        assert_eq!(report.prefix, vec![true; 8]);
    }

    #[test]
    fn realizable_sizes_match_enumeration_at_depth0() {
        let ctx = TheoryCtx::new(Palette::empty());
        let table = closure(&ctx, 0, ClosureOptions::for_depth(0)).unwrap();
        let horizon = 6;
        let sizes = realizable_sizes(&ctx, &table, horizon).unwrap();
        // Oracle: enumerate function graphs per size and mark their theory.
        let mut oracle: BTreeMap<TheoryId, u64> = BTreeMap::new();
        for n in 1..=horizon {
            for g in enumerate_class(EnumClass::FunctionGraph, n, &ctx.palette) {
                *oracle.entry(theory(&ctx, &g, 0).unwrap()).or_default() |= 1 << (n - 1);
            }
        }
        for (t, mask) in oracle {
            assert_eq!(sizes.get(&t).copied().unwrap_or(0) & mask, mask, "{t:?}");
        }
    }
}
