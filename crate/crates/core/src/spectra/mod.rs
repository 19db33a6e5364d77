//! Finite satisfiability over function graphs, spectra along two
//! independent routes, eventual-periodicity certificates, and the pumping
//! construction that grows a function graph by one period without changing
//! its theory.

mod certificate;
mod pump;
mod spectrum;

pub use certificate::{check_certificate, period_certificate, CertError, SpectrumCertificate};
pub use pump::{pump, PumpOutcome, PumpThresholds};
pub use spectrum::{realizable_sizes, spectrum_eval_path, spectrum_prefix, SpectrumReport};

use std::collections::BTreeSet;

use thiserror::Error;

use crate::algebra::closure::ClosureTable;
use crate::algebra::AlgebraError;
use crate::canon::canonical_key_operand;
use crate::graph::{Graph, GraphError};
use crate::mso::{eliminate_functions, eval, EvalError, Formula, TranslateError};
use crate::theory::{TheoryCtx, TheoryError, TheoryId};

#[derive(Debug, Error)]
pub enum SpectraError {
    #[error("expected a sentence, found free variables")]
    NotASentence,
    #[error("sentence depth {depth} exceeds the table depth {table}")]
    DepthMismatch { depth: u32, table: u8 },
    #[error(transparent)]
    Theory(#[from] TheoryError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Translate(#[from] TranslateError),
}

/// Outcome of the finite-satisfiability decision over function graphs.
#[derive(Debug, Clone)]
pub enum Verdict {
    Sat { witness: Graph, size: u32 },
    Unsat,
    ResourceLimit { detail: String },
}

/// The table theories of the function-graph class whose structures satisfy
/// the sentence. A function graph with a covered theory satisfies the
/// sentence exactly when its theory is in the returned set.
pub fn theories_of(
    table: &ClosureTable,
    sentence: &Formula,
) -> Result<BTreeSet<TheoryId>, SpectraError> {
    if !sentence.is_sentence() {
        return Err(SpectraError::NotASentence);
    }
    if sentence.depth() > table.d as u32 {
        return Err(SpectraError::DepthMismatch {
            depth: sentence.depth(),
            table: table.d,
        });
    }
    let mut out = BTreeSet::new();
    for t in table.ids_of_class(crate::algebra::closure::KClass::FunctionGraph) {
        if table.decide_sentence(t, sentence)? {
            out.insert(t);
        }
    }
    Ok(out)
}

/// Normalizes an input sentence for the function-graph decision problem:
/// the function dialect goes through the edge-graph translation, the
/// PF-dialect passes unchanged.
pub fn to_pf_sentence(sentence: &Formula) -> Result<Formula, SpectraError> {
    if !sentence.is_sentence() {
        return Err(SpectraError::NotASentence);
    }
    if sentence.uses_function() {
        Ok(eliminate_functions(sentence)?)
    } else {
        Ok(sentence.clone())
    }
}

/// Decides whether any finite function graph satisfies the sentence, using
/// a prebuilt closure table of adequate depth. A SAT verdict carries the
/// smallest witness among the covered theories and is re-checked by direct
/// evaluation.
pub fn satisfiable_with_table(
    ctx: &TheoryCtx,
    table: &ClosureTable,
    sentence: &Formula,
) -> Result<Verdict, SpectraError> {
    let chi = to_pf_sentence(sentence)?;
    let hits = theories_of(table, &chi)?;
    if hits.is_empty() {
        return Ok(Verdict::Unsat);
    }
    let mut best: Option<(u32, crate::canon::CanonKey, Graph)> = None;
    for t in hits {
        let (witness, size) = table.min_witness(t)?;
        let g = witness.graph().clone();
        let key = (size, canonical_key_operand(witness));
        if best
            .as_ref()
            .map_or(true, |(bs, bk, _)| (key.0, key.1.clone()) < (*bs, bk.clone()))
        {
            best = Some((key.0, key.1, g));
        }
    }
    let (size, _, witness) = best.expect("nonempty hits");
    if !eval(&chi, &witness)? {
        return Err(SpectraError::Algebra(AlgebraError::BadTable(
            "SAT witness fails re-evaluation".into(),
        )));
    }
    let _ = ctx;
    Ok(Verdict::Sat { witness, size })
}

/// One-shot decision: translates, builds the closure at the sentence depth,
/// and decides. Resource ceilings surface as a `ResourceLimit` verdict.
pub fn satisfiable(ctx: &TheoryCtx, sentence: &Formula) -> Result<Verdict, SpectraError> {
    let chi = to_pf_sentence(sentence)?;
    let d = chi.depth().min(255) as u8;
    let opts = crate::algebra::closure::ClosureOptions::for_depth(d);
    match crate::algebra::closure::closure(ctx, d, opts) {
        Ok(table) => satisfiable_with_table(ctx, &table, &chi),
        Err(AlgebraError::Theory(TheoryError::ResourceLimit { n, bits })) => {
            Ok(Verdict::ResourceLimit {
                detail: format!("{n} vertices exceed the 2^{bits} subset ceiling"),
            })
        }
        Err(e) => Err(e.into()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Palette;
    use crate::mso::parse;

    #[test]
    fn identity_is_satisfiable_by_a_self_loop() {
        let ctx = TheoryCtx::new(Palette::empty());
        let f = parse("forall x. f(x) = x").unwrap();
        match satisfiable(&ctx, &f).unwrap() {
            Verdict::Sat { size, .. } => assert_eq!(size, 1),
            other => panic!("expected SAT, got {other:?}"),
        }
    }

    #[test]
    fn contradiction_is_unsat() {
        let ctx = TheoryCtx::new(Palette::empty());
        let f = parse("(forall x. f(x) = x) & (exists x. ~ f(x) = x)").unwrap();
        assert!(matches!(satisfiable(&ctx, &f).unwrap(), Verdict::Unsat));
    }

    #[test]
    fn involution_without_fixpoint_needs_two_vertices() {
        // Brute force over all parent maps with n <= 2 gives the 2-cycle.
        let ctx = TheoryCtx::new(Palette::empty());
        let f = parse("forall x. (~ f(x) = x) & f(f(x)) = x").unwrap();
        match satisfiable(&ctx, &f).unwrap() {
            Verdict::Sat { witness, size } => {
                assert_eq!(size, 2);
                assert!(witness.is_function_graph());
            }
            other => panic!("expected SAT, got {other:?}"),
        }
    }

    #[test]
    fn orphan_empty_holds_for_every_function_graph_theory() {
        let ctx = TheoryCtx::new(Palette::empty());
        let table = crate::algebra::closure::closure(
            &ctx,
            1,
            crate::algebra::closure::ClosureOptions::for_depth(1),
        )
        .unwrap();
        let all = theories_of(&table, &parse("OrphanEmpty").unwrap()).unwrap();
        assert_eq!(
            all.len(),
            table.class_count(crate::algebra::closure::KClass::FunctionGraph)
        );
        let none = theories_of(&table, &parse("~OrphanEmpty").unwrap()).unwrap();
        assert!(none.is_empty());
    }
}
