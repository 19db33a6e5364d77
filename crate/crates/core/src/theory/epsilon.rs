//! Hintikka formulas: for a depth-`d` theory `t`, a depth-`d` sentence true
//! exactly in the structures with theory `t`.
//!
//! The base case writes the atomic type out quantifier-free with set-term
//! atoms over the parameter cells; each further level adds one set
//! quantifier per realized member theory, positively for members of `t` and
//! negatively for the rest. The negative conjuncts range over the supplied
//! `realized` sets rather than the astronomically large full type space, so
//! the formula separates `t` only within the family those sets came from.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::mso::{Formula, SetTerm};

use super::atomic::{AtomicType, Cell};
use super::{Payload, TheoryCtx, TheoryId};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EpsilonError {
    #[error("epsilon formulas are only emitted for undotted theories")]
    Dotted,
    #[error("no realized theory set supplied for depth {depth} arity {arity}")]
    MissingRealized { depth: u8, arity: u8 },
}

fn set_var(i: u8) -> String {
    format!("A{i}")
}

/// Intersection of parameter literals for the cell `eps`.
fn cell_term(j: u8, eps: usize) -> SetTerm {
    let mut acc: Option<SetTerm> = None;
    for i in 0..j {
        let var = SetTerm::Var(set_var(i + 1));
        let lit = if eps >> i & 1 == 1 {
            var
        } else {
            SetTerm::Not(Box::new(var))
        };
        acc = Some(match acc {
            None => lit,
            Some(t) => SetTerm::And(Box::new(t), Box::new(lit)),
        });
    }
    acc.unwrap_or(SetTerm::Universe)
}

/// Quantifier-free description of an atomic type over its cell terms.
fn atomic_description(at: &AtomicType, palette: &[String]) -> Formula {
    debug_assert!(!at.dotted);
    let j = at.arity;
    let mut conj = Vec::new();
    let mut singles = Vec::new();
    for (eps, cell) in at.cells.iter().enumerate() {
        let term = cell_term(j, eps);
        match cell {
            Cell::Empty => conj.push(Formula::SetEmpty(term)),
            Cell::Many => {
                conj.push(Formula::not(Formula::SetEmpty(term.clone())));
                conj.push(Formula::not(Formula::SetAtomic(term)));
            }
            Cell::Singleton(p) => {
                conj.push(Formula::SetAtomic(term.clone()));
                for (ci, name) in palette.iter().enumerate() {
                    let atom = Formula::SetColor(name.clone(), term.clone());
                    conj.push(if p.colors >> ci & 1 == 1 {
                        atom
                    } else {
                        Formula::not(atom)
                    });
                }
                let orphan = Formula::SetOrphan(term.clone());
                conj.push(if p.orphan {
                    orphan
                } else {
                    Formula::not(orphan)
                });
                singles.push((eps, term));
            }
        }
    }
    for (ea, ta) in &singles {
        for (eb, tb) in &singles {
            let atom = Formula::SetEdge(ta.clone(), tb.clone());
            conj.push(if at.has_edge(*ea as u16, *eb as u16) {
                atom
            } else {
                Formula::not(atom)
            });
        }
    }
    conj.push(if at.orphan_empty {
        Formula::OrphanEmpty
    } else {
        Formula::not(Formula::OrphanEmpty)
    });
    Formula::and_all(conj)
}

/// The realized-theory sets come from [`super::collect_realized`] over the
/// family of structures the formula must separate within.
pub fn epsilon_formula(
    ctx: &TheoryCtx,
    t: TheoryId,
    realized: &BTreeMap<(u8, u8), BTreeSet<TheoryId>>,
) -> Result<Formula, EpsilonError> {
    let data = ctx.interner.get(t);
    if data.dotted {
        return Err(EpsilonError::Dotted);
    }
    match &data.payload {
        Payload::Atomic(at) => Ok(atomic_description(at, ctx.palette.names())),
        Payload::Set(members) => {
            let level = (data.depth - 1, data.arity + 1);
            let pool = realized
                .get(&level)
                .ok_or(EpsilonError::MissingRealized {
                    depth: level.0,
                    arity: level.1,
                })?;
            let var = set_var(data.arity + 1);
            let mut conj = Vec::new();
            for &s in members {
                let inner = epsilon_formula(ctx, s, realized)?;
                conj.push(Formula::exists_set(var.clone(), inner));
            }
            for &s in pool {
                if !members.contains(&s) {
                    let inner = epsilon_formula(ctx, s, realized)?;
                    conj.push(Formula::not(Formula::exists_set(var.clone(), inner)));
                }
            }
            Ok(Formula::and_all(conj))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate::{enumerate_class, EnumClass};
    use crate::graph::{Operand, Palette};
    use crate::mso::eval;
    use crate::theory::{collect_realized, theory, TheoryCtx};

    #[test]
    fn separates_depth1_theories_of_small_graphs() {
        let ctx = TheoryCtx::new(Palette::empty());
        let family: Vec<Operand> = (1..=3)
            .flat_map(|n| enumerate_class(EnumClass::All, n, &ctx.palette))
            .map(Operand::Plain)
            .collect();
        let d = 1;
        let realized = collect_realized(&ctx, &family, d).unwrap();
        for target in &family {
            let t = theory(&ctx, target.graph(), d).unwrap();
            let eps = epsilon_formula(&ctx, t, &realized).unwrap();
            assert_eq!(eps.depth(), d as u32);
            for probe in &family {
                let expect = theory(&ctx, probe.graph(), d).unwrap() == t;
                assert_eq!(
                    eval(&eps, probe.graph()).unwrap(),
                    expect,
                    "eps of {target:?} on {probe:?}"
                );
            }
        }
    }

    #[test]
    fn depth2_spot_check() {
        let ctx = TheoryCtx::new(Palette::empty());
        let family: Vec<Operand> = (1..=2)
            .flat_map(|n| enumerate_class(EnumClass::All, n, &ctx.palette))
            .map(Operand::Plain)
            .collect();
        let realized = collect_realized(&ctx, &family, 2).unwrap();
        let t = theory(&ctx, family[0].graph(), 2).unwrap();
        let eps = epsilon_formula(&ctx, t, &realized).unwrap();
        assert_eq!(eps.depth(), 2);
        for probe in &family {
            let expect = theory(&ctx, probe.graph(), 2).unwrap() == t;
            assert_eq!(eval(&eps, probe.graph()).unwrap(), expect);
        }
    }

    #[test]
    fn colored_atomic_description() {
        let pal = Palette::new(["red"]);
        let ctx = TheoryCtx::new(pal.clone());
        let red = crate::graph::Graph::singleton_colored(&pal, false, 1);
        let plain = crate::graph::Graph::singleton_colored(&pal, false, 0);
        let family = vec![Operand::Plain(red.clone()), Operand::Plain(plain.clone())];
        let realized = collect_realized(&ctx, &family, 0).unwrap();
        let t = theory(&ctx, &red, 0).unwrap();
        let eps = epsilon_formula(&ctx, t, &realized).unwrap();
        assert!(eval(&eps, &red).unwrap());
        assert!(!eval(&eps, &plain).unwrap());
    }
}
