//! Standard semantics of both dialects over concrete graphs. Set quantifiers
//! range over all vertex subsets.

use std::collections::HashMap;

use thiserror::Error;

use crate::graph::{mask_all, Graph};

use super::{Formula, SetTerm, Term};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("unbound element variable {0:?}")]
    UnboundElem(String),
    #[error("unbound set variable {0:?}")]
    UnboundSet(String),
    #[error("unknown color {0:?}")]
    UnknownColor(String),
    #[error("f applied to an orphan (vertex {0})")]
    PartialApplication(u32),
    #[error("set quantifier over {0} vertices exceeds the evaluation ceiling")]
    SetQuantifierTooLarge(u32),
}

/// Assignment for the free variables of a formula.
#[derive(Clone, Debug, Default)]
pub struct Env {
    pub elems: HashMap<String, u32>,
    pub sets: HashMap<String, u64>,
}

const MAX_SET_QUANT_VERTICES: u32 = 24;

fn eval_term(g: &Graph, env: &Env, t: &Term) -> Result<u32, EvalError> {
    match t {
        Term::Var(v) => env
            .elems
            .get(v)
            .copied()
            .ok_or_else(|| EvalError::UnboundElem(v.clone())),
        Term::App(inner) => {
            let v = eval_term(g, env, inner)?;
            g.parent(v).ok_or(EvalError::PartialApplication(v))
        }
    }
}

fn eval_set_term(g: &Graph, env: &Env, t: &SetTerm) -> Result<u64, EvalError> {
    let full = mask_all(g.vertex_count());
    Ok(match t {
        SetTerm::Var(v) => *env
            .sets
            .get(v)
            .ok_or_else(|| EvalError::UnboundSet(v.clone()))?,
        SetTerm::Universe => full,
        SetTerm::EmptySet => 0,
        SetTerm::Not(x) => !eval_set_term(g, env, x)? & full,
        SetTerm::And(x, y) => eval_set_term(g, env, x)? & eval_set_term(g, env, y)?,
        SetTerm::Or(x, y) => eval_set_term(g, env, x)? | eval_set_term(g, env, y)?,
    })
}

fn color_index(g: &Graph, name: &str) -> Result<usize, EvalError> {
    g.palette()
        .index_of(name)
        .ok_or_else(|| EvalError::UnknownColor(name.to_string()))
}

/// Singleton check plus its element.
fn as_singleton(mask: u64) -> Option<u32> {
    if mask != 0 && mask & (mask - 1) == 0 {
        Some(mask.trailing_zeros())
    } else {
        None
    }
}

pub fn eval_with_env(f: &Formula, g: &Graph, env: &mut Env) -> Result<bool, EvalError> {
    Ok(match f {
        Formula::True => true,
        Formula::False => false,
        Formula::Edge(x, y) => {
            let vx = *env
                .elems
                .get(x)
                .ok_or_else(|| EvalError::UnboundElem(x.clone()))?;
            let vy = *env
                .elems
                .get(y)
                .ok_or_else(|| EvalError::UnboundElem(y.clone()))?;
            g.parent(vx) == Some(vy)
        }
        Formula::Eq(a, b) => eval_term(g, env, a)? == eval_term(g, env, b)?,
        Formula::Color(c, t) => {
            let idx = color_index(g, c)?;
            let v = eval_term(g, env, t)?;
            g.color_mask(idx) >> v & 1 == 1
        }
        Formula::Orphan(x) => {
            let v = *env
                .elems
                .get(x)
                .ok_or_else(|| EvalError::UnboundElem(x.clone()))?;
            g.is_orphan(v)
        }
        Formula::In(x, a) => {
            let v = *env
                .elems
                .get(x)
                .ok_or_else(|| EvalError::UnboundElem(x.clone()))?;
            let m = *env
                .sets
                .get(a)
                .ok_or_else(|| EvalError::UnboundSet(a.clone()))?;
            m >> v & 1 == 1
        }
        Formula::OrphanEmpty => g.orphans() == 0,
        Formula::SetEmpty(t) => eval_set_term(g, env, t)? == 0,
        Formula::SetAtomic(t) => as_singleton(eval_set_term(g, env, t)?).is_some(),
        Formula::SetColor(c, t) => {
            let idx = color_index(g, c)?;
            match as_singleton(eval_set_term(g, env, t)?) {
                Some(v) => g.color_mask(idx) >> v & 1 == 1,
                None => false,
            }
        }
        Formula::SetOrphan(t) => match as_singleton(eval_set_term(g, env, t)?) {
            Some(v) => g.is_orphan(v),
            None => false,
        },
        Formula::SetEdge(t, u) => {
            match (
                as_singleton(eval_set_term(g, env, t)?),
                as_singleton(eval_set_term(g, env, u)?),
            ) {
                (Some(a), Some(b)) => g.parent(a) == Some(b),
                _ => false,
            }
        }
        Formula::Not(inner) => !eval_with_env(inner, g, env)?,
        Formula::And(a, b) => eval_with_env(a, g, env)? && eval_with_env(b, g, env)?,
        Formula::Or(a, b) => eval_with_env(a, g, env)? || eval_with_env(b, g, env)?,
        Formula::Implies(a, b) => !eval_with_env(a, g, env)? || eval_with_env(b, g, env)?,
        Formula::Iff(a, b) => eval_with_env(a, g, env)? == eval_with_env(b, g, env)?,
        Formula::ExistsElem(v, body) => {
            let old = env.elems.get(v).copied();
            let mut found = false;
            for w in 0..g.vertex_count() {
                env.elems.insert(v.clone(), w);
                if eval_with_env(body, g, env)? {
                    found = true;
                    break;
                }
            }
            restore_elem(env, v, old);
            found
        }
        Formula::ForallElem(v, body) => {
            let old = env.elems.get(v).copied();
            let mut all = true;
            for w in 0..g.vertex_count() {
                env.elems.insert(v.clone(), w);
                if !eval_with_env(body, g, env)? {
                    all = false;
                    break;
                }
            }
            restore_elem(env, v, old);
            all
        }
        Formula::ExistsSet(v, body) => {
            let n = g.vertex_count();
            if n > MAX_SET_QUANT_VERTICES {
                return Err(EvalError::SetQuantifierTooLarge(n));
            }
            let old = env.sets.get(v).copied();
            let mut found = false;
            for m in 0..1u64 << n {
                env.sets.insert(v.clone(), m);
                if eval_with_env(body, g, env)? {
                    found = true;
                    break;
                }
            }
            restore_set(env, v, old);
            found
        }
        Formula::ForallSet(v, body) => {
            let n = g.vertex_count();
            if n > MAX_SET_QUANT_VERTICES {
                return Err(EvalError::SetQuantifierTooLarge(n));
            }
            let old = env.sets.get(v).copied();
            let mut all = true;
            for m in 0..1u64 << n {
                env.sets.insert(v.clone(), m);
                if !eval_with_env(body, g, env)? {
                    all = false;
                    break;
                }
            }
            restore_set(env, v, old);
            all
        }
    })
}

fn restore_elem(env: &mut Env, v: &str, old: Option<u32>) {
    match old {
        Some(w) => {
            env.elems.insert(v.to_string(), w);
        }
        None => {
            env.elems.remove(v);
        }
    }
}

fn restore_set(env: &mut Env, v: &str, old: Option<u64>) {
    match old {
        Some(m) => {
            env.sets.insert(v.to_string(), m);
        }
        None => {
            env.sets.remove(v);
        }
    }
}

/// Evaluates a sentence (empty environment).
pub fn eval(f: &Formula, g: &Graph) -> Result<bool, EvalError> {
    eval_with_env(f, g, &mut Env::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Graph, Palette};
    use crate::mso::parse;

    fn pal() -> Palette {
        Palette::empty()
    }

    #[test]
    fn c3_everyone_has_a_child() {
        let g = Graph::cycle(&pal(), 3);
        let f = parse("forall x. exists y. E(y, x)").unwrap();
        assert!(eval(&f, &g).unwrap());
    }

    #[test]
    fn orphan_empty_on_orphan() {
        let g = Graph::singleton(&pal(), false);
        let f = parse("OrphanEmpty").unwrap();
        assert!(!eval(&f, &g).unwrap());
        assert!(eval(&f, &Graph::singleton(&pal(), true)).unwrap());
    }

    #[test]
    fn two_colorability_of_cycles() {
        // Frozen from direct evaluation over all subsets.
        let f = parse("Exists A. forall x. forall y. (E(x, y) -> (x in A <-> ~(y in A)))")
            .unwrap();
        assert!(eval(&f, &Graph::cycle(&pal(), 2)).unwrap());
        assert!(!eval(&f, &Graph::cycle(&pal(), 3)).unwrap());
    }

    #[test]
    fn unbound_variable_reported() {
        let f = parse("E(x, y)").unwrap();
        assert!(matches!(
            eval(&f, &Graph::cycle(&pal(), 2)),
            Err(EvalError::UnboundElem(_))
        ));
    }

    #[test]
    fn f_dialect_terms() {
        let g = Graph::cycle(&pal(), 2);
        let f = parse("forall x. f(f(x)) = x").unwrap();
        assert!(eval(&f, &g).unwrap());
        let f2 = parse("exists x. f(x) = x").unwrap();
        assert!(!eval(&f2, &g).unwrap());
    }

    #[test]
    fn semantic_sanity_connectives() {
        use rand::rngs::StdRng;
        use rand::{Rng, SeedableRng};
        let mut rng = StdRng::seed_from_u64(7);
        let parts = [
            "OrphanEmpty",
            "exists x. E(x, x)",
            "forall x. exists y. E(x, y)",
            "Exists A. forall x. x in A",
        ];
        for _ in 0..50 {
            let n = rng.gen_range(1..=4u32);
            let parent = (0..n)
                .map(|_| {
                    if rng.gen_bool(0.7) {
                        Some(rng.gen_range(0..n))
                    } else {
                        None
                    }
                })
                .collect();
            let g = Graph::new(n, parent, pal(), vec![]).unwrap();
            let a = parse(parts[rng.gen_range(0..parts.len())]).unwrap();
            let b = parse(parts[rng.gen_range(0..parts.len())]).unwrap();
            let conj = Formula::and(a.clone(), b.clone());
            assert_eq!(
                eval(&conj, &g).unwrap(),
                eval(&a, &g).unwrap() && eval(&b, &g).unwrap()
            );
            let neg = Formula::not(a.clone());
            assert_eq!(eval(&neg, &g).unwrap(), !eval(&a, &g).unwrap());
        }
    }
}
