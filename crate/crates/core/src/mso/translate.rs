//! Replaces the unary function symbol by its edge graph: `f(x) = y` becomes
//! `E(x, y)`, nested applications get fresh existentially bound variables,
//! and the whole result is conjoined with `OrphanEmpty` so that every model
//! is a function graph.

use std::collections::HashSet;

use thiserror::Error;

use super::{Formula, Term};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TranslateError {
    #[error("formula already uses PF-graph atoms")]
    NotFunctionDialect,
}

struct Fresh {
    used: HashSet<String>,
    next: u32,
}

impl Fresh {
    fn take(&mut self) -> String {
        loop {
            self.next += 1;
            let cand = format!("z{}", self.next);
            if self.used.insert(cand.clone()) {
                return cand;
            }
        }
    }
}

/// Flattened element term: a plain variable or one `f` application over one.
enum Core {
    V(String),
    F(String),
}

/// Peels nested applications, emitting one fresh variable and one edge atom
/// per inner application.
fn flatten(t: &Term, fresh: &mut Fresh, pre: &mut Vec<(String, String)>) -> Core {
    match t {
        Term::Var(v) => Core::V(v.clone()),
        Term::App(inner) => match flatten(inner, fresh, pre) {
            Core::V(u) => Core::F(u),
            Core::F(u) => {
                let z = fresh.take();
                pre.push((z.clone(), u));
                Core::F(z)
            }
        },
    }
}

fn wrap(pre: Vec<(String, String)>, extra: Vec<String>, atoms: Vec<Formula>) -> Formula {
    let body = Formula::and_all(atoms);
    let mut out = body;
    for z in extra.into_iter().rev() {
        out = Formula::exists_elem(z, out);
    }
    for (z, _) in pre.into_iter().rev() {
        out = Formula::exists_elem(z, out);
    }
    out
}

fn pre_atoms(pre: &[(String, String)]) -> Vec<Formula> {
    pre.iter()
        .map(|(z, from)| Formula::Edge(from.clone(), z.clone()))
        .collect()
}

fn rewrite(f: &Formula, fresh: &mut Fresh) -> Formula {
    match f {
        Formula::Eq(a, b) => {
            if !a.has_app() && !b.has_app() {
                return f.clone();
            }
            let mut pre = Vec::new();
            let ca = flatten(a, fresh, &mut pre);
            let cb = flatten(b, fresh, &mut pre);
            let mut atoms = pre_atoms(&pre);
            match (ca, cb) {
                (Core::V(x), Core::V(y)) => {
                    atoms.push(Formula::Eq(Term::Var(x), Term::Var(y)));
                    wrap(pre, vec![], atoms)
                }
                (Core::F(u), Core::V(y)) | (Core::V(y), Core::F(u)) => {
                    atoms.push(Formula::Edge(u, y));
                    wrap(pre, vec![], atoms)
                }
                (Core::F(u), Core::F(w)) => {
                    let z = fresh.take();
                    atoms.push(Formula::Edge(u, z.clone()));
                    atoms.push(Formula::Edge(w, z.clone()));
                    wrap(pre, vec![z], atoms)
                }
            }
        }
        Formula::Color(c, t) => {
            if !t.has_app() {
                return f.clone();
            }
            let mut pre = Vec::new();
            let core = flatten(t, fresh, &mut pre);
            let mut atoms = pre_atoms(&pre);
            match core {
                Core::V(x) => {
                    atoms.push(Formula::Color(c.clone(), Term::Var(x)));
                    wrap(pre, vec![], atoms)
                }
                Core::F(u) => {
                    let z = fresh.take();
                    atoms.push(Formula::Edge(u, z.clone()));
                    atoms.push(Formula::Color(c.clone(), Term::Var(z.clone())));
                    wrap(pre, vec![z], atoms)
                }
            }
        }
        Formula::Not(g) => Formula::not(rewrite(g, fresh)),
        Formula::And(a, b) => Formula::and(rewrite(a, fresh), rewrite(b, fresh)),
        Formula::Or(a, b) => Formula::or(rewrite(a, fresh), rewrite(b, fresh)),
        Formula::Implies(a, b) => Formula::implies(rewrite(a, fresh), rewrite(b, fresh)),
        Formula::Iff(a, b) => {
            Formula::Iff(Box::new(rewrite(a, fresh)), Box::new(rewrite(b, fresh)))
        }
        Formula::ExistsElem(v, g) => Formula::exists_elem(v.clone(), rewrite(g, fresh)),
        Formula::ForallElem(v, g) => Formula::forall_elem(v.clone(), rewrite(g, fresh)),
        Formula::ExistsSet(v, g) => Formula::exists_set(v.clone(), rewrite(g, fresh)),
        Formula::ForallSet(v, g) => Formula::forall_set(v.clone(), rewrite(g, fresh)),
        other => other.clone(),
    }
}

fn all_var_names(f: &Formula, out: &mut HashSet<String>) {
    match f {
        Formula::Edge(x, y) => {
            out.insert(x.clone());
            out.insert(y.clone());
        }
        Formula::Eq(a, b) => {
            out.insert(a.base_var().to_string());
            out.insert(b.base_var().to_string());
        }
        Formula::Color(_, t) => {
            out.insert(t.base_var().to_string());
        }
        Formula::Orphan(x) => {
            out.insert(x.clone());
        }
        Formula::In(x, a) => {
            out.insert(x.clone());
            out.insert(a.clone());
        }
        Formula::Not(g) => all_var_names(g, out),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
            all_var_names(a, out);
            all_var_names(b, out);
        }
        Formula::ExistsElem(v, g)
        | Formula::ForallElem(v, g)
        | Formula::ExistsSet(v, g)
        | Formula::ForallSet(v, g) => {
            out.insert(v.clone());
            all_var_names(g, out);
        }
        _ => {}
    }
}

/// Lemma 14 translation: function dialect in, PF-graph dialect out, spectrum
/// preserved, every model a function graph.
pub fn eliminate_functions(f: &Formula) -> Result<Formula, TranslateError> {
    if f.uses_pf_atoms() {
        return Err(TranslateError::NotFunctionDialect);
    }
    let mut used = HashSet::new();
    all_var_names(f, &mut used);
    let mut fresh = Fresh { used, next: 0 };
    let rewritten = rewrite(f, &mut fresh);
    Ok(Formula::and(rewritten, Formula::OrphanEmpty))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mso::parse;

    fn count_edges(f: &Formula) -> u32 {
        match f {
            Formula::Edge(..) => 1,
            Formula::Not(g) => count_edges(g),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b) => count_edges(a) + count_edges(b),
            Formula::ExistsElem(_, g)
            | Formula::ForallElem(_, g)
            | Formula::ExistsSet(_, g)
            | Formula::ForallSet(_, g) => count_edges(g),
            _ => 0,
        }
    }

    #[test]
    fn simple_equation() {
        let f = parse("f(x) = y").unwrap();
        let chi = eliminate_functions(&f).unwrap();
        assert_eq!(chi.to_string(), "E(x, y) & OrphanEmpty");
    }

    #[test]
    fn nested_equation_shape() {
        // f(f(x)) = f(y) flattens to two existentials and three edge atoms.
        let f = parse("f(f(x)) = f(y)").unwrap();
        let chi = eliminate_functions(&f).unwrap();
        assert_eq!(chi.depth(), 2);
        assert_eq!(count_edges(&chi), 3);
        assert!(chi.is_pf_dialect());
    }

    #[test]
    fn identity_sentence() {
        let f = parse("forall x. f(x) = x").unwrap();
        let chi = eliminate_functions(&f).unwrap();
        assert_eq!(chi.to_string(), "(forall x. E(x, x)) & OrphanEmpty");
        assert_eq!(chi.depth(), 1);
    }

    #[test]
    fn pf_dialect_rejected() {
        let f = parse("E(x, y)").unwrap();
        assert_eq!(
            eliminate_functions(&f),
            Err(TranslateError::NotFunctionDialect)
        );
    }

    #[test]
    fn color_atom_with_term() {
        let pal_formula = parse("red(f(x))").unwrap();
        let chi = eliminate_functions(&pal_formula).unwrap();
        assert_eq!(chi.depth(), 1);
        assert!(chi.is_pf_dialect());
    }
}
