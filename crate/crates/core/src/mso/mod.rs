//! MSO formulas over PF-graphs: abstract syntax, concrete grammar, standard
//! semantics, and the translation that eliminates the unary function symbol
//! in favor of the edge relation.
//!
//! Two dialects share the AST. The input dialect has one unary function
//! symbol `f` inside equalities and color atoms; the PF-graph dialect has the
//! edge relation, orphan atoms and set-term atoms instead. A formula that
//! mixes both is rejected.

mod eval;
mod parser;
mod translate;

pub use eval::{eval, eval_with_env, Env, EvalError};
pub use parser::{parse, ParseError};
pub use translate::{eliminate_functions, TranslateError};

use std::fmt;

/// Element term: a variable or a stack of `f` applications over one.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Var(String),
    App(Box<Term>),
}

impl Term {
    pub fn has_app(&self) -> bool {
        matches!(self, Term::App(_))
    }

    pub(crate) fn base_var(&self) -> &str {
        match self {
            Term::Var(v) => v,
            Term::App(t) => t.base_var(),
        }
    }
}

/// Boolean set term over set variables, for the associate-dialect atoms.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum SetTerm {
    Var(String),
    Universe,
    EmptySet,
    Not(Box<SetTerm>),
    And(Box<SetTerm>, Box<SetTerm>),
    Or(Box<SetTerm>, Box<SetTerm>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    /// `E(x, y)`: y is the parent of x.
    Edge(String, String),
    /// `t = u` over element terms.
    Eq(Term, Term),
    /// `c(t)` for a palette color.
    Color(String, Term),
    /// `Orphan(x)`.
    Orphan(String),
    /// `x in A`.
    In(String, String),
    /// `OrphanEmpty`: the orphan set is empty, as one nullary atom.
    OrphanEmpty,
    /// `Empty(T)`: the set term denotes the empty set.
    SetEmpty(SetTerm),
    /// `Atomic(T)`: the set term denotes a singleton.
    SetAtomic(SetTerm),
    /// `c(T)`: the set term is a singleton whose element has color c.
    SetColor(String, SetTerm),
    /// `Orphan(T)`: singleton whose element is an orphan.
    SetOrphan(SetTerm),
    /// `E(T, U)`: both singletons, with an edge between the elements.
    SetEdge(SetTerm, SetTerm),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    ExistsElem(String, Box<Formula>),
    ForallElem(String, Box<Formula>),
    ExistsSet(String, Box<Formula>),
    ForallSet(String, Box<Formula>),
}

impl Formula {
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn exists_elem(v: impl Into<String>, f: Formula) -> Formula {
        Formula::ExistsElem(v.into(), Box::new(f))
    }

    pub fn forall_elem(v: impl Into<String>, f: Formula) -> Formula {
        Formula::ForallElem(v.into(), Box::new(f))
    }

    pub fn exists_set(v: impl Into<String>, f: Formula) -> Formula {
        Formula::ExistsSet(v.into(), Box::new(f))
    }

    pub fn forall_set(v: impl Into<String>, f: Formula) -> Formula {
        Formula::ForallSet(v.into(), Box::new(f))
    }

    /// Conjunction of a nonempty list, right-nested; `True` when empty.
    pub fn and_all(mut fs: Vec<Formula>) -> Formula {
        match fs.len() {
            0 => Formula::True,
            1 => fs.pop().unwrap(),
            _ => {
                let mut acc = fs.pop().unwrap();
                while let Some(f) = fs.pop() {
                    acc = Formula::and(f, acc);
                }
                acc
            }
        }
    }

    /// Quantifier nesting depth, element and set quantifiers alike.
    pub fn depth(&self) -> u32 {
        match self {
            Formula::Not(f) => f.depth(),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b) => a.depth().max(b.depth()),
            Formula::ExistsElem(_, f)
            | Formula::ForallElem(_, f)
            | Formula::ExistsSet(_, f)
            | Formula::ForallSet(_, f) => 1 + f.depth(),
            _ => 0,
        }
    }

    /// True when no `f` application occurs anywhere.
    pub fn is_pf_dialect(&self) -> bool {
        !self.uses_function()
    }

    pub fn uses_function(&self) -> bool {
        match self {
            Formula::Eq(a, b) => a.has_app() || b.has_app(),
            Formula::Color(_, t) => t.has_app(),
            Formula::Not(f) => f.uses_function(),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b) => a.uses_function() || b.uses_function(),
            Formula::ExistsElem(_, f)
            | Formula::ForallElem(_, f)
            | Formula::ExistsSet(_, f)
            | Formula::ForallSet(_, f) => f.uses_function(),
            _ => false,
        }
    }

    /// True when a PF-dialect-only atom occurs (edge, orphan, set atoms).
    pub fn uses_pf_atoms(&self) -> bool {
        match self {
            Formula::Edge(..)
            | Formula::Orphan(_)
            | Formula::OrphanEmpty
            | Formula::SetEmpty(_)
            | Formula::SetAtomic(_)
            | Formula::SetColor(..)
            | Formula::SetOrphan(_)
            | Formula::SetEdge(..) => true,
            Formula::Not(f) => f.uses_pf_atoms(),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b) => a.uses_pf_atoms() || b.uses_pf_atoms(),
            Formula::ExistsElem(_, f)
            | Formula::ForallElem(_, f)
            | Formula::ExistsSet(_, f)
            | Formula::ForallSet(_, f) => f.uses_pf_atoms(),
            _ => false,
        }
    }

    /// Free element and set variables, in order of first occurrence.
    pub fn free_vars(&self) -> (Vec<String>, Vec<String>) {
        let mut elems = Vec::new();
        let mut sets = Vec::new();
        self.collect_free(&mut Vec::new(), &mut Vec::new(), &mut elems, &mut sets);
        (elems, sets)
    }

    fn collect_free(
        &self,
        bound_e: &mut Vec<String>,
        bound_s: &mut Vec<String>,
        elems: &mut Vec<String>,
        sets: &mut Vec<String>,
    ) {
        let note_e = |v: &str, bound_e: &Vec<String>, elems: &mut Vec<String>| {
            if !bound_e.iter().any(|b| b == v) && !elems.iter().any(|b| b == v) {
                elems.push(v.to_string());
            }
        };
        match self {
            Formula::Edge(x, y) => {
                note_e(x, bound_e, elems);
                note_e(y, bound_e, elems);
            }
            Formula::Eq(a, b) => {
                note_e(a.base_var(), bound_e, elems);
                note_e(b.base_var(), bound_e, elems);
            }
            Formula::Color(_, t) => note_e(t.base_var(), bound_e, elems),
            Formula::Orphan(x) => note_e(x, bound_e, elems),
            Formula::In(x, a) => {
                note_e(x, bound_e, elems);
                if !bound_s.iter().any(|b| b == a) && !sets.iter().any(|b| b == a) {
                    sets.push(a.clone());
                }
            }
            Formula::SetEmpty(t)
            | Formula::SetAtomic(t)
            | Formula::SetColor(_, t)
            | Formula::SetOrphan(t) => collect_set_term(t, bound_s, sets),
            Formula::SetEdge(t, u) => {
                collect_set_term(t, bound_s, sets);
                collect_set_term(u, bound_s, sets);
            }
            Formula::Not(f) => f.collect_free(bound_e, bound_s, elems, sets),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b) => {
                a.collect_free(bound_e, bound_s, elems, sets);
                b.collect_free(bound_e, bound_s, elems, sets);
            }
            Formula::ExistsElem(v, f) | Formula::ForallElem(v, f) => {
                bound_e.push(v.clone());
                f.collect_free(bound_e, bound_s, elems, sets);
                bound_e.pop();
            }
            Formula::ExistsSet(v, f) | Formula::ForallSet(v, f) => {
                bound_s.push(v.clone());
                f.collect_free(bound_e, bound_s, elems, sets);
                bound_s.pop();
            }
            _ => {}
        }
    }

    pub fn is_sentence(&self) -> bool {
        let (e, s) = self.free_vars();
        e.is_empty() && s.is_empty()
    }
}

fn collect_set_term(t: &SetTerm, bound_s: &[String], sets: &mut Vec<String>) {
    match t {
        SetTerm::Var(a) => {
            if !bound_s.iter().any(|b| b == a) && !sets.iter().any(|b| b == a) {
                sets.push(a.clone());
            }
        }
        SetTerm::Universe | SetTerm::EmptySet => {}
        SetTerm::Not(x) => collect_set_term(x, bound_s, sets),
        SetTerm::And(x, y) | SetTerm::Or(x, y) => {
            collect_set_term(x, bound_s, sets);
            collect_set_term(y, bound_s, sets);
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::App(t) => write!(f, "f({t})"),
        }
    }
}

impl fmt::Display for SetTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SetTerm::Var(v) => write!(f, "{v}"),
            SetTerm::Universe => write!(f, "1"),
            SetTerm::EmptySet => write!(f, "0"),
            SetTerm::Not(t) => write!(f, "~{t}"),
            SetTerm::And(a, b) => write!(f, "({a} & {b})"),
            SetTerm::Or(a, b) => write!(f, "({a} | {b})"),
        }
    }
}

// Binding strengths for the printer: higher binds tighter.
fn prec(f: &Formula) -> u8 {
    match f {
        Formula::Iff(..) => 1,
        Formula::Implies(..) => 2,
        Formula::Or(..) => 3,
        Formula::And(..) => 4,
        Formula::Not(..) => 5,
        Formula::ExistsElem(..)
        | Formula::ForallElem(..)
        | Formula::ExistsSet(..)
        | Formula::ForallSet(..) => 0,
        _ => 6,
    }
}

fn fmt_at(f: &Formula, parent: u8, out: &mut fmt::Formatter<'_>) -> fmt::Result {
    let p = prec(f);
    let need = p < parent && p != 6;
    if need {
        write!(out, "(")?;
    }
    match f {
        Formula::True => write!(out, "true")?,
        Formula::False => write!(out, "false")?,
        Formula::Edge(x, y) => write!(out, "E({x}, {y})")?,
        Formula::Eq(a, b) => write!(out, "{a} = {b}")?,
        Formula::Color(c, t) => write!(out, "{c}({t})")?,
        Formula::Orphan(x) => write!(out, "Orphan({x})")?,
        Formula::In(x, a) => write!(out, "{x} in {a}")?,
        Formula::OrphanEmpty => write!(out, "OrphanEmpty")?,
        Formula::SetEmpty(t) => write!(out, "Empty({t})")?,
        Formula::SetAtomic(t) => write!(out, "Atomic({t})")?,
        Formula::SetColor(c, t) => write!(out, "{c}({t})")?,
        Formula::SetOrphan(t) => write!(out, "Orphan({t})")?,
        Formula::SetEdge(t, u) => write!(out, "E({t}, {u})")?,
        Formula::Not(g) => {
            write!(out, "~")?;
            fmt_at(g, 5, out)?;
        }
        Formula::And(a, b) => {
            fmt_at(a, 5, out)?;
            write!(out, " & ")?;
            fmt_at(b, 4, out)?;
        }
        Formula::Or(a, b) => {
            fmt_at(a, 4, out)?;
            write!(out, " | ")?;
            fmt_at(b, 3, out)?;
        }
        Formula::Implies(a, b) => {
            fmt_at(a, 3, out)?;
            write!(out, " -> ")?;
            fmt_at(b, 2, out)?;
        }
        Formula::Iff(a, b) => {
            fmt_at(a, 2, out)?;
            write!(out, " <-> ")?;
            fmt_at(b, 1, out)?;
        }
        Formula::ExistsElem(v, g) => {
            write!(out, "exists {v}. ")?;
            fmt_at(g, 0, out)?;
        }
        Formula::ForallElem(v, g) => {
            write!(out, "forall {v}. ")?;
            fmt_at(g, 0, out)?;
        }
        Formula::ExistsSet(v, g) => {
            write!(out, "Exists {v}. ")?;
            fmt_at(g, 0, out)?;
        }
        Formula::ForallSet(v, g) => {
            write!(out, "Forall {v}. ")?;
            fmt_at(g, 0, out)?;
        }
    }
    if need {
        write!(out, ")")?;
    }
    Ok(())
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_at(self, 0, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn depth_counts_both_quantifier_kinds() {
        let f = parse("Exists A. forall x. x in A").unwrap();
        assert_eq!(f.depth(), 2);
        let atom = parse("E(x, y)").unwrap();
        assert_eq!(atom.depth(), 0);
    }

    #[test]
    fn display_parses_back() {
        for text in [
            "forall x. E(x, x)",
            "Exists A. forall x. x in A",
            "exists x. exists y. ~x = y & f(x) = y",
            "forall x. (E(x, x) -> Orphan(x)) | OrphanEmpty",
            "Exists A. Empty(A & ~A)",
            "~(true & false)",
            "forall x. exists y. E(x, y) <-> OrphanEmpty",
        ] {
            let f = parse(text).unwrap();
            let printed = f.to_string();
            let again = parse(&printed).unwrap();
            assert_eq!(f, again, "round-trip of {text} via {printed}");
        }
    }

    #[test]
    fn free_variables() {
        let f = parse("f(x) = y").unwrap();
        let (e, s) = f.free_vars();
        assert_eq!(e, vec!["x", "y"]);
        assert!(s.is_empty());
        assert!(!f.is_sentence());
        assert!(parse("forall x. E(x, x)").unwrap().is_sentence());
    }
}
