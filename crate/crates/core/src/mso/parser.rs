//! Recursive-descent parser for the concrete formula grammar.
//!
//! Lowercase identifiers are element variables (and color names in atom
//! position), uppercase identifiers are set variables. `forall`/`exists`
//! bind element variables, `Forall`/`Exists` bind set variables.

use std::fmt;

use thiserror::Error;

use super::{Formula, SetTerm, Term};

#[derive(Debug, Error, PartialEq, Eq)]
#[error("syntax error at byte {pos}: {msg}")]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

fn err<T>(pos: usize, msg: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        pos,
        msg: msg.into(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    Dot,
    Comma,
    Eq,
    And,
    Or,
    Not,
    Implies,
    Iff,
    Zero,
    One,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "{s:?}"),
            Tok::LParen => write!(f, "'('"),
            Tok::RParen => write!(f, "')'"),
            Tok::Dot => write!(f, "'.'"),
            Tok::Comma => write!(f, "','"),
            Tok::Eq => write!(f, "'='"),
            Tok::And => write!(f, "'&'"),
            Tok::Or => write!(f, "'|'"),
            Tok::Not => write!(f, "'~'"),
            Tok::Implies => write!(f, "'->'"),
            Tok::Iff => write!(f, "'<->'"),
            Tok::Zero => write!(f, "'0'"),
            Tok::One => write!(f, "'1'"),
            Tok::Eof => write!(f, "end of input"),
        }
    }
}

const RESERVED: &[&str] = &[
    "forall",
    "exists",
    "Forall",
    "Exists",
    "in",
    "true",
    "false",
    "E",
    "f",
    "Orphan",
    "OrphanEmpty",
    "Empty",
    "Atomic",
];

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '(' => {
                toks.push((Tok::LParen, i));
                i += 1;
            }
            ')' => {
                toks.push((Tok::RParen, i));
                i += 1;
            }
            '.' => {
                toks.push((Tok::Dot, i));
                i += 1;
            }
            ',' => {
                toks.push((Tok::Comma, i));
                i += 1;
            }
            '=' => {
                toks.push((Tok::Eq, i));
                i += 1;
            }
            '&' => {
                toks.push((Tok::And, i));
                i += 1;
            }
            '|' => {
                toks.push((Tok::Or, i));
                i += 1;
            }
            '~' => {
                toks.push((Tok::Not, i));
                i += 1;
            }
            '0' => {
                toks.push((Tok::Zero, i));
                i += 1;
            }
            '1' => {
                toks.push((Tok::One, i));
                i += 1;
            }
            '-' => {
                if bytes.get(i + 1) == Some(&b'>') {
                    toks.push((Tok::Implies, i));
                    i += 2;
                } else {
                    return err(i, "expected '->'");
                }
            }
            '<' => {
                if bytes.get(i + 1) == Some(&b'-') && bytes.get(i + 2) == Some(&b'>') {
                    toks.push((Tok::Iff, i));
                    i += 3;
                } else {
                    return err(i, "expected '<->'");
                }
            }
            _ if c.is_ascii_alphabetic() => {
                let start = i;
                while i < bytes.len() {
                    let d = bytes[i] as char;
                    if d.is_ascii_alphanumeric() || d == '_' || d == '\'' {
                        i += 1;
                    } else {
                        break;
                    }
                }
                toks.push((Tok::Ident(text[start..i].to_string()), start));
            }
            _ => return err(i, format!("unexpected character {c:?}")),
        }
    }
    toks.push((Tok::Eof, bytes.len()));
    Ok(toks)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok) -> Result<(), ParseError> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            err(self.pos(), format!("expected {want}, found {}", self.peek()))
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.implication()?;
        while *self.peek() == Tok::Iff {
            self.bump();
            let rhs = self.implication()?;
            lhs = Formula::Iff(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn implication(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disjunction()?;
        if *self.peek() == Tok::Implies {
            self.bump();
            let rhs = self.implication()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.conjunction()?;
        while *self.peek() == Tok::Or {
            self.bump();
            let rhs = self.conjunction()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.unary()?;
        while *self.peek() == Tok::And {
            self.bump();
            let rhs = self.unary()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::Not => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::Ident(kw)
                if kw == "forall" || kw == "exists" || kw == "Forall" || kw == "Exists" =>
            {
                self.bump();
                let pos = self.pos();
                let var = match self.bump() {
                    Tok::Ident(v) => v,
                    other => return err(pos, format!("expected a variable, found {other}")),
                };
                if RESERVED.contains(&var.as_str()) {
                    return err(pos, format!("{var:?} is reserved"));
                }
                let var_is_set = var.chars().next().is_some_and(|c| c.is_ascii_uppercase());
                let kw_is_set = kw.chars().next().is_some_and(|c| c.is_ascii_uppercase());
                if var_is_set != kw_is_set {
                    return err(
                        pos,
                        format!(
                            "{kw} binds {} variables, found {var:?}",
                            if kw_is_set { "set" } else { "element" }
                        ),
                    );
                }
                self.expect(Tok::Dot)?;
                let body = self.formula()?;
                Ok(match (kw.as_str(), var_is_set) {
                    ("forall", false) => Formula::forall_elem(var, body),
                    ("exists", false) => Formula::exists_elem(var, body),
                    ("Forall", true) => Formula::forall_set(var, body),
                    ("Exists", true) => Formula::exists_set(var, body),
                    _ => unreachable!(),
                })
            }
            _ => self.atom(),
        }
    }

    /// A set term, or a single element variable when the argument is a bare
    /// lowercase identifier. Used in `E`, `Orphan`, and color arguments.
    fn arg(&mut self) -> Result<Result<String, SetTerm>, ParseError> {
        if let Tok::Ident(v) = self.peek().clone() {
            if !RESERVED.contains(&v.as_str())
                && v.chars().next().is_some_and(|c| c.is_ascii_lowercase())
            {
                self.bump();
                return Ok(Ok(v));
            }
        }
        Ok(Err(self.set_term()?))
    }

    fn set_term(&mut self) -> Result<SetTerm, ParseError> {
        let mut lhs = self.set_and()?;
        while *self.peek() == Tok::Or {
            self.bump();
            let rhs = self.set_and()?;
            lhs = SetTerm::Or(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn set_and(&mut self) -> Result<SetTerm, ParseError> {
        let mut lhs = self.set_unary()?;
        while *self.peek() == Tok::And {
            self.bump();
            let rhs = self.set_unary()?;
            lhs = SetTerm::And(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn set_unary(&mut self) -> Result<SetTerm, ParseError> {
        match self.peek().clone() {
            Tok::Not => {
                self.bump();
                Ok(SetTerm::Not(Box::new(self.set_unary()?)))
            }
            Tok::Zero => {
                self.bump();
                Ok(SetTerm::EmptySet)
            }
            Tok::One => {
                self.bump();
                Ok(SetTerm::Universe)
            }
            Tok::LParen => {
                self.bump();
                let t = self.set_term()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            Tok::Ident(v) if v.chars().next().is_some_and(|c| c.is_ascii_uppercase()) => {
                if RESERVED.contains(&v.as_str()) {
                    return err(self.pos(), format!("{v:?} is reserved"));
                }
                self.bump();
                Ok(SetTerm::Var(v))
            }
            other => err(self.pos(), format!("expected a set term, found {other}")),
        }
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        match self.peek().clone() {
            Tok::Ident(v) if v == "f" => {
                self.bump();
                self.expect(Tok::LParen)?;
                let inner = self.term()?;
                self.expect(Tok::RParen)?;
                Ok(Term::App(Box::new(inner)))
            }
            Tok::Ident(v) if v.chars().next().is_some_and(|c| c.is_ascii_lowercase()) => {
                if RESERVED.contains(&v.as_str()) {
                    return err(self.pos(), format!("{v:?} is reserved"));
                }
                self.bump();
                Ok(Term::Var(v))
            }
            other => err(self.pos(), format!("expected a term, found {other}")),
        }
    }

    fn atom(&mut self) -> Result<Formula, ParseError> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Tok::Ident(id) => match id.as_str() {
                "true" => {
                    self.bump();
                    Ok(Formula::True)
                }
                "false" => {
                    self.bump();
                    Ok(Formula::False)
                }
                "OrphanEmpty" => {
                    self.bump();
                    Ok(Formula::OrphanEmpty)
                }
                "E" => {
                    self.bump();
                    self.expect(Tok::LParen)?;
                    let a = self.arg()?;
                    self.expect(Tok::Comma)?;
                    let b = self.arg()?;
                    self.expect(Tok::RParen)?;
                    match (a, b) {
                        (Ok(x), Ok(y)) => Ok(Formula::Edge(x, y)),
                        (Err(t), Err(u)) => Ok(Formula::SetEdge(t, u)),
                        _ => err(pos, "E takes two element variables or two set terms"),
                    }
                }
                "Orphan" => {
                    self.bump();
                    self.expect(Tok::LParen)?;
                    let a = self.arg()?;
                    self.expect(Tok::RParen)?;
                    Ok(match a {
                        Ok(x) => Formula::Orphan(x),
                        Err(t) => Formula::SetOrphan(t),
                    })
                }
                "Empty" => {
                    self.bump();
                    self.expect(Tok::LParen)?;
                    let t = self.set_term()?;
                    self.expect(Tok::RParen)?;
                    Ok(Formula::SetEmpty(t))
                }
                "Atomic" => {
                    self.bump();
                    self.expect(Tok::LParen)?;
                    let t = self.set_term()?;
                    self.expect(Tok::RParen)?;
                    Ok(Formula::SetAtomic(t))
                }
                "f" => {
                    let t = self.term()?;
                    self.expect(Tok::Eq)?;
                    let u = self.term()?;
                    Ok(Formula::Eq(t, u))
                }
                _ if id.chars().next().is_some_and(|c| c.is_ascii_lowercase()) => {
                    // Color atom `c(..)`, or `x = t` / `x in A`.
                    self.bump();
                    match self.peek().clone() {
                        Tok::LParen => {
                            self.bump();
                            let a = self.arg()?;
                            self.expect(Tok::RParen)?;
                            Ok(match a {
                                Ok(x) => Formula::Color(id, Term::Var(x)),
                                Err(t) => Formula::SetColor(id, t),
                            })
                        }
                        Tok::Eq => {
                            self.bump();
                            let rhs = self.term()?;
                            Ok(Formula::Eq(Term::Var(id), rhs))
                        }
                        Tok::Ident(kw) if kw == "in" => {
                            self.bump();
                            let pos = self.pos();
                            match self.bump() {
                                Tok::Ident(a)
                                    if a.chars()
                                        .next()
                                        .is_some_and(|c| c.is_ascii_uppercase())
                                        && !RESERVED.contains(&a.as_str()) =>
                                {
                                    Ok(Formula::In(id, a))
                                }
                                other => {
                                    err(pos, format!("expected a set variable, found {other}"))
                                }
                            }
                        }
                        other => err(
                            self.pos(),
                            format!("expected '(', '=' or 'in' after {id:?}, found {other}"),
                        ),
                    }
                }
                _ => {
                    // Color atoms use lowercase names; an uppercase identifier
                    // here can only start a set-term equality-style atom,
                    // which the grammar does not have.
                    err(pos, format!("unexpected identifier {id:?}"))
                }
            },
            other => err(pos, format!("expected a formula, found {other}")),
        }
    }
}

/// Parses a formula. Free variables are allowed; dialect mixing is not.
pub fn parse(text: &str) -> Result<Formula, ParseError> {
    let toks = lex(text)?;
    let end = toks.last().map(|t| t.1).unwrap_or(0);
    let mut p = Parser { toks, at: 0 };
    let f = p.formula()?;
    if *p.peek() != Tok::Eof {
        return err(p.pos(), format!("trailing input: {}", p.peek()));
    }
    if f.uses_function() && f.uses_pf_atoms() {
        return err(
            end,
            "formula mixes the function dialect with PF-graph atoms",
        );
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simple_sentences() {
        let f = parse("forall x. E(x, x)").unwrap();
        assert_eq!(f.depth(), 1);
        let g = parse("Exists A. forall x. x in A").unwrap();
        assert_eq!(g.depth(), 2);
    }

    #[test]
    fn error_at_end_of_input() {
        let e = parse("exists x.").unwrap_err();
        assert_eq!(e.pos, 9);
    }

    #[test]
    fn dialect_mixing_rejected() {
        assert!(parse("f(x) = y & E(x, y)").is_err());
        assert!(parse("f(x) = y").is_ok());
        assert!(parse("E(x, y)").is_ok());
    }

    #[test]
    fn quantifier_case_must_match_variable_case() {
        assert!(parse("forall A. x in A").is_err());
        assert!(parse("Exists x. E(x, x)").is_err());
    }

    #[test]
    fn nested_terms() {
        let f = parse("f(f(x)) = f(y)").unwrap();
        assert!(f.uses_function());
        assert_eq!(f.depth(), 0);
    }

    #[test]
    fn set_atoms() {
        let f = parse("Forall A. Empty(A & ~A) & Atomic(A | 0) & E(A, ~A)").unwrap();
        assert_eq!(f.depth(), 1);
        assert!(f.is_pf_dialect());
    }

    #[test]
    fn iff_parses() {
        let f = parse("E(x, y) <-> ~(y in A)").unwrap();
        assert!(matches!(f, Formula::Iff(..)));
    }
}
