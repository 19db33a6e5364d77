//! Exact cardinality of the hereditarily finite type spaces: an arity-`j`
//! atomic-type count at depth 0, then one powerset per depth level. The
//! numbers tower quickly, so values too wide to materialize stay in the
//! symbolic form `2^e`.

use num_bigint::BigUint;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BoundError {
    #[error("type-space bound computed exactly only for depth <= 2, got {0}")]
    TooDeep(u8),
}

/// A materialized integer or a symbolic power of two.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Bound {
    Exact(BigUint),
    Pow2(Box<Bound>),
}

/// Materialization ceiling, in bits.
const MAX_BITS: u64 = 4_000_000;

impl Bound {
    pub fn exact(&self) -> Option<&BigUint> {
        match self {
            Bound::Exact(v) => Some(v),
            Bound::Pow2(_) => None,
        }
    }

    /// `2^self`, materialized when small enough.
    pub fn pow2(self) -> Bound {
        if let Bound::Exact(e) = &self {
            if *e <= BigUint::from(MAX_BITS) {
                let bits = u64::try_from(e.clone()).expect("small exponent");
                return Bound::Exact(BigUint::from(1u8) << bits);
            }
        }
        Bound::Pow2(Box::new(self))
    }

    pub fn le(&self, other: &Bound) -> bool {
        // A Pow2 node only arises when its exponent exceeds MAX_BITS, so a
        // symbolic power always dwarfs every materialized value.
        match (self, other) {
            (Bound::Exact(a), Bound::Exact(b)) => a <= b,
            (Bound::Pow2(a), Bound::Pow2(b)) => a.le(b),
            (Bound::Exact(_), Bound::Pow2(_)) => true,
            (Bound::Pow2(_), Bound::Exact(_)) => false,
        }
    }
}

impl std::fmt::Display for Bound {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Bound::Exact(v) => {
                if v.bits() > 256 {
                    write!(f, "2^{} (approx)", v.bits() - 1)
                } else {
                    write!(f, "{v}")
                }
            }
            Bound::Pow2(e) => write!(f, "2^({e})"),
        }
    }
}

fn binomial(n: u64, k: u64) -> BigUint {
    let mut acc = BigUint::from(1u8);
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// Number of arity-`j` atomic types in the normal form, counted
/// syntactically: per cell empty/singleton(profile)/many, edge facts over
/// the singleton cells, and the nullary orphan-emptiness bit.
pub fn atomic_type_space(j: u32, palette_len: u32) -> BigUint {
    let cells = 1u64 << j;
    let profiles = BigUint::from(1u8) << (palette_len as u64 + 1);
    let mut total = BigUint::from(0u8);
    for k in 0..=cells {
        let choose = binomial(cells, k);
        let prof = pow(&profiles, k);
        let others = BigUint::from(1u8) << (cells - k);
        let edges = BigUint::from(1u8) << (k * k);
        total += choose * prof * others * edges;
    }
    total << 1
}

fn pow(base: &BigUint, e: u64) -> BigUint {
    let mut acc = BigUint::from(1u8);
    for _ in 0..e {
        acc *= base;
    }
    acc
}

/// `|bx^d(j)|`: the space every depth-`d` arity-`j` theory lives in.
/// Exact for `d <= 2`; deeper levels are refused.
pub fn type_space_bound(d: u8, j: u32, palette_len: u32) -> Result<Bound, BoundError> {
    if d > 2 {
        return Err(BoundError::TooDeep(d));
    }
    let mut acc = Bound::Exact(atomic_type_space(j + d as u32, palette_len));
    for _ in 0..d {
        acc = acc.pow2();
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn powerset_recurrence_holds() {
        for j in 0..=1u32 {
            for d in 0..=1u8 {
                let lower = type_space_bound(d, j + 1, 0).unwrap();
                let upper = type_space_bound(d + 1, j, 0).unwrap();
                assert_eq!(lower.pow2(), upper, "d={d} j={j}");
            }
        }
    }

    #[test]
    fn monotone_in_depth_and_arity() {
        for d in 0..=1u8 {
            for j in 0..=1u32 {
                let here = type_space_bound(d, j, 0).unwrap();
                assert!(here.le(&type_space_bound(d, j + 1, 0).unwrap()));
                assert!(here.le(&type_space_bound(d + 1, j, 0).unwrap()));
            }
        }
    }

    #[test]
    fn depth3_is_refused() {
        assert_eq!(type_space_bound(3, 0, 0), Err(BoundError::TooDeep(3)));
    }

    #[test]
    fn realized_depth1_theories_fit_the_bound() {
        use crate::enumerate::{enumerate_class, EnumClass};
        use crate::graph::Palette;
        use crate::theory::{theory, TheoryCtx};
        use std::collections::BTreeSet;
        let ctx = TheoryCtx::new(Palette::empty());
        let mut seen = BTreeSet::new();
        for n in 1..=4 {
            for g in enumerate_class(EnumClass::All, n, &ctx.palette) {
                seen.insert(theory(&ctx, &g, 1).unwrap());
            }
        }
        let bound = type_space_bound(1, 0, 0).unwrap();
        assert!(Bound::Exact(BigUint::from(seen.len() as u64)).le(&bound));
    }

    #[test]
    fn tiny_atomic_space_sanity() {
        // Arity 0, no colors: 1 cell; empty/many each contribute 2 (the
        // orphan-empty bit), singleton contributes 4*2 (profiles x edges).
        assert_eq!(atomic_type_space(0, 0), BigUint::from(12u8));
    }
}
