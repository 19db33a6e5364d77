//! Eventual-periodicity certificates for theory spectra: a period `p`, a
//! threshold `theta`, and a validated membership prefix.

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::closure::{ClosureTable, KClass};
use crate::theory::{TheoryCtx, TheoryId};

use super::spectrum::realizable_sizes;
use super::SpectraError;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CertError {
    #[error("horizon {horizon} too short: need at least theta + p = {need}")]
    HorizonTooShort { horizon: usize, need: u64 },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectrumCertificate {
    pub d: u8,
    /// Digest of the theory this certificate covers, when it covers one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theory: Option<String>,
    /// The sentence, when the certificate covers a sentence spectrum.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sentence: Option<String>,
    pub p: u64,
    pub theta: u32,
    /// Membership for sizes `1..=horizon`.
    pub prefix: Vec<bool>,
    pub flags: Vec<String>,
    /// The astronomically larger threshold in the style of the case
    /// analysis, recorded next to the empirical one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub paper_theta_bound: Option<String>,
}

/// The defining implication: for every size `n` with
/// `theta <= n <= horizon - p`, membership at `n` forces membership at
/// `n + p`.
pub fn check_certificate(cert: &SpectrumCertificate) -> Result<bool, CertError> {
    let horizon = cert.prefix.len();
    if (horizon as u64) < cert.theta as u64 + cert.p {
        return Err(CertError::HorizonTooShort {
            horizon,
            need: cert.theta as u64 + cert.p,
        });
    }
    let upper = horizon as u64 - cert.p;
    for n in cert.theta.max(1) as u64..=upper {
        let here = cert.prefix[(n - 1) as usize];
        let there = cert.prefix[(n - 1 + cert.p) as usize];
        if here && !there {
            return Ok(false);
        }
    }
    Ok(true)
}

fn minimal_theta(prefix: &[bool], p: u64) -> u32 {
    let horizon = prefix.len() as u64;
    'outer: for theta in 0..=horizon {
        if horizon < theta + p {
            return theta as u32;
        }
        for n in theta.max(1)..=horizon - p {
            if prefix[(n - 1) as usize] && !prefix[(n - 1 + p) as usize] {
                continue 'outer;
            }
        }
        return theta as u32;
    }
    horizon as u32
}

/// Crude but sound size bound, in the style of the proof's remainder class:
/// at most one component per function-graph theory, cycles no longer than
/// the dotted-tree theory count, non-cyclic paths no longer than the tree
/// theory count, and branching bounded by the forest theory count.
fn paper_style_bound(table: &ClosureTable) -> BigUint {
    let c_fn = BigUint::from(table.class_count(KClass::FunctionGraph).max(1));
    let c_forest = BigUint::from(table.class_count(KClass::Forest).max(1));
    let c_dtree = BigUint::from(table.tree_theory_count(true).max(1));
    let c_tree = table.tree_theory_count(false).max(1);
    // Tree size <= sum of branching^depth over depths up to the path bound.
    let mut tree_size = BigUint::from(0u8);
    let mut layer = BigUint::from(1u8);
    for _ in 0..=c_tree {
        tree_size += layer.clone();
        layer *= c_forest.clone();
    }
    c_fn * c_dtree * tree_size
}

/// Emits one certificate per function-graph theory in the table, each
/// validated against its realizable-size prefix up to `horizon`.
pub fn period_certificate(
    ctx: &TheoryCtx,
    table: &ClosureTable,
    horizon: u32,
) -> Result<Vec<(TheoryId, SpectrumCertificate)>, SpectraError> {
    let p = table.period();
    let sizes = realizable_sizes(ctx, table, horizon)?;
    let mut global_flags = Vec::new();
    for (t, e) in &table.entries {
        if !e.min_confirmed {
            global_flags.push(format!(
                "minimum-unconfirmed:{}",
                &ctx.interner.get(*t).digest_hex()[..12]
            ));
        }
    }
    let bound = paper_style_bound(table).to_string();
    let mut out = Vec::new();
    for t in table.ids_of_class(KClass::FunctionGraph) {
        let mask = sizes.get(&t).copied().unwrap_or(0);
        let prefix: Vec<bool> = (0..horizon).map(|i| mask >> i & 1 == 1).collect();
        let theta = minimal_theta(&prefix, p);
        let cert = SpectrumCertificate {
            d: table.d,
            theory: Some(ctx.interner.get(t).digest_hex()),
            sentence: None,
            p,
            theta,
            prefix,
            flags: global_flags.clone(),
            paper_theta_bound: Some(bound.clone()),
        };
        out.push((t, cert));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cert(prefix: Vec<bool>, p: u64, theta: u32) -> SpectrumCertificate {
        SpectrumCertificate {
            d: 0,
            theory: None,
            sentence: None,
            p,
            theta,
            prefix,
            flags: vec![],
            paper_theta_bound: None,
        }
    }

    #[test]
    fn evens_pass() {
        let prefix: Vec<bool> = (1..=8u32).map(|n| n % 2 == 0).collect();
        assert!(check_certificate(&cert(prefix, 2, 0)).unwrap());
    }

    #[test]
    fn gap_fails() {
        // {2, 3} only: 2 is a member but 4 is not.
        let prefix = vec![false, true, true, false, false, false, false, false];
        assert!(!check_certificate(&cert(prefix, 2, 0)).unwrap());
    }

    #[test]
    fn short_horizon_is_an_error() {
        let prefix = vec![true, true];
        assert!(matches!(
            check_certificate(&cert(prefix, 2, 1)),
            Err(CertError::HorizonTooShort { .. })
        ));
    }

    #[test]
    fn full_spectrum_accepts_any_period() {
        let prefix = vec![true; 12];
        for p in 1..=6 {
            assert!(check_certificate(&cert(prefix.clone(), p, 1)).unwrap());
        }
    }

    #[test]
    fn emitted_certificates_validate_at_depth0() {
        use crate::algebra::closure::{closure, ClosureOptions};
        use crate::graph::Palette;
        let ctx = TheoryCtx::new(Palette::empty());
        let table = closure(&ctx, 0, ClosureOptions::for_depth(0)).unwrap();
        let certs = period_certificate(&ctx, &table, 12).unwrap();
        assert!(!certs.is_empty());
        for (_, c) in certs {
            assert!(check_certificate(&c).unwrap());
        }
    }
}
