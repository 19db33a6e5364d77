//! Exact arithmetic on eventually periodic sets of naturals: finitely many
//! sporadic elements plus finitely many arithmetic progressions.
//!
//! The canonical form puts every progression on the least eventual period,
//! extends each progression as far down as membership allows, and keeps
//! only uncovered elements as sporadic. All operations are exact; the tests
//! check them against brute-force expansion.

use std::collections::BTreeSet;

use num_integer::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EpsetError {
    #[error("operand denotes the empty set")]
    EmptyOperand,
    #[error("{0} is not a period of the set")]
    NotAPeriod(u64),
    #[error("progression period must be positive")]
    ZeroPeriod,
    #[error("least common multiple of periods exceeds the working limit")]
    PeriodLcmTooLarge,
}

/// `sporadic  U  U_i { base_i + k * period_i : k >= 0 }`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct EPSet {
    pub sporadic: Vec<u64>,
    pub progressions: Vec<(u64, u64)>,
}

const LCM_LIMIT: u64 = 1_000_000;

impl EPSet {
    pub fn from_parts(sporadic: Vec<u64>, progressions: Vec<(u64, u64)>) -> Result<EPSet, EpsetError> {
        if progressions.iter().any(|&(_, p)| p == 0) {
            return Err(EpsetError::ZeroPeriod);
        }
        Ok(EPSet {
            sporadic,
            progressions,
        }
        .normalize()?)
    }

    pub fn empty() -> EPSet {
        EPSet::default()
    }

    pub fn is_empty_set(&self) -> bool {
        self.sporadic.is_empty() && self.progressions.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.progressions.is_empty()
    }

    pub fn contains(&self, n: u64) -> bool {
        self.sporadic.binary_search(&n).is_ok()
            || self
                .progressions
                .iter()
                .any(|&(b, p)| n >= b && (n - b) % p == 0)
    }

    pub fn expand(&self, horizon: u64) -> Vec<u64> {
        (0..=horizon).filter(|&n| self.contains(n)).collect()
    }

    fn raw_contains(sporadic: &[u64], progressions: &[(u64, u64)], n: u64) -> bool {
        sporadic.contains(&n)
            || progressions
                .iter()
                .any(|&(b, p)| n >= b && (n - b) % p == 0)
    }

    /// Canonical form: least eventual period, maximal downward extension of
    /// each residue class, minimal sporadic remainder. Idempotent.
    pub fn normalize(self) -> Result<EPSet, EpsetError> {
        let EPSet {
            sporadic,
            progressions,
        } = self;
        if progressions.is_empty() {
            let set: BTreeSet<u64> = sporadic.into_iter().collect();
            return Ok(EPSet {
                sporadic: set.into_iter().collect(),
                progressions: vec![],
            });
        }
        let mut big_l = 1u64;
        for &(_, p) in &progressions {
            big_l = big_l.lcm(&p);
            if big_l > LCM_LIMIT {
                return Err(EpsetError::PeriodLcmTooLarge);
            }
        }
        let start = sporadic
            .iter()
            .chain(progressions.iter().map(|(b, _)| b))
            .max()
            .copied()
            .unwrap_or(0)
            + 1;
        let member = |n: u64| EPSet::raw_contains(&sporadic, &progressions, n);
        // Beyond `start` membership is exactly periodic with period big_l;
        // the least period is the least divisor shifting the window into
        // itself.
        let q = (1..=big_l)
            .filter(|d| big_l % d == 0)
            .find(|&d| (start..start + big_l).all(|n| member(n) == member(n + d)))
            .expect("big_l itself is always a period");
        let mut classes = Vec::new();
        for r in 0..q {
            let probe = start + ((q + r - start % q) % q);
            if member(probe) {
                // Walk the class downward while membership persists.
                let mut base = probe;
                while base >= q && member(base - q) {
                    base -= q;
                }
                classes.push((base, q));
            }
        }
        let mut leftovers = Vec::new();
        for n in 0..start {
            if member(n) && !classes.iter().any(|&(b, p)| n >= b && (n - b) % p == 0) {
                leftovers.push(n);
            }
        }
        Ok(EPSet {
            sporadic: leftovers,
            progressions: classes,
        })
    }

    /// Least period; every other period is one of its multiples. A finite
    /// set has period 1 by convention.
    pub fn least_period(&self) -> u64 {
        if self.is_finite() {
            return 1;
        }
        // Normalized sets carry every progression on the least period.
        self.progressions[0].1
    }

    /// Smallest `theta` with `n in S  implies  n + p in S` for all
    /// `n > theta`, then the strict threshold from the residue classes: the
    /// largest first member among the nonempty classes above it.
    pub fn strict_threshold(&self, p: u64) -> Result<u64, EpsetError> {
        if p == 0 {
            return Err(EpsetError::ZeroPeriod);
        }
        let mut big_l = p;
        for &(_, q) in &self.progressions {
            big_l = big_l.lcm(&q);
            if big_l > LCM_LIMIT {
                return Err(EpsetError::PeriodLcmTooLarge);
            }
        }
        let start = self
            .sporadic
            .iter()
            .chain(self.progressions.iter().map(|(b, _)| b))
            .max()
            .copied()
            .unwrap_or(0)
            + 1;
        let horizon = start + 2 * big_l;
        // Period check: beyond `start` the set is exactly periodic, so a
        // violation anywhere shows up in one window.
        if (start..start + big_l).any(|n| self.contains(n) && !self.contains(n + p)) {
            return Err(EpsetError::NotAPeriod(p));
        }
        let theta_min = (0..=start)
            .find(|&theta| (theta + 1..=horizon).all(|n| !self.contains(n) || self.contains(n + p)))
            .expect("start is always a p-threshold here");
        let mut theta_strict = 0;
        for i in 0..p {
            let first = (theta_min..=horizon)
                .find(|&n| n % p == i && self.contains(n));
            if let Some(m) = first {
                theta_strict = theta_strict.max(m);
            }
        }
        Ok(theta_strict)
    }

    pub fn union(sets: &[EPSet]) -> Result<EPSet, EpsetError> {
        let mut sporadic = Vec::new();
        let mut progressions = Vec::new();
        for s in sets {
            sporadic.extend_from_slice(&s.sporadic);
            progressions.extend_from_slice(&s.progressions);
        }
        EPSet {
            sporadic,
            progressions,
        }
        .normalize()
    }

    /// Exact pairwise sumset, folded over the list. Progression pairs go
    /// through the numerical semigroup of their two periods: beyond the
    /// conductor every multiple of the gcd is a sum, below it membership is
    /// computed directly.
    pub fn sumset(sets: &[EPSet]) -> Result<EPSet, EpsetError> {
        let mut iter = sets.iter();
        let first = iter.next().ok_or(EpsetError::EmptyOperand)?;
        if first.is_empty_set() {
            return Err(EpsetError::EmptyOperand);
        }
        let mut acc = first.clone().normalize()?;
        for s in iter {
            if s.is_empty_set() {
                return Err(EpsetError::EmptyOperand);
            }
            acc = sum_two(&acc, s)?;
        }
        Ok(acc)
    }
}

fn sum_two(a: &EPSet, b: &EPSet) -> Result<EPSet, EpsetError> {
    let mut sporadic = Vec::new();
    let mut progressions = Vec::new();
    for &s in &a.sporadic {
        for &t in &b.sporadic {
            sporadic.push(s + t);
        }
        for &(base, p) in &b.progressions {
            progressions.push((s + base, p));
        }
    }
    for &(base, p) in &a.progressions {
        for &t in &b.sporadic {
            progressions.push((base + t, p));
        }
        for &(base2, q) in &b.progressions {
            let g = p.gcd(&q);
            let (pp, qq) = (p / g, q / g);
            // Representable multiples of g: all k >= (pp-1)(qq-1), and a
            // computable set below that conductor.
            let conductor = (pp - 1) * (qq - 1);
            let mut reachable = vec![false; conductor as usize + 1];
            mark_reachable(&mut reachable, pp, qq);
            for (k, &ok) in reachable.iter().enumerate() {
                if ok && (k as u64) < conductor {
                    sporadic.push(base + base2 + g * k as u64);
                }
            }
            progressions.push((base + base2 + g * conductor, g));
        }
    }
    EPSet {
        sporadic,
        progressions,
    }
    .normalize()
}

fn mark_reachable(reach: &mut [bool], p: u64, q: u64) {
    reach[0] = true;
    for k in 0..reach.len() {
        if reach[k] {
            if k + (p as usize) < reach.len() {
                reach[k + p as usize] = true;
            }
            if k + (q as usize) < reach.len() {
                reach[k + q as usize] = true;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ep(sporadic: &[u64], progs: &[(u64, u64)]) -> EPSet {
        EPSet::from_parts(sporadic.to_vec(), progs.to_vec()).unwrap()
    }

    #[test]
    fn normalize_is_idempotent_and_canonical() {
        let evens_as_fours = ep(&[], &[(0, 4), (2, 4)]);
        let evens = ep(&[], &[(0, 2)]);
        assert_eq!(evens_as_fours, evens);
        let again = evens.clone().normalize().unwrap();
        assert_eq!(again, evens);
    }

    #[test]
    fn least_period_examples() {
        assert_eq!(ep(&[], &[(0, 2)]).least_period(), 2);
        // Mixed periods 4 and 6 covering the evens: gcd behavior.
        let mixed = ep(&[], &[(0, 4), (2, 4), (0, 6), (2, 6)]);
        assert_eq!(mixed.least_period(), 2);
        let odd_tail = ep(&[0], &[(3, 2)]);
        assert_eq!(odd_tail.least_period(), 2);
        assert_eq!(ep(&[5, 9], &[]).least_period(), 1);
    }

    #[test]
    fn strict_threshold_examples() {
        let s = ep(&[0], &[(3, 2)]);
        assert_eq!(s.strict_threshold(2).unwrap(), 3);
        assert_eq!(ep(&[], &[(0, 2)]).strict_threshold(2).unwrap(), 0);
        let late = ep(&[1, 2], &[(10, 3)]);
        assert_eq!(late.strict_threshold(3).unwrap(), 10);
        assert!(matches!(
            ep(&[], &[(0, 2)]).strict_threshold(3),
            Err(EpsetError::NotAPeriod(3))
        ));
    }

    #[test]
    fn union_examples() {
        let evens = ep(&[], &[(0, 2)]);
        let odds = ep(&[], &[(1, 2)]);
        let all = EPSet::union(&[evens.clone(), odds]).unwrap();
        assert_eq!(all.progressions, vec![(0, 1)]);
        assert!(all.sporadic.is_empty());

        let ones_mod_three = ep(&[], &[(1, 3)]);
        let u = EPSet::union(&[evens.clone(), ones_mod_three]).unwrap();
        for n in 0..=60 {
            assert_eq!(u.contains(n), n % 2 == 0 || n % 3 == 1, "n={n}");
        }

        let s = ep(&[3], &[(5, 4)]);
        assert_eq!(EPSet::union(&[s.clone(), EPSet::empty()]).unwrap(), s);
    }

    #[test]
    fn sumset_examples() {
        let evens = ep(&[], &[(0, 2)]);
        assert_eq!(
            EPSet::sumset(&[evens.clone(), evens.clone()]).unwrap(),
            evens
        );
        let one = ep(&[1], &[]);
        let odds = ep(&[], &[(1, 2)]);
        assert_eq!(EPSet::sumset(&[one, evens.clone()]).unwrap(), odds);
        assert!(matches!(
            EPSet::sumset(&[evens, EPSet::empty()]),
            Err(EpsetError::EmptyOperand)
        ));
    }

    #[test]
    fn sumset_matches_brute_force() {
        let a = ep(&[], &[(3, 2)]);
        let b = ep(&[], &[(4, 3)]);
        let s = EPSet::sumset(&[a.clone(), b.clone()]).unwrap();
        let ea = a.expand(60);
        let eb = b.expand(60);
        for n in 0..=60u64 {
            let brute = ea.iter().any(|&x| eb.iter().any(|&y| x + y == n));
            assert_eq!(s.contains(n), brute, "n={n}");
        }
    }

    #[test]
    fn ops_match_expansion_to_100() {
        let suite = [
            ep(&[], &[(0, 2)]),
            ep(&[], &[(1, 2)]),
            ep(&[0], &[(3, 2)]),
            ep(&[1, 2], &[(10, 3)]),
            ep(&[7], &[(5, 5), (9, 6)]),
            ep(&[], &[(2, 7)]),
            ep(&[4], &[]),
        ];
        for a in &suite {
            for b in &suite {
                let u = EPSet::union(&[a.clone(), b.clone()]).unwrap();
                for n in 0..=100 {
                    assert_eq!(u.contains(n), a.contains(n) || b.contains(n));
                }
                if !a.is_empty_set() && !b.is_empty_set() {
                    let s = EPSet::sumset(&[a.clone(), b.clone()]).unwrap();
                    let ea = a.expand(100);
                    let eb = b.expand(100);
                    for n in 0..=100u64 {
                        let brute = ea.iter().any(|&x| x <= n && eb.contains(&(n - x)));
                        assert_eq!(s.contains(n), brute, "n={n} a={a:?} b={b:?}");
                    }
                }
            }
        }
    }
}
