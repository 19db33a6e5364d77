//! Finite MSO theories of PF-graphs.
//!
//! The depth-0 theory of a structure with set parameters is its atomic type;
//! the depth-(d+1) theory is the set of depth-d theories over one more
//! parameter ranging over all vertex subsets. The Boolean associate is never
//! materialized: quantification over its elements is quantification over
//! subsets, and atomic facts go through [`atomic::AtomicType`].
//!
//! Theory values are hash-consed in an [`Interner`]; equal identifiers mean
//! equal theories, and every payload carries a digest that is stable across
//! runs and processes.

pub mod atomic;
pub mod bound;
pub mod ef;
pub mod epsilon;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::{Arc, RwLock};

use dashmap::DashMap;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::canon::{canonical_key_operand, CanonKey};
use crate::graph::{Dotted, Graph, Operand, Palette};
use crate::par;

use atomic::{atomic_type, AtomicType, FULL};

#[derive(Debug, Error)]
pub enum TheoryError {
    #[error("{n} vertices exceed the per-level subset ceiling of 2^{bits}")]
    ResourceLimit { n: u32, bits: u32 },
    #[error("graph palette {got:?} does not match session palette {want:?}")]
    PaletteMismatch { got: Palette, want: Palette },
}

/// Per-quantifier-level resource ceiling: a level quantifies over `2^n`
/// subsets and is refused when `n` exceeds [`Limits::max_subset_bits`].
#[derive(Clone, Copy, Debug)]
pub struct Limits {
    pub max_subset_bits: u32,
}

impl Default for Limits {
    fn default() -> Limits {
        Limits {
            max_subset_bits: 16,
        }
    }
}

/// Interned identifier of a theory value.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TheoryId(u32);

impl fmt::Debug for TheoryId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "t{}", self.0)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Payload {
    Atomic(AtomicType),
    Set(BTreeSet<TheoryId>),
}

#[derive(Debug)]
pub struct TheoryData {
    pub payload: Payload,
    pub depth: u8,
    pub arity: u8,
    pub dotted: bool,
    pub digest: [u8; 32],
}

impl TheoryData {
    pub fn digest_hex(&self) -> String {
        self.digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn members(&self) -> Option<&BTreeSet<TheoryId>> {
        match &self.payload {
            Payload::Set(s) => Some(s),
            Payload::Atomic(_) => None,
        }
    }

    pub fn atomic(&self) -> Option<&AtomicType> {
        match &self.payload {
            Payload::Atomic(a) => Some(a),
            Payload::Set(_) => None,
        }
    }
}

/// Append-only hash-consing table. Insertion is concurrent and idempotent:
/// the same payload receives the same identifier regardless of schedule.
pub struct Interner {
    salt: Vec<u8>,
    map: DashMap<Payload, TheoryId>,
    data: RwLock<Vec<Arc<TheoryData>>>,
}

impl Interner {
    pub fn new(palette: &Palette) -> Interner {
        let mut salt = Vec::new();
        for name in palette.names() {
            salt.extend_from_slice(name.as_bytes());
            salt.push(0);
        }
        Interner {
            salt,
            map: DashMap::new(),
            data: RwLock::new(Vec::new()),
        }
    }

    pub fn len(&self) -> usize {
        self.data.read().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, id: TheoryId) -> Arc<TheoryData> {
        self.data.read().unwrap()[id.0 as usize].clone()
    }

    pub fn intern_atomic(&self, at: AtomicType) -> TheoryId {
        let payload = Payload::Atomic(at);
        if let Some(id) = self.map.get(&payload) {
            return *id;
        }
        let (arity, dotted, digest) = match &payload {
            Payload::Atomic(at) => {
                let mut bytes = self.salt.clone();
                bytes.extend_from_slice(b"atom");
                at.encode(&mut bytes);
                (at.arity, at.dotted, Sha256::digest(&bytes).into())
            }
            Payload::Set(_) => unreachable!(),
        };
        self.insert(payload, 0, arity, dotted, digest)
    }

    /// Interns the set of one-more-parameter theories. Members must share
    /// depth, arity and dottedness; the set is nonempty by construction.
    pub fn intern_set(&self, members: BTreeSet<TheoryId>) -> TheoryId {
        debug_assert!(!members.is_empty());
        let payload = Payload::Set(members);
        if let Some(id) = self.map.get(&payload) {
            return *id;
        }
        let (depth, arity, dotted, digest) = match &payload {
            Payload::Set(members) => {
                let first = self.get(*members.iter().next().unwrap());
                debug_assert!(members.iter().all(|&m| {
                    let d = self.get(m);
                    d.depth == first.depth && d.arity == first.arity && d.dotted == first.dotted
                }));
                let mut digests: Vec<[u8; 32]> =
                    members.iter().map(|&m| self.get(m).digest).collect();
                digests.sort_unstable();
                let mut bytes = self.salt.clone();
                bytes.extend_from_slice(b"set");
                for d in digests {
                    bytes.extend_from_slice(&d);
                }
                (
                    first.depth + 1,
                    first.arity.saturating_sub(1),
                    first.dotted,
                    Sha256::digest(&bytes).into(),
                )
            }
            Payload::Atomic(_) => unreachable!(),
        };
        self.insert(payload, depth, arity, dotted, digest)
    }

    fn insert(
        &self,
        payload: Payload,
        depth: u8,
        arity: u8,
        dotted: bool,
        digest: [u8; 32],
    ) -> TheoryId {
        *self.map.entry(payload.clone()).or_insert_with(|| {
            let mut data = self.data.write().unwrap();
            let id = TheoryId(data.len() as u32);
            data.push(Arc::new(TheoryData {
                payload,
                depth,
                arity,
                dotted,
                digest,
            }));
            id
        })
    }

    /// Finds an interned theory by digest prefix (hex), for table lookups.
    pub fn find_by_digest(&self, hex: &str) -> Option<TheoryId> {
        let data = self.data.read().unwrap();
        data.iter()
            .position(|d| d.digest_hex().starts_with(hex))
            .map(|i| TheoryId(i as u32))
    }
}

/// Session context: fixed palette, intern table, memo caches and ceilings.
pub struct TheoryCtx {
    pub palette: Palette,
    pub interner: Interner,
    pub limits: Limits,
    memo: DashMap<(CanonKey, u8), TheoryId>,
    pub(crate) op_memo: DashMap<(crate::graph::ComposeKind, TheoryId, TheoryId), TheoryId>,
}

impl TheoryCtx {
    pub fn new(palette: Palette) -> TheoryCtx {
        TheoryCtx::with_limits(palette, Limits::default())
    }

    pub fn with_limits(palette: Palette, limits: Limits) -> TheoryCtx {
        let interner = Interner::new(&palette);
        TheoryCtx {
            palette,
            interner,
            limits,
            memo: DashMap::new(),
            op_memo: DashMap::new(),
        }
    }

    fn check_palette(&self, g: &Graph) -> Result<(), TheoryError> {
        if *g.palette() != self.palette {
            return Err(TheoryError::PaletteMismatch {
                got: g.palette().clone(),
                want: self.palette.clone(),
            });
        }
        Ok(())
    }
}

/// Depth-`d` theory of an undotted graph.
pub fn theory(ctx: &TheoryCtx, g: &Graph, d: u8) -> Result<TheoryId, TheoryError> {
    theory_operand(ctx, &Operand::Plain(g.clone()), d)
}

/// Depth-`d` theory of a dotted graph.
pub fn theory_dotted(ctx: &TheoryCtx, dg: &Dotted, d: u8) -> Result<TheoryId, TheoryError> {
    theory_operand(ctx, &Operand::Dotted(dg.clone()), d)
}

/// Depth-`d` theory of either kind of structure, memoized by canonical key.
pub fn theory_operand(ctx: &TheoryCtx, op: &Operand, d: u8) -> Result<TheoryId, TheoryError> {
    ctx.check_palette(op.graph())?;
    let key = (canonical_key_operand(op), d);
    if let Some(hit) = ctx.memo.get(&key) {
        return Ok(*hit);
    }
    let id = th_rec(ctx, op.graph(), op.dot(), &mut Vec::new(), d)?;
    ctx.memo.insert(key, id);
    Ok(id)
}

fn th_rec(
    ctx: &TheoryCtx,
    g: &Graph,
    dot: Option<u32>,
    sets: &mut Vec<u64>,
    d: u8,
) -> Result<TheoryId, TheoryError> {
    if d == 0 {
        return Ok(ctx.interner.intern_atomic(atomic_type(g, dot, sets, FULL)));
    }
    let n = g.vertex_count();
    if n > ctx.limits.max_subset_bits {
        return Err(TheoryError::ResourceLimit {
            n,
            bits: ctx.limits.max_subset_bits,
        });
    }
    let count = 1u64 << n;
    let members: BTreeSet<TheoryId> = if sets.is_empty() && d >= 1 && n >= 4 {
        // Fan the top quantifier level out; lower levels stay sequential.
        par::try_range_map(count, |a| {
            let mut inner = vec![a];
            th_rec(ctx, g, dot, &mut inner, d - 1)
        })?
        .into_iter()
        .collect()
    } else {
        let mut acc = BTreeSet::new();
        for a in 0..count {
            sets.push(a);
            let id = th_rec(ctx, g, dot, sets, d - 1)?;
            sets.pop();
            acc.insert(id);
        }
        acc
    };
    Ok(ctx.interner.intern_set(members))
}

/// Realized theories of a family of structures, grouped by (depth, arity).
/// Level `(c, j)` holds every theory `th^c(X, A_1..A_j)` with `c + j = d`
/// reached while computing depth-`d` theories of the family. Feeds the
/// negative conjuncts of the Hintikka formulas.
pub fn collect_realized(
    ctx: &TheoryCtx,
    family: &[Operand],
    d: u8,
) -> Result<BTreeMap<(u8, u8), BTreeSet<TheoryId>>, TheoryError> {
    let mut out = BTreeMap::new();
    for op in family {
        ctx.check_palette(op.graph())?;
        collect_rec(ctx, op.graph(), op.dot(), &mut Vec::new(), d, &mut out)?;
    }
    Ok(out)
}

fn collect_rec(
    ctx: &TheoryCtx,
    g: &Graph,
    dot: Option<u32>,
    sets: &mut Vec<u64>,
    d: u8,
    out: &mut BTreeMap<(u8, u8), BTreeSet<TheoryId>>,
) -> Result<TheoryId, TheoryError> {
    let id = if d == 0 {
        ctx.interner.intern_atomic(atomic_type(g, dot, sets, FULL))
    } else {
        let n = g.vertex_count();
        if n > ctx.limits.max_subset_bits {
            return Err(TheoryError::ResourceLimit {
                n,
                bits: ctx.limits.max_subset_bits,
            });
        }
        let mut acc = BTreeSet::new();
        for a in 0..1u64 << n {
            sets.push(a);
            acc.insert(collect_rec(ctx, g, dot, sets, d - 1, out)?);
            sets.pop();
        }
        ctx.interner.intern_set(acc)
    };
    out.entry((d, sets.len() as u8)).or_default().insert(id);
    Ok(id)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Graph, Palette};

    fn ctx() -> TheoryCtx {
        TheoryCtx::new(Palette::empty())
    }

    #[test]
    fn depth0_distinguishes_orphan_from_loop() {
        let ctx = ctx();
        let a = theory(&ctx, &Graph::singleton(&ctx.palette, false), 0).unwrap();
        let b = theory(&ctx, &Graph::singleton(&ctx.palette, true), 0).unwrap();
        assert_ne!(a, b);
    }

    #[test]
    fn c2_and_c3_agree_at_depth0() {
        // Both are orphanless with a many-element universe cell and no
        // singleton facts.
        let ctx = ctx();
        let a = theory(&ctx, &Graph::cycle(&ctx.palette, 2), 0).unwrap();
        let b = theory(&ctx, &Graph::cycle(&ctx.palette, 3), 0).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn c2_and_c3_differ_at_depth1() {
        let ctx = ctx();
        let a = theory(&ctx, &Graph::cycle(&ctx.palette, 2), 1).unwrap();
        let b = theory(&ctx, &Graph::cycle(&ctx.palette, 3), 1).unwrap();
        assert_ne!(a, b);
    }

    #[test]
    fn function_graphs_record_orphan_empty_everywhere() {
        let ctx = ctx();
        for g in crate::enumerate::enumerate_class(
            crate::enumerate::EnumClass::FunctionGraph,
            3,
            &ctx.palette,
        ) {
            let id = theory(&ctx, &g, 1).unwrap();
            assert!(all_atomics_orphan_empty(&ctx, id));
        }
    }

    fn all_atomics_orphan_empty(ctx: &TheoryCtx, id: TheoryId) -> bool {
        let data = ctx.interner.get(id);
        match &data.payload {
            Payload::Atomic(at) => at.orphan_empty,
            Payload::Set(members) => members
                .iter()
                .all(|&m| all_atomics_orphan_empty(ctx, m)),
        }
    }

    #[test]
    fn isomorphism_invariance() {
        use rand::rngs::StdRng;
        use rand::seq::SliceRandom;
        use rand::{Rng, SeedableRng};
        let ctx = ctx();
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..40 {
            let n = rng.gen_range(1..=5u32);
            let parent = (0..n)
                .map(|_| {
                    if rng.gen_bool(0.7) {
                        Some(rng.gen_range(0..n))
                    } else {
                        None
                    }
                })
                .collect();
            let g = Graph::new(n, parent, ctx.palette.clone(), vec![]).unwrap();
            let mut perm: Vec<u32> = (0..n).collect();
            perm.shuffle(&mut rng);
            let h = g.relabel(&perm);
            assert_eq!(theory(&ctx, &g, 1).unwrap(), theory(&ctx, &h, 1).unwrap());
        }
    }

    #[test]
    fn resource_limit_fires() {
        let limits = Limits { max_subset_bits: 3 };
        let ctx = TheoryCtx::with_limits(Palette::empty(), limits);
        let g = Graph::cycle(&ctx.palette, 5);
        assert!(matches!(
            theory(&ctx, &g, 1),
            Err(TheoryError::ResourceLimit { .. })
        ));
        assert!(theory(&ctx, &g, 0).is_ok());
    }

    #[test]
    fn monotone_refinement_on_small_graphs() {
        let ctx = ctx();
        let graphs =
            crate::enumerate::enumerate_class(crate::enumerate::EnumClass::All, 3, &ctx.palette);
        for a in &graphs {
            for b in &graphs {
                let d2_eq = theory(&ctx, a, 2).unwrap() == theory(&ctx, b, 2).unwrap();
                let d1_eq = theory(&ctx, a, 1).unwrap() == theory(&ctx, b, 1).unwrap();
                let d0_eq = theory(&ctx, a, 0).unwrap() == theory(&ctx, b, 0).unwrap();
                if d2_eq {
                    assert!(d1_eq);
                }
                if d1_eq {
                    assert!(d0_eq);
                }
            }
        }
    }

    #[test]
    fn digests_are_stable_across_interners() {
        let c1 = ctx();
        let c2 = ctx();
        let g = Graph::cycle(&c1.palette, 3);
        let id1 = theory(&c1, &g, 1).unwrap();
        let id2 = theory(&c2, &g, 1).unwrap();
        assert_eq!(
            c1.interner.get(id1).digest_hex(),
            c2.interner.get(id2).digest_hex()
        );
    }
}
