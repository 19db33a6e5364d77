//! Fixpoint enumeration of every theory realizable by a class-K structure
//! (function graphs, forests, dotted forests, dotted singleton function
//! graphs), with minimal witnesses.
//!
//! Seeds are the singleton K structures over the session palette; the
//! generation rules are exactly the compositions the structural
//! decomposition needs, so the closure covers all of K. Witness sizes are
//! upper bounds from the growth; an exhaustive enumeration sweep up to a
//! configured size turns them into confirmed minima or flags them.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::canon::canonical_key_operand;
use crate::enumerate::{enumerate_class, enumerate_dotted, EnumClass};
use crate::graph::{
    classify, classify_dotted, compose, ComposeKind, Dotted, Graph, Operand, Palette,
    StructureClass, MAX_VERTICES,
};
use crate::par;
use crate::theory::{theory_operand, TheoryCtx, TheoryId};

use super::{theory_op, AlgebraError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum KClass {
    FunctionGraph,
    Forest,
    DottedForest,
    DottedSingletonFn,
}

#[derive(Clone, Debug)]
pub struct Entry {
    pub witness: Operand,
    pub size: u32,
    pub class: KClass,
    /// The witness is minimal among all structures up to the sweep bound.
    pub min_confirmed: bool,
    /// Some witness of this theory is a tree (dotted tree for dotted ids).
    pub tree_witness: bool,
    /// The stored witness was re-verified by the subset-loop theory engine.
    pub verified: bool,
    /// Reached by the enumeration sweep but not by the closure growth;
    /// always empty in a correct build, kept observable rather than fatal.
    pub sweep_only: bool,
}

#[derive(Clone, Copy, Debug)]
pub struct ClosureOptions {
    /// Exhaustive-enumeration bound for undotted minima.
    pub sweep_bound: u32,
    /// Same for dotted structures.
    pub dotted_sweep_bound: u32,
    /// Verify stored witnesses of at most this size via the theory engine.
    pub verify_max: u32,
    /// Fill the whole operation table instead of leaving it lazy.
    pub eager_ops: bool,
    /// Witnesses larger than this are not constructed during growth.
    pub witness_cap: u32,
}

impl ClosureOptions {
    pub fn for_depth(d: u8) -> ClosureOptions {
        ClosureOptions {
            sweep_bound: 6,
            dotted_sweep_bound: 4,
            verify_max: if d <= 1 { u32::MAX } else { 9 },
            eager_ops: false,
            witness_cap: MAX_VERTICES,
        }
    }
}

/// The generation rules: composition kind, operand classes, result class.
/// These are the compositions the decomposition of K structures uses.
pub const RULES: [(ComposeKind, KClass, KClass, KClass); 8] = [
    (ComposeKind::Sum, KClass::Forest, KClass::Forest, KClass::Forest),
    (
        ComposeKind::Sum,
        KClass::FunctionGraph,
        KClass::FunctionGraph,
        KClass::FunctionGraph,
    ),
    (
        ComposeKind::DotInto,
        KClass::Forest,
        KClass::DottedForest,
        KClass::Forest,
    ),
    (
        ComposeKind::DotInto,
        KClass::Forest,
        KClass::DottedSingletonFn,
        KClass::FunctionGraph,
    ),
    (
        ComposeKind::DottedDot,
        KClass::DottedForest,
        KClass::DottedForest,
        KClass::DottedForest,
    ),
    (
        ComposeKind::Circular,
        KClass::DottedForest,
        KClass::DottedForest,
        KClass::FunctionGraph,
    ),
    (
        ComposeKind::SumRightDot,
        KClass::Forest,
        KClass::DottedForest,
        KClass::DottedForest,
    ),
    (
        ComposeKind::DotPlusUndotted,
        KClass::DottedForest,
        KClass::Forest,
        KClass::DottedForest,
    ),
];

#[derive(Debug)]
pub struct ClosureTable {
    pub d: u8,
    pub palette: Palette,
    pub sweep_bound: u32,
    pub dotted_sweep_bound: u32,
    pub entries: BTreeMap<TheoryId, Entry>,
    /// Filled when built with `eager_ops`.
    pub ops: BTreeMap<(ComposeKind, TheoryId, TheoryId), TheoryId>,
}

impl ClosureTable {
    pub fn ids_of_class(&self, class: KClass) -> Vec<TheoryId> {
        self.entries
            .iter()
            .filter(|(_, e)| e.class == class)
            .map(|(&t, _)| t)
            .collect()
    }

    pub fn class_count(&self, class: KClass) -> usize {
        self.entries.values().filter(|e| e.class == class).count()
    }

    /// Theories witnessed by a tree (undotted) or a dotted tree (dotted).
    pub fn tree_theory_count(&self, dotted: bool) -> usize {
        self.entries
            .values()
            .filter(|e| e.tree_witness && (e.witness.dot().is_some() == dotted))
            .count()
    }

    pub fn get(&self, t: TheoryId) -> Result<&Entry, AlgebraError> {
        self.entries.get(&t).ok_or(AlgebraError::UnknownTheory(t))
    }

    /// Minimal witness and its cardinality.
    pub fn min_witness(&self, t: TheoryId) -> Result<(&Operand, u32), AlgebraError> {
        let e = self.get(t)?;
        Ok((&e.witness, e.size))
    }

    /// Largest stored witness: the empirical size bound for realizing any
    /// covered theory.
    pub fn max_witness_size(&self) -> u32 {
        self.entries.values().map(|e| e.size).max().unwrap_or(0)
    }

    /// Least common multiple of all minimal witness sizes over the table.
    /// Includes the forest classes: pumping a sibling forest divides by a
    /// forest witness size, which the lcm must therefore cover.
    pub fn period(&self) -> u64 {
        self.entries
            .values()
            .fold(1u64, |acc, e| num_integer::lcm(acc, e.size as u64))
    }

    /// Does the witness of `t` satisfy the sentence? By the simulation
    /// property of theories this is independent of the witness choice for
    /// sentences of depth at most the table depth.
    pub fn decide_sentence(
        &self,
        t: TheoryId,
        sentence: &crate::mso::Formula,
    ) -> Result<bool, AlgebraError> {
        let e = self.get(t)?;
        if sentence.depth() > self.d as u32 {
            return Err(AlgebraError::BadTable(format!(
                "sentence depth {} exceeds table depth {}",
                sentence.depth(),
                self.d
            )));
        }
        let g = match &e.witness {
            Operand::Plain(g) => g,
            Operand::Dotted(d) => &d.graph,
        };
        crate::mso::eval(sentence, g)
            .map_err(|err| AlgebraError::BadTable(format!("witness evaluation failed: {err}")))
    }
}

fn k_class(op: &Operand) -> Option<KClass> {
    match op {
        Operand::Plain(g) => match classify(g).class {
            StructureClass::FunctionGraph => Some(KClass::FunctionGraph),
            StructureClass::Forest | StructureClass::Tree => Some(KClass::Forest),
            _ => None,
        },
        Operand::Dotted(d) => match classify_dotted(d) {
            StructureClass::DottedForest => Some(KClass::DottedForest),
            StructureClass::DottedSingletonFunctionGraph => Some(KClass::DottedSingletonFn),
            _ => None,
        },
    }
}

fn is_tree_shaped(op: &Operand) -> bool {
    let g = op.graph();
    g.is_acyclic() && g.orphans().count_ones() == 1
}

/// Singleton K structures over the palette: orphan and self-loop vertices in
/// every coloring, dotted and not.
pub fn seeds(palette: &Palette) -> Vec<Operand> {
    let mut out = Vec::new();
    for mask in 0..1u32 << palette.len() {
        let orphan = Graph::singleton_colored(palette, false, mask);
        let looped = Graph::singleton_colored(palette, true, mask);
        out.push(Operand::Plain(orphan.clone()));
        out.push(Operand::Plain(looped.clone()));
        out.push(Operand::Dotted(Dotted::new(orphan, 0).unwrap()));
        out.push(Operand::Dotted(Dotted::new(looped, 0).unwrap()));
    }
    out
}

struct Candidate {
    theory: TheoryId,
    witness: Operand,
    size: u32,
    class: KClass,
}

fn absorb(entries: &mut BTreeMap<TheoryId, Entry>, frontier: &mut Vec<TheoryId>, cand: Candidate) {
    let tree = is_tree_shaped(&cand.witness);
    match entries.get_mut(&cand.theory) {
        None => {
            entries.insert(
                cand.theory,
                Entry {
                    witness: cand.witness,
                    size: cand.size,
                    class: cand.class,
                    min_confirmed: false,
                    tree_witness: tree,
                    verified: false,
                    sweep_only: false,
                },
            );
            frontier.push(cand.theory);
        }
        Some(e) => {
            e.tree_witness |= tree;
            let new_key = (cand.size, canonical_key_operand(&cand.witness));
            let old_key = (e.size, canonical_key_operand(&e.witness));
            if new_key < old_key {
                e.witness = cand.witness;
                e.size = cand.size;
            }
        }
    }
}

/// Builds the depth-`d` closure table.
pub fn closure(
    ctx: &TheoryCtx,
    d: u8,
    opts: ClosureOptions,
) -> Result<ClosureTable, AlgebraError> {
    let mut entries: BTreeMap<TheoryId, Entry> = BTreeMap::new();
    let mut frontier: Vec<TheoryId> = Vec::new();

    for seed in seeds(&ctx.palette) {
        let class = k_class(&seed).expect("seeds are K structures");
        let theory = theory_operand(ctx, &seed, d)?;
        absorb(
            &mut entries,
            &mut frontier,
            Candidate {
                theory,
                witness: seed,
                size: 1,
                class,
            },
        );
    }

    while !frontier.is_empty() {
        let fresh: BTreeSet<TheoryId> = frontier.drain(..).collect();
        // Pairs involving at least one fresh id, per rule.
        let mut pairs: BTreeSet<(usize, TheoryId, TheoryId)> = BTreeSet::new();
        for (ri, &(_, cl, cr, _)) in RULES.iter().enumerate() {
            let lefts = ids_of(&entries, cl);
            let rights = ids_of(&entries, cr);
            for &a in &lefts {
                for &b in &rights {
                    if fresh.contains(&a) || fresh.contains(&b) {
                        pairs.insert((ri, a, b));
                    }
                }
            }
        }
        let pair_list: Vec<(usize, TheoryId, TheoryId)> = pairs.into_iter().collect();
        let computed: Vec<Option<Candidate>> = par::try_map_slice(&pair_list, |&(ri, a, b)| {
            let (kind, _, _, out_class) = RULES[ri];
            let ea = &entries[&a];
            let eb = &entries[&b];
            if ea.size + eb.size > opts.witness_cap {
                return Ok::<_, AlgebraError>(None);
            }
            let t = theory_op(ctx, kind, a, b)?;
            let witness = compose(kind, &ea.witness, &eb.witness)?;
            Ok(Some(Candidate {
                theory: t,
                witness,
                size: ea.size + eb.size,
                class: out_class,
            }))
        })?;
        let mut batch: Vec<Candidate> = computed.into_iter().flatten().collect();
        batch.sort_by(|a, b| {
            (a.size, canonical_key_operand(&a.witness))
                .cmp(&(b.size, canonical_key_operand(&b.witness)))
        });
        for cand in batch {
            absorb(&mut entries, &mut frontier, cand);
        }
    }

    // Exhaustive sweep: exact minima up to the bound, plus an observable
    // completeness check.
    let mut sweep: Vec<(Operand, KClass)> = Vec::new();
    for n in 1..=opts.sweep_bound {
        for g in enumerate_class(EnumClass::FunctionGraph, n, &ctx.palette) {
            sweep.push((Operand::Plain(g), KClass::FunctionGraph));
        }
        for g in enumerate_class(EnumClass::Forest, n, &ctx.palette) {
            sweep.push((Operand::Plain(g), KClass::Forest));
        }
    }
    for n in 1..=opts.dotted_sweep_bound {
        for dg in enumerate_dotted(EnumClass::Forest, n, &ctx.palette) {
            sweep.push((Operand::Dotted(dg), KClass::DottedForest));
        }
    }
    let swept: Vec<(TheoryId, Operand, KClass)> = par::try_map_slice(&sweep, |(op, class)| {
        Ok::<_, AlgebraError>((theory_operand(ctx, op, d)?, op.clone(), *class))
    })?;
    for (t, op, class) in swept {
        let size = op.graph().vertex_count();
        let tree = is_tree_shaped(&op);
        match entries.get_mut(&t) {
            Some(e) => {
                e.tree_witness |= tree;
                let new_key = (size, canonical_key_operand(&op));
                let old_key = (e.size, canonical_key_operand(&e.witness));
                if new_key < old_key {
                    e.witness = op;
                    e.size = size;
                }
            }
            None => {
                entries.insert(
                    t,
                    Entry {
                        witness: op,
                        size,
                        class,
                        min_confirmed: false,
                        tree_witness: tree,
                        verified: false,
                        sweep_only: true,
                    },
                );
            }
        }
    }

    for e in entries.values_mut() {
        let bound = if e.witness.dot().is_some() {
            opts.dotted_sweep_bound
        } else {
            opts.sweep_bound
        };
        e.min_confirmed = e.size <= bound;
    }

    // Re-verify stored witnesses through the subset-loop engine.
    let verify: Vec<(TheoryId, bool)> = {
        let items: Vec<(TheoryId, Operand, u32)> = entries
            .iter()
            .filter(|(_, e)| e.size <= opts.verify_max)
            .map(|(&t, e)| (t, e.witness.clone(), e.size))
            .collect();
        par::try_map_slice(&items, |(t, w, _)| {
            Ok::<_, AlgebraError>((*t, theory_operand(ctx, w, d)? == *t))
        })?
    };
    for (t, ok) in verify {
        if !ok {
            let size = entries[&t].size;
            return Err(AlgebraError::WitnessMismatch { size });
        }
        entries.get_mut(&t).unwrap().verified = true;
    }

    let mut table = ClosureTable {
        d,
        palette: ctx.palette.clone(),
        sweep_bound: opts.sweep_bound,
        dotted_sweep_bound: opts.dotted_sweep_bound,
        entries,
        ops: BTreeMap::new(),
    };

    if opts.eager_ops {
        let mut ops = BTreeMap::new();
        for &(kind, cl, cr, _) in &RULES {
            for a in table.ids_of_class(cl) {
                for b in table.ids_of_class(cr) {
                    let t = theory_op(ctx, kind, a, b)?;
                    ops.insert((kind, a, b), t);
                }
            }
        }
        table.ops = ops;
    }
    Ok(table)
}

fn ids_of(entries: &BTreeMap<TheoryId, Entry>, class: KClass) -> Vec<TheoryId> {
    entries
        .iter()
        .filter(|(_, e)| e.class == class)
        .map(|(&t, _)| t)
        .collect()
}

// ---- Serialization ----

#[derive(Serialize, Deserialize)]
struct PayloadFile {
    digest: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    atomic: Option<crate::theory::atomic::AtomicType>,
    #[serde(skip_serializing_if = "Option::is_none")]
    members: Option<Vec<String>>,
}

#[derive(Serialize, Deserialize)]
struct EntryFile {
    digest: String,
    class: KClass,
    size: u32,
    witness: serde_json::Value,
    min_confirmed: bool,
    tree_witness: bool,
    verified: bool,
    sweep_only: bool,
}

#[derive(Serialize, Deserialize)]
struct TableFile {
    version: u32,
    d: u8,
    palette: Vec<String>,
    sweep_bound: u32,
    dotted_sweep_bound: u32,
    payloads: Vec<PayloadFile>,
    entries: Vec<EntryFile>,
    ops: Vec<(ComposeKind, String, String, String)>,
}

const TABLE_VERSION: u32 = 1;

fn dump_payload_dag(
    ctx: &TheoryCtx,
    t: TheoryId,
    seen: &mut BTreeSet<String>,
    out: &mut Vec<PayloadFile>,
) {
    let data = ctx.interner.get(t);
    let digest = data.digest_hex();
    if seen.contains(&digest) {
        return;
    }
    match &data.payload {
        crate::theory::Payload::Atomic(at) => {
            seen.insert(digest.clone());
            out.push(PayloadFile {
                digest,
                atomic: Some(at.clone()),
                members: None,
            });
        }
        crate::theory::Payload::Set(members) => {
            let mut hexes = Vec::new();
            for &m in members {
                dump_payload_dag(ctx, m, seen, out);
                hexes.push(ctx.interner.get(m).digest_hex());
            }
            hexes.sort();
            seen.insert(digest.clone());
            out.push(PayloadFile {
                digest,
                atomic: None,
                members: Some(hexes),
            });
        }
    }
}

impl ClosureTable {
    /// Deterministic JSON dump: two runs over the same inputs serialize
    /// byte-identically.
    pub fn to_json(&self, ctx: &TheoryCtx) -> String {
        let mut seen = BTreeSet::new();
        let mut payloads = Vec::new();
        let mut order: Vec<(String, TheoryId)> = self
            .entries
            .keys()
            .map(|&t| (ctx.interner.get(t).digest_hex(), t))
            .collect();
        order.sort();
        for (_, t) in &order {
            dump_payload_dag(ctx, *t, &mut seen, &mut payloads);
        }
        let entries: Vec<EntryFile> = order
            .iter()
            .map(|(digest, t)| {
                let e = &self.entries[t];
                EntryFile {
                    digest: digest.clone(),
                    class: e.class,
                    size: e.size,
                    witness: serde_json::from_str(&crate::graph::to_json(&e.witness))
                        .expect("graph json"),
                    min_confirmed: e.min_confirmed,
                    tree_witness: e.tree_witness,
                    verified: e.verified,
                    sweep_only: e.sweep_only,
                }
            })
            .collect();
        let mut ops: Vec<(ComposeKind, String, String, String)> = self
            .ops
            .iter()
            .map(|(&(kind, a, b), &r)| {
                (
                    kind,
                    ctx.interner.get(a).digest_hex(),
                    ctx.interner.get(b).digest_hex(),
                    ctx.interner.get(r).digest_hex(),
                )
            })
            .collect();
        ops.sort();
        serde_json::to_string_pretty(&TableFile {
            version: TABLE_VERSION,
            d: self.d,
            palette: self.palette.names().to_vec(),
            sweep_bound: self.sweep_bound,
            dotted_sweep_bound: self.dotted_sweep_bound,
            payloads,
            entries,
            ops,
        })
        .expect("table serialization")
    }

    /// Rebuilds a table in `ctx` from a dump, re-interning the payload DAG.
    pub fn from_json(ctx: &TheoryCtx, text: &str) -> Result<ClosureTable, AlgebraError> {
        let file: TableFile =
            serde_json::from_str(text).map_err(|e| AlgebraError::BadTable(e.to_string()))?;
        if file.version != TABLE_VERSION {
            return Err(AlgebraError::BadTable(format!(
                "version {} unsupported",
                file.version
            )));
        }
        if file.palette != ctx.palette.names() {
            return Err(AlgebraError::BadTable("palette mismatch".into()));
        }
        let mut by_digest: BTreeMap<String, TheoryId> = BTreeMap::new();
        for p in &file.payloads {
            let id = match (&p.atomic, &p.members) {
                (Some(at), None) => ctx.interner.intern_atomic(at.clone()),
                (None, Some(members)) => {
                    let mut set = BTreeSet::new();
                    for hex in members {
                        let m = by_digest.get(hex).ok_or_else(|| {
                            AlgebraError::BadTable(format!("member {hex} precedes definition"))
                        })?;
                        set.insert(*m);
                    }
                    ctx.interner.intern_set(set)
                }
                _ => return Err(AlgebraError::BadTable("payload needs atomic xor members".into())),
            };
            let got = ctx.interner.get(id).digest_hex();
            if got != p.digest {
                return Err(AlgebraError::BadTable(format!(
                    "digest mismatch: file {} rebuilt {}",
                    p.digest, got
                )));
            }
            by_digest.insert(p.digest.clone(), id);
        }
        let lookup = |hex: &str| {
            by_digest
                .get(hex)
                .copied()
                .ok_or_else(|| AlgebraError::BadTable(format!("unknown digest {hex}")))
        };
        let mut entries = BTreeMap::new();
        for ef in &file.entries {
            let t = lookup(&ef.digest)?;
            let witness = crate::graph::from_json(&ef.witness.to_string())
                .map_err(|e| AlgebraError::BadTable(e.to_string()))?;
            entries.insert(
                t,
                Entry {
                    witness,
                    size: ef.size,
                    class: ef.class,
                    min_confirmed: ef.min_confirmed,
                    tree_witness: ef.tree_witness,
                    verified: ef.verified,
                    sweep_only: ef.sweep_only,
                },
            );
        }
        let mut ops = BTreeMap::new();
        for (kind, a, b, r) in &file.ops {
            ops.insert((*kind, lookup(a)?, lookup(b)?), lookup(r)?);
        }
        Ok(ClosureTable {
            d: file.d,
            palette: ctx.palette.clone(),
            sweep_bound: file.sweep_bound,
            dotted_sweep_bound: file.dotted_sweep_bound,
            entries,
            ops,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theory::theory;

    #[test]
    fn depth0_closure_covers_enumerated_function_graphs() {
        let ctx = TheoryCtx::new(Palette::empty());
        let table = closure(&ctx, 0, ClosureOptions::for_depth(0)).unwrap();
        assert!(table.entries.values().all(|e| !e.sweep_only));
        for n in 1..=6 {
            for g in enumerate_class(EnumClass::FunctionGraph, n, &ctx.palette) {
                let t = theory(&ctx, &g, 0).unwrap();
                let e = table.get(t).unwrap();
                assert_eq!(e.class, KClass::FunctionGraph);
            }
        }
    }

    #[test]
    fn witnesses_realize_their_ids() {
        let ctx = TheoryCtx::new(Palette::empty());
        let table = closure(&ctx, 1, ClosureOptions::for_depth(1)).unwrap();
        for (&t, e) in &table.entries {
            assert!(e.verified);
            assert_eq!(theory_operand(&ctx, &e.witness, 1).unwrap(), t);
        }
    }

    #[test]
    fn min_witness_examples() {
        let ctx = TheoryCtx::new(Palette::empty());
        let table = closure(&ctx, 0, ClosureOptions::for_depth(0)).unwrap();
        let loop1 = theory(&ctx, &Graph::singleton(&ctx.palette, true), 0).unwrap();
        assert_eq!(table.min_witness(loop1).unwrap().1, 1);
        // C2 and the self-loop share no depth-0 theory, so C2's minimal
        // witness is the smallest many-vertex function graph.
        let c2 = theory(&ctx, &Graph::cycle(&ctx.palette, 2), 0).unwrap();
        assert_ne!(c2, loop1);
        assert_eq!(table.min_witness(c2).unwrap().1, 2);
    }

    #[test]
    fn closure_is_deterministic() {
        let mk = || {
            let ctx = TheoryCtx::new(Palette::empty());
            let mut opts = ClosureOptions::for_depth(1);
            opts.eager_ops = true;
            let table = closure(&ctx, 1, opts).unwrap();
            table.to_json(&ctx)
        };
        assert_eq!(mk(), mk());
    }

    #[test]
    fn round_trips_through_json() {
        let ctx = TheoryCtx::new(Palette::empty());
        let table = closure(&ctx, 1, ClosureOptions::for_depth(1)).unwrap();
        let text = table.to_json(&ctx);
        let ctx2 = TheoryCtx::new(Palette::empty());
        let table2 = ClosureTable::from_json(&ctx2, &text).unwrap();
        assert_eq!(table2.entries.len(), table.entries.len());
        assert_eq!(table2.to_json(&ctx2), text);
    }

    #[test]
    fn period_is_positive_multiple_of_witness_sizes() {
        let ctx = TheoryCtx::new(Palette::empty());
        let table = closure(&ctx, 0, ClosureOptions::for_depth(0)).unwrap();
        let p = table.period();
        assert!(p > 0);
        for e in table.entries.values() {
            assert_eq!(p % e.size as u64, 0);
        }
    }
}
