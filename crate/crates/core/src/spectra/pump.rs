//! Grows a function graph by exactly one period without changing its
//! depth-`d` theory, by the four-case analysis: repeat a component segment,
//! pump a sibling forest, splice a dotted tree into a long cycle, or splice
//! one into a long non-cyclic path. Each case hinges on finding two equal
//! theories along a chain and inserting a witness-built segment between
//! them.

use crate::algebra::closure::{ClosureTable, KClass};
use crate::canon::canonical_key;
use crate::graph::{
    circular, classify, dot_into, dotted_dot, mask_all, sum, sum_all, Dotted, Graph, Operand,
};
use crate::theory::{theory, theory_dotted, TheoryCtx, TheoryId};

use super::SpectraError;

/// Case triggers. The defaults from a table are the numbers of discovered
/// theories per class: an under-approximation of the count-everything
/// bounds, which only makes the cases fire earlier and still guarantees a
/// repeated theory by pigeonhole over the table.
#[derive(Clone, Copy, Debug)]
pub struct PumpThresholds {
    /// Components, versus function-graph theories.
    pub case1: u64,
    /// Non-cyclic children of one vertex, versus forest theories.
    pub case2: u64,
    /// Cycle length, versus dotted-tree theories.
    pub case3: u64,
    /// Non-cyclic path length, versus tree theories.
    pub case4: u64,
}

impl PumpThresholds {
    pub fn from_table(table: &ClosureTable) -> PumpThresholds {
        PumpThresholds {
            case1: table.class_count(KClass::FunctionGraph) as u64,
            case2: table.class_count(KClass::Forest) as u64,
            case3: table.tree_theory_count(true) as u64,
            case4: table.tree_theory_count(false) as u64,
        }
    }
}

#[derive(Debug, Clone)]
pub enum PumpOutcome {
    Pumped {
        graph: Graph,
        case: u8,
        period: u64,
    },
    NotApplicable {
        reason: String,
    },
}

/// First repeated value: smallest `j`, then smallest `i < j`, with
/// `items[i] == items[j]`; indices are 0-based.
fn first_repeat(items: &[TheoryId]) -> Option<(usize, usize)> {
    for j in 1..items.len() {
        for i in 0..j {
            if items[i] == items[j] {
                return Some((i, j));
            }
        }
    }
    None
}

fn fold_dotted_chain(witness: &Dotted, copies: u64) -> Result<Dotted, SpectraError> {
    let mut acc = witness.clone();
    for _ in 1..copies {
        acc = dotted_dot(&acc, witness)?;
    }
    Ok(acc)
}

/// Case-1 style pumping of a disjoint union: find a repeated prefix theory
/// among the components (in canonical order), insert `p / p_u` copies of
/// the table witness of the repeated segment.
fn pump_components(
    ctx: &TheoryCtx,
    table: &ClosureTable,
    comps: &[Graph],
    d: u8,
    p: u64,
) -> Result<Option<Graph>, SpectraError> {
    let mut prefix_theories = Vec::with_capacity(comps.len());
    let mut acc: Option<Graph> = None;
    for c in comps {
        acc = Some(match acc {
            None => c.clone(),
            Some(a) => sum(&a, c)?,
        });
        prefix_theories.push(theory(ctx, acc.as_ref().unwrap(), d)?);
    }
    let Some((i, j)) = first_repeat(&prefix_theories) else {
        return Ok(None);
    };
    // Prefixes i and j (0-based) coincide, so the segment comps[i+1..=j]
    // absorbs into the prefix.
    let segment = sum_all(&comps[i + 1..=j])?;
    let u = theory(ctx, &segment, d)?;
    let Ok(entry) = table.get(u) else {
        return Ok(None);
    };
    if p % entry.size as u64 != 0 {
        return Ok(None);
    }
    let copies = p / entry.size as u64;
    let wit = match &entry.witness {
        Operand::Plain(g) => g,
        Operand::Dotted(dg) => &dg.graph,
    };
    let mut out = sum_all(comps)?;
    for _ in 0..copies {
        out = sum(&out, wit)?;
    }
    Ok(Some(out))
}

/// Sorted component list in canonical order: the proof picks the components
/// "in some order", and the canonical key is ours.
fn sorted_components(g: &Graph) -> Vec<Graph> {
    let mut comps: Vec<Graph> = classify(g)
        .components
        .into_iter()
        .map(|(c, _)| c)
        .collect();
    comps.sort_by(|a, b| canonical_key(a).cmp(&canonical_key(b)));
    comps
}

fn try_case1(
    ctx: &TheoryCtx,
    table: &ClosureTable,
    x: &Graph,
    d: u8,
    p: u64,
    thr: u64,
) -> Result<Option<Graph>, SpectraError> {
    let comps = sorted_components(x);
    if (comps.len() as u64) <= thr {
        return Ok(None);
    }
    pump_components(ctx, table, &comps, d, p)
}

fn try_case2(
    ctx: &TheoryCtx,
    table: &ClosureTable,
    x: &Graph,
    d: u8,
    p: u64,
    thr: u64,
) -> Result<Option<Graph>, SpectraError> {
    let cyclic = x.cyclic_vertices();
    let mut best: Option<(usize, u32)> = None;
    for a in 0..x.vertex_count() {
        let k = x
            .children(a)
            .into_iter()
            .filter(|&c| cyclic >> c & 1 == 0)
            .count();
        if k as u64 > thr && best.map_or(true, |(bk, _)| k > bk) {
            best = Some((k, a));
        }
    }
    let Some((_, a)) = best else {
        return Ok(None);
    };
    // The forest of the trees hanging at a's non-cyclic children.
    let mut f_set = 0u64;
    for c in x.children(a) {
        if cyclic >> c & 1 == 0 {
            f_set |= x.descendant_closure(c);
        }
    }
    let (forest, _) = x.induced(f_set);
    let (rest, rest_old) = x.induced(mask_all(x.vertex_count()) & !f_set);
    let a_in_rest = rest_old.iter().position(|&v| v == a).unwrap() as u32;
    let comps = sorted_components(&forest);
    let Some(pumped_forest) = pump_components(ctx, table, &comps, d, p)? else {
        return Ok(None);
    };
    let out = dot_into(&pumped_forest, &Dotted::new(rest, a_in_rest)?)?;
    Ok(Some(out))
}

/// Shared tail of cases 3 and 4: given the chain trees `T_0..T_{m-1}` (as
/// vertex sets in `x`, rooted at `anchors[i]`), find a repeated prefix
/// theory, build the spliced replacement segment from the table witness,
/// and reassemble.
struct ChainSplit {
    /// Vertex set of the repeated prefix of chain trees.
    prefix_set: u64,
    segment_theory: TheoryId,
    /// Reattachment target in the remainder: the parent of the prefix root.
    next_anchor: u32,
}

fn chain_split(
    ctx: &TheoryCtx,
    x: &Graph,
    anchors: &[u32],
    tree_sets: &[u64],
    d: u8,
    dotted_prefix: bool,
    interior_only: bool,
) -> Result<Option<ChainSplit>, SpectraError> {
    let m = anchors.len();
    let mut prefix_theories = Vec::with_capacity(m);
    let mut acc = 0u64;
    for set in tree_sets {
        acc |= set;
        let (sub, old) = x.induced(acc);
        let t = if dotted_prefix {
            let dot = old.iter().position(|&v| v == anchors[0]).unwrap() as u32;
            theory_dotted(ctx, &Dotted::new(sub, dot)?, d)?
        } else {
            theory(ctx, &sub, d)?
        };
        prefix_theories.push(t);
    }
    let limit = if interior_only { m - 1 } else { m };
    let Some((i, j)) = first_repeat(&prefix_theories[..limit]) else {
        return Ok(None);
    };
    // Prefixes through trees i and j coincide, so the segment of trees
    // i+1..=j (dotted at its lowest anchor) absorbs into the prefix.
    let mut seg_set = 0u64;
    for set in &tree_sets[i + 1..=j] {
        seg_set |= set;
    }
    let (seg, seg_old) = x.induced(seg_set);
    let seg_dot = seg_old
        .iter()
        .position(|&v| v == anchors[i + 1])
        .unwrap() as u32;
    let segment_theory = theory_dotted(ctx, &Dotted::new(seg, seg_dot)?, d)?;
    let mut prefix_set = 0u64;
    for set in &tree_sets[..=j] {
        prefix_set |= set;
    }
    Ok(Some(ChainSplit {
        prefix_set,
        segment_theory,
        next_anchor: x.parent(anchors[j]).expect("chain vertex has a parent"),
    }))
}

fn splice_witness(
    table: &ClosureTable,
    u: TheoryId,
    p: u64,
) -> Result<Option<Dotted>, SpectraError> {
    let Ok(entry) = table.get(u) else {
        return Ok(None);
    };
    if p % entry.size as u64 != 0 {
        return Ok(None);
    }
    let wit = match &entry.witness {
        Operand::Dotted(dg) => dg,
        Operand::Plain(_) => return Ok(None),
    };
    Ok(Some(fold_dotted_chain(wit, p / entry.size as u64)?))
}

fn try_case3(
    ctx: &TheoryCtx,
    table: &ClosureTable,
    x: &Graph,
    d: u8,
    p: u64,
    thr: u64,
) -> Result<Option<Graph>, SpectraError> {
    let cls = classify(x);
    let cyclic = x.cyclic_vertices();
    for cycle in &cls.cycles {
        if (cycle.len() as u64) <= thr {
            continue;
        }
        // Deterministic starting point: rotate to the least vertex.
        let least = *cycle.iter().min().unwrap();
        let start = cycle.iter().position(|&v| v == least).unwrap();
        let anchors: Vec<u32> = (0..cycle.len())
            .map(|i| cycle[(start + i) % cycle.len()])
            .collect();
        let tree_sets: Vec<u64> = anchors
            .iter()
            .map(|&a| noncyclic_tree_set(x, a, cyclic))
            .collect();
        let Some(split) = chain_split(ctx, x, &anchors, &tree_sets, d, true, true)? else {
            continue;
        };
        let Some(chain) = splice_witness(table, split.segment_theory, p)? else {
            continue;
        };
        // Y = ((X_j, a_0) -|- (Z, c)) (+) (V, a_j).
        let (xj, xj_old) = x.induced(split.prefix_set);
        let xj_dot = xj_old.iter().position(|&v| v == anchors[0]).unwrap() as u32;
        let (v_graph, v_old) = x.induced(mask_all(x.vertex_count()) & !split.prefix_set);
        let v_dot = v_old
            .iter()
            .position(|&v| v == split.next_anchor)
            .unwrap() as u32;
        let w = dotted_dot(&Dotted::new(xj, xj_dot)?, &chain)?;
        let out = circular(&w, &Dotted::new(v_graph, v_dot)?)?;
        return Ok(Some(out));
    }
    Ok(None)
}

fn try_case4(
    ctx: &TheoryCtx,
    table: &ClosureTable,
    x: &Graph,
    d: u8,
    p: u64,
    thr: u64,
) -> Result<Option<Graph>, SpectraError> {
    let cyclic = x.cyclic_vertices();
    // Tallest chain of non-cyclic vertices, walking parents upward.
    let mut down = vec![0u32; x.vertex_count() as usize];
    let mut order: Vec<u32> = (0..x.vertex_count()).collect();
    // Children before parents: iterate until fixpoint (graphs are tiny).
    loop {
        let mut changed = false;
        for &v in &order {
            if cyclic >> v & 1 == 1 {
                continue;
            }
            let h = 1 + x
                .children(v)
                .into_iter()
                .filter(|&c| cyclic >> c & 1 == 0)
                .map(|c| down[c as usize])
                .max()
                .unwrap_or(0);
            if down[v as usize] != h {
                down[v as usize] = h;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    order.sort_by_key(|&v| std::cmp::Reverse(down[v as usize]));
    let top = order[0];
    if cyclic >> top & 1 == 1 || (down[top as usize] as u64) <= thr {
        return Ok(None);
    }
    // Walk down the tallest chain to collect a_0 .. a_{m-1} bottom-up.
    let mut path = vec![top];
    let mut cur = top;
    while down[cur as usize] > 1 {
        let next = x
            .children(cur)
            .into_iter()
            .filter(|&c| cyclic >> c & 1 == 0)
            .max_by_key(|&c| (down[c as usize], std::cmp::Reverse(c)))
            .expect("chain continues");
        path.push(next);
        cur = next;
    }
    path.reverse();
    let anchors = path;
    let tree_sets: Vec<u64> = {
        // T_i = D(a_i) minus D(a_{i-1}).
        let closures: Vec<u64> = anchors
            .iter()
            .map(|&a| x.descendant_closure(a))
            .collect();
        (0..anchors.len())
            .map(|i| {
                if i == 0 {
                    closures[0]
                } else {
                    closures[i] & !closures[i - 1]
                }
            })
            .collect()
    };
    let Some(split) = chain_split(ctx, x, &anchors, &tree_sets, d, false, false)? else {
        return Ok(None);
    };
    let Some(chain) = splice_witness(table, split.segment_theory, p)? else {
        return Ok(None);
    };
    // Y = X_j -|- (Z, c) -|- (V, a_j).
    let (xj, _) = x.induced(split.prefix_set);
    let (v_graph, v_old) = x.induced(mask_all(x.vertex_count()) & !split.prefix_set);
    let v_dot = v_old
        .iter()
        .position(|&v| v == split.next_anchor)
        .unwrap() as u32;
    let w1 = dot_into(&xj, &chain)?;
    let out = dot_into(&w1, &Dotted::new(v_graph, v_dot)?)?;
    Ok(Some(out))
}

fn noncyclic_tree_set(g: &Graph, a: u32, cyclic: u64) -> u64 {
    let mut set = 1u64 << a;
    loop {
        let mut grew = false;
        for v in 0..g.vertex_count() {
            if set >> v & 1 == 0 && cyclic >> v & 1 == 0 {
                if let Some(p) = g.parent(v) {
                    if set >> p & 1 == 1 {
                        set |= 1 << v;
                        grew = true;
                    }
                }
            }
        }
        if !grew {
            return set;
        }
    }
}

/// Tries the four cases in order; the first construction that goes through
/// wins. The output has size `|X| + p` and the same depth-`d` theory.
pub fn pump(
    ctx: &TheoryCtx,
    table: &ClosureTable,
    x: &Graph,
    d: u8,
    thresholds: PumpThresholds,
) -> Result<PumpOutcome, SpectraError> {
    assert!(x.is_function_graph(), "pumping is for function graphs");
    let p = table.period();
    if let Some(g) = try_case1(ctx, table, x, d, p, thresholds.case1)? {
        return Ok(PumpOutcome::Pumped {
            graph: g,
            case: 1,
            period: p,
        });
    }
    if let Some(g) = try_case2(ctx, table, x, d, p, thresholds.case2)? {
        return Ok(PumpOutcome::Pumped {
            graph: g,
            case: 2,
            period: p,
        });
    }
    if let Some(g) = try_case3(ctx, table, x, d, p, thresholds.case3)? {
        return Ok(PumpOutcome::Pumped {
            graph: g,
            case: 3,
            period: p,
        });
    }
    if let Some(g) = try_case4(ctx, table, x, d, p, thresholds.case4)? {
        return Ok(PumpOutcome::Pumped {
            graph: g,
            case: 4,
            period: p,
        });
    }
    Ok(PumpOutcome::NotApplicable {
        reason: "below all case thresholds, or no interior repeat available".into(),
    })
}
