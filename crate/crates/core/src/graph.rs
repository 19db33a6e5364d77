//! Colored partial-function graphs and the composition operations on them.
//!
//! A PF-graph is a finite directed graph in which every vertex has at most
//! one outgoing edge. The edge relation `E(x, y)` reads "y is the parent of
//! x"; a vertex with no parent is an orphan. The orphan set is never stored,
//! it is recomputed from the parent map on demand.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Hard ceiling on vertex counts so vertex sets fit in a `u64` bitmask.
pub const MAX_VERTICES: u32 = 63;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("graph must have at least one vertex")]
    Empty,
    #[error("graph has {0} vertices, limit is {MAX_VERTICES}")]
    TooLarge(u32),
    #[error("vertex {0} out of range (n = {1})")]
    VertexOutOfRange(u32, u32),
    #[error("duplicate edge for child {0}")]
    DuplicateChild(u32),
    #[error("unknown color {0:?}")]
    UnknownColor(String),
    #[error("palette mismatch: {0:?} vs {1:?}")]
    PaletteMismatch(Palette, Palette),
    #[error("operand is not a forest")]
    NotAForest,
    #[error("operand shape does not match composition kind {0:?}")]
    ShapeMismatch(ComposeKind),
}

/// Ordered list of color names, fixed for a whole session.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Palette(Arc<[String]>);

impl Palette {
    pub fn new<I, S>(names: I) -> Palette
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Palette(names.into_iter().map(Into::into).collect())
    }

    pub fn empty() -> Palette {
        Palette(Arc::from([]))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.0
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.0.iter().position(|c| c == name)
    }
}

impl fmt::Debug for Palette {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// Finite colored partial-function graph.
///
/// Vertices are dense `0..n`. `parent[v] = Some(w)` encodes the edge
/// `E(v, w)`, so out-degree <= 1 holds by representation.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    n: u32,
    parent: Vec<Option<u32>>,
    /// One vertex bitmask per palette entry.
    colors: Vec<u64>,
    palette: Palette,
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph(n={}, parent={:?})", self.n, self.parent)
    }
}

/// PF-graph with a distinguished vertex.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Dotted {
    pub graph: Graph,
    pub dot: u32,
}

impl Dotted {
    pub fn new(graph: Graph, dot: u32) -> Result<Dotted, GraphError> {
        if dot >= graph.n {
            return Err(GraphError::VertexOutOfRange(dot, graph.n));
        }
        Ok(Dotted { graph, dot })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum StructureClass {
    FunctionGraph,
    Forest,
    Tree,
    DottedForest,
    DottedSingletonFunctionGraph,
    General,
}

/// The five composition kinds of the workbench, beyond plain `sum`.
///
/// With operands `X` (plain) and `(Y, b)` / `(X, a)` (dotted):
/// * `DotInto`: X -|- (Y,b), b becomes the parent of every orphan of X.
/// * `DottedDot`: (X,a) -|- (Y,b), same reparenting, dot a kept.
/// * `Circular`: (X,a) (+) (Y,b), reparent both ways; no dot survives.
/// * `SumRightDot`: X + (Y,b), plain disjoint union keeping dot b.
/// * `DotPlusUndotted`: (Y,b) -|- X, i.e. (X -|- (Y,b)) keeping dot b.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ComposeKind {
    Sum,
    DotInto,
    DottedDot,
    Circular,
    SumRightDot,
    DotPlusUndotted,
}

impl ComposeKind {
    pub const ALL: [ComposeKind; 6] = [
        ComposeKind::Sum,
        ComposeKind::DotInto,
        ComposeKind::DottedDot,
        ComposeKind::Circular,
        ComposeKind::SumRightDot,
        ComposeKind::DotPlusUndotted,
    ];

    /// (left dotted, right dotted, result dotted)
    pub fn shape(self) -> (bool, bool, bool) {
        match self {
            ComposeKind::Sum => (false, false, false),
            ComposeKind::DotInto => (false, true, false),
            ComposeKind::DottedDot => (true, true, true),
            ComposeKind::Circular => (true, true, false),
            ComposeKind::SumRightDot => (false, true, true),
            ComposeKind::DotPlusUndotted => (true, false, true),
        }
    }
}

/// Either kind of operand or result of `compose`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Operand {
    Plain(Graph),
    Dotted(Dotted),
}

impl Operand {
    pub fn graph(&self) -> &Graph {
        match self {
            Operand::Plain(g) => g,
            Operand::Dotted(d) => &d.graph,
        }
    }

    pub fn dot(&self) -> Option<u32> {
        match self {
            Operand::Plain(_) => None,
            Operand::Dotted(d) => Some(d.dot),
        }
    }
}

impl Graph {
    /// Builds a graph from a parent map and color sets (as vertex bitmasks).
    pub fn new(
        n: u32,
        parent: Vec<Option<u32>>,
        palette: Palette,
        colors: Vec<u64>,
    ) -> Result<Graph, GraphError> {
        if n == 0 {
            return Err(GraphError::Empty);
        }
        if n > MAX_VERTICES {
            return Err(GraphError::TooLarge(n));
        }
        debug_assert_eq!(parent.len(), n as usize);
        debug_assert_eq!(colors.len(), palette.len());
        let full = mask_all(n);
        for (v, p) in parent.iter().enumerate() {
            if let Some(p) = *p {
                if p >= n {
                    return Err(GraphError::VertexOutOfRange(p, n));
                }
            }
            let _ = v;
        }
        for m in &colors {
            if m & !full != 0 {
                return Err(GraphError::VertexOutOfRange(63, n));
            }
        }
        Ok(Graph {
            n,
            parent,
            colors,
            palette,
        })
    }

    /// Single uncolored vertex; a self-loop when `looped`, an orphan otherwise.
    pub fn singleton(palette: &Palette, looped: bool) -> Graph {
        Graph::singleton_colored(palette, looped, 0)
    }

    /// Single vertex carrying the colors of `color_mask` (palette indices).
    pub fn singleton_colored(palette: &Palette, looped: bool, color_mask: u32) -> Graph {
        let colors = (0..palette.len())
            .map(|i| if color_mask >> i & 1 == 1 { 1u64 } else { 0 })
            .collect();
        Graph {
            n: 1,
            parent: vec![if looped { Some(0) } else { None }],
            colors,
            palette: palette.clone(),
        }
    }

    /// Directed cycle on `len` uncolored vertices, `v -> v+1 -> .. -> 0`.
    pub fn cycle(palette: &Palette, len: u32) -> Graph {
        assert!(len >= 1);
        let parent = (0..len).map(|v| Some((v + 1) % len)).collect();
        Graph {
            n: len,
            parent,
            colors: vec![0; palette.len()],
            palette: palette.clone(),
        }
    }

    /// Path `0 -> 1 -> .. -> len-1` with the last vertex an orphan.
    pub fn path(palette: &Palette, len: u32) -> Graph {
        assert!(len >= 1);
        let parent = (0..len)
            .map(|v| if v + 1 < len { Some(v + 1) } else { None })
            .collect();
        Graph {
            n: len,
            parent,
            colors: vec![0; palette.len()],
            palette: palette.clone(),
        }
    }

    pub fn vertex_count(&self) -> u32 {
        self.n
    }

    pub fn palette(&self) -> &Palette {
        &self.palette
    }

    pub fn parent(&self, v: u32) -> Option<u32> {
        self.parent[v as usize]
    }

    pub fn parents(&self) -> &[Option<u32>] {
        &self.parent
    }

    pub fn color_mask(&self, color: usize) -> u64 {
        self.colors[color]
    }

    /// Bitmask of colors holding at `v`, in palette order.
    pub fn vertex_colors(&self, v: u32) -> u32 {
        let mut m = 0;
        for (i, c) in self.colors.iter().enumerate() {
            if c >> v & 1 == 1 {
                m |= 1 << i;
            }
        }
        m
    }

    pub fn is_orphan(&self, v: u32) -> bool {
        self.parent[v as usize].is_none()
    }

    /// Derived orphan set as a bitmask.
    pub fn orphans(&self) -> u64 {
        let mut m = 0;
        for v in 0..self.n {
            if self.is_orphan(v) {
                m |= 1 << v;
            }
        }
        m
    }

    pub fn is_function_graph(&self) -> bool {
        self.orphans() == 0
    }

    pub fn children(&self, v: u32) -> Vec<u32> {
        (0..self.n).filter(|&c| self.parent(c) == Some(v)).collect()
    }

    /// Vertices on some cycle, as a bitmask.
    pub fn cyclic_vertices(&self) -> u64 {
        // Follow parents from each vertex; the eventual loop is the cycle.
        let mut cyclic = 0u64;
        for start in 0..self.n {
            let mut seen = 0u64;
            let mut v = start;
            loop {
                if seen >> v & 1 == 1 {
                    // v starts the cycle of this walk
                    let mut w = v;
                    loop {
                        cyclic |= 1 << w;
                        w = self.parent(w).expect("cycle vertex has a parent");
                        if w == v {
                            break;
                        }
                    }
                    break;
                }
                seen |= 1 << v;
                match self.parent(v) {
                    Some(p) => v = p,
                    None => break,
                }
            }
        }
        cyclic
    }

    pub fn is_acyclic(&self) -> bool {
        self.cyclic_vertices() == 0
    }

    /// `v` together with all its descendants (vertices with a path into `v`).
    pub fn descendant_closure(&self, v: u32) -> u64 {
        let mut set = 1u64 << v;
        loop {
            let mut grew = false;
            for c in 0..self.n {
                if set >> c & 1 == 0 {
                    if let Some(p) = self.parent(c) {
                        if set >> p & 1 == 1 {
                            set |= 1 << c;
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

    /// Induced subgraph on the vertices of `set`, relabeled densely in
    /// ascending vertex order. Edges to vertices outside `set` are dropped.
    /// Returns the subgraph and the map new-index -> old-index.
    pub fn induced(&self, set: u64) -> (Graph, Vec<u32>) {
        let old: Vec<u32> = (0..self.n).filter(|&v| set >> v & 1 == 1).collect();
        assert!(!old.is_empty(), "induced subgraph must be nonempty");
        let mut new_of = vec![u32::MAX; self.n as usize];
        for (i, &v) in old.iter().enumerate() {
            new_of[v as usize] = i as u32;
        }
        let parent = old
            .iter()
            .map(|&v| {
                self.parent(v)
                    .filter(|&p| set >> p & 1 == 1)
                    .map(|p| new_of[p as usize])
            })
            .collect();
        let colors = self
            .colors
            .iter()
            .map(|&cm| {
                let mut m = 0u64;
                for (i, &v) in old.iter().enumerate() {
                    if cm >> v & 1 == 1 {
                        m |= 1 << i;
                    }
                }
                m
            })
            .collect();
        (
            Graph {
                n: old.len() as u32,
                parent,
                colors,
                palette: self.palette.clone(),
            },
            old,
        )
    }

    /// Relabels vertices by a permutation `perm`, where `perm[v]` is the new
    /// name of `v`. Produces an isomorphic graph.
    pub fn relabel(&self, perm: &[u32]) -> Graph {
        assert_eq!(perm.len(), self.n as usize);
        let mut parent = vec![None; self.n as usize];
        for v in 0..self.n {
            parent[perm[v as usize] as usize] = self.parent(v).map(|p| perm[p as usize]);
        }
        let colors = self
            .colors
            .iter()
            .map(|&cm| {
                let mut m = 0u64;
                for v in 0..self.n {
                    if cm >> v & 1 == 1 {
                        m |= 1 << perm[v as usize];
                    }
                }
                m
            })
            .collect();
        Graph {
            n: self.n,
            parent,
            colors,
            palette: self.palette.clone(),
        }
    }
}

pub fn mask_all(n: u32) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Connected components, per-component cycles, and the class tag.
#[derive(Clone, Debug)]
pub struct Classification {
    pub class: StructureClass,
    /// Components as graphs, with their original vertex sets.
    pub components: Vec<(Graph, Vec<u32>)>,
    /// One cycle per orphanless component, in original vertex labels,
    /// listed in parent order.
    pub cycles: Vec<Vec<u32>>,
}

/// Partitions `g` by the "common ancestor" equivalence and tags its class.
///
/// A component is a tree exactly when it has an orphan; otherwise it carries
/// a unique cycle, reported in parent order.
pub fn classify(g: &Graph) -> Classification {
    // Each vertex's walk along parents ends in an orphan or a cycle; group
    // vertices by that sink (orphan vertex, or the least vertex of the cycle).
    let mut sink = vec![u32::MAX; g.n as usize];
    for start in 0..g.n {
        if sink[start as usize] != u32::MAX {
            continue;
        }
        let mut walk = Vec::new();
        let mut on_walk = 0u64;
        let mut v = start;
        let s = loop {
            if sink[v as usize] != u32::MAX {
                break sink[v as usize];
            }
            if on_walk >> v & 1 == 1 {
                // Closed a new cycle; its least vertex is the sink.
                let pos = walk.iter().position(|&w| w == v).unwrap();
                break *walk[pos..].iter().min().unwrap();
            }
            on_walk |= 1 << v;
            walk.push(v);
            match g.parent(v) {
                Some(p) => v = p,
                None => break v,
            }
        };
        for w in walk {
            sink[w as usize] = s;
        }
    }
    // Components in first-seen order.
    let mut order: Vec<u32> = Vec::new();
    for v in 0..g.n {
        if !order.contains(&sink[v as usize]) {
            order.push(sink[v as usize]);
        }
    }
    let comp = sink;
    let cyclic = g.cyclic_vertices();
    let mut components = Vec::new();
    let mut cycles = Vec::new();
    for &id in &order {
        let mut set = 0u64;
        for v in 0..g.n {
            if comp[v as usize] == id {
                set |= 1 << v;
            }
        }
        let (sub, old) = g.induced(set);
        // Cycle of this component, if orphanless.
        if set & g.orphans() == 0 {
            let mut v = old[0];
            let mut seen = 0u64;
            while seen >> v & 1 == 0 {
                seen |= 1 << v;
                v = g.parent(v).expect("orphanless component");
            }
            let start = v;
            let mut cyc = vec![start];
            let mut w = g.parent(start).unwrap();
            while w != start {
                cyc.push(w);
                w = g.parent(w).unwrap();
            }
            cycles.push(cyc);
        }
        components.push((sub, old));
    }
    let acyclic = cyclic == 0;
    let orphanless = g.orphans() == 0;
    let class = if orphanless {
        StructureClass::FunctionGraph
    } else if acyclic {
        if components.len() == 1 {
            StructureClass::Tree
        } else {
            StructureClass::Forest
        }
    } else {
        StructureClass::General
    };
    Classification {
        class,
        components,
        cycles,
    }
}

/// Class tag for a dotted structure, as used by the class-K machinery.
pub fn classify_dotted(d: &Dotted) -> StructureClass {
    let c = classify(&d.graph);
    match c.class {
        StructureClass::Forest | StructureClass::Tree => StructureClass::DottedForest,
        StructureClass::FunctionGraph if d.graph.n == 1 => {
            StructureClass::DottedSingletonFunctionGraph
        }
        _ => StructureClass::General,
    }
}

fn check_palette(a: &Graph, b: &Graph) -> Result<(), GraphError> {
    if a.palette != b.palette {
        return Err(GraphError::PaletteMismatch(
            a.palette.clone(),
            b.palette.clone(),
        ));
    }
    Ok(())
}

/// Disjoint union. The right operand is shifted past the left one.
pub fn sum(x: &Graph, y: &Graph) -> Result<Graph, GraphError> {
    check_palette(x, y)?;
    let n = x.n + y.n;
    if n > MAX_VERTICES {
        return Err(GraphError::TooLarge(n));
    }
    let mut parent = x.parent.clone();
    parent.extend(y.parent.iter().map(|p| p.map(|w| w + x.n)));
    let colors = x
        .colors
        .iter()
        .zip(&y.colors)
        .map(|(&cx, &cy)| cx | cy << x.n)
        .collect();
    Ok(Graph {
        n,
        parent,
        colors,
        palette: x.palette.clone(),
    })
}

/// Sum of a whole slice; `graphs` must be nonempty.
pub fn sum_all(graphs: &[Graph]) -> Result<Graph, GraphError> {
    let (first, rest) = graphs.split_first().expect("sum_all of nonempty slice");
    let mut acc = first.clone();
    for g in rest {
        acc = sum(&acc, g)?;
    }
    Ok(acc)
}

/// Attaches a fresh uncolored root below no one and above every orphan,
/// turning a forest into a tree. The root gets the last index.
pub fn attach_root(x: &Graph) -> Result<Graph, GraphError> {
    if !x.is_acyclic() {
        return Err(GraphError::NotAForest);
    }
    let n = x.n + 1;
    if n > MAX_VERTICES {
        return Err(GraphError::TooLarge(n));
    }
    let root = x.n;
    let mut parent: Vec<Option<u32>> = x
        .parent
        .iter()
        .map(|p| Some(p.unwrap_or(root)))
        .collect();
    parent.push(None);
    Ok(Graph {
        n,
        parent,
        colors: x.colors.clone(),
        palette: x.palette.clone(),
    })
}

/// `X -|- (Y,b)`: disjoint union with `b` made the parent of every orphan
/// of `X`. The result is undotted.
pub fn dot_into(x: &Graph, yb: &Dotted) -> Result<Graph, GraphError> {
    let mut z = sum(x, &yb.graph)?;
    let b = x.n + yb.dot;
    for v in 0..x.n {
        if z.parent[v as usize].is_none() {
            z.parent[v as usize] = Some(b);
        }
    }
    Ok(z)
}

/// `(X,a) -|- (Y,b)`: like `dot_into` but the dot `a` survives.
pub fn dotted_dot(xa: &Dotted, yb: &Dotted) -> Result<Dotted, GraphError> {
    Ok(Dotted {
        graph: dot_into(&xa.graph, yb)?,
        dot: xa.dot,
    })
}

/// `(X,a) (+) (Y,b)`: reparent orphans of X onto b and orphans of Y onto a.
pub fn circular(xa: &Dotted, yb: &Dotted) -> Result<Graph, GraphError> {
    let x = &xa.graph;
    let y = &yb.graph;
    let y_orphans = y.orphans();
    let mut z = dot_into(x, yb)?;
    for v in 0..y.n {
        if y_orphans >> v & 1 == 1 {
            z.parent[(x.n + v) as usize] = Some(xa.dot);
        }
    }
    Ok(z)
}

/// `X + (Y,b) = ((X + Y), b)`.
pub fn sum_right_dot(x: &Graph, yb: &Dotted) -> Result<Dotted, GraphError> {
    Ok(Dotted {
        graph: sum(x, &yb.graph)?,
        dot: x.n + yb.dot,
    })
}

/// `(Y,b) -|- X = ((X -|- (Y,b)), b)`.
pub fn dot_plus_undotted(yb: &Dotted, x: &Graph) -> Result<Dotted, GraphError> {
    Ok(Dotted {
        graph: dot_into(x, yb)?,
        dot: x.n + yb.dot,
    })
}

/// Uniform dispatcher over all six composition kinds.
pub fn compose(kind: ComposeKind, left: &Operand, right: &Operand) -> Result<Operand, GraphError> {
    match (kind, left, right) {
        (ComposeKind::Sum, Operand::Plain(x), Operand::Plain(y)) => {
            Ok(Operand::Plain(sum(x, y)?))
        }
        (ComposeKind::DotInto, Operand::Plain(x), Operand::Dotted(yb)) => {
            Ok(Operand::Plain(dot_into(x, yb)?))
        }
        (ComposeKind::DottedDot, Operand::Dotted(xa), Operand::Dotted(yb)) => {
            Ok(Operand::Dotted(dotted_dot(xa, yb)?))
        }
        (ComposeKind::Circular, Operand::Dotted(xa), Operand::Dotted(yb)) => {
            Ok(Operand::Plain(circular(xa, yb)?))
        }
        (ComposeKind::SumRightDot, Operand::Plain(x), Operand::Dotted(yb)) => {
            Ok(Operand::Dotted(sum_right_dot(x, yb)?))
        }
        (ComposeKind::DotPlusUndotted, Operand::Dotted(yb), Operand::Plain(x)) => {
            Ok(Operand::Dotted(dot_plus_undotted(yb, x)?))
        }
        _ => Err(GraphError::ShapeMismatch(kind)),
    }
}

/// Wire format for graph files.
///
/// `{"n": int, "edges": [[child, parent], ..], "colors": {"name": [v, ..]},
/// "dot": int | absent}` — at most one edge pair per child.
#[derive(Serialize, Deserialize)]
struct GraphFile {
    n: u32,
    edges: Vec<(u32, u32)>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    colors: BTreeMap<String, Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    dot: Option<u32>,
}

#[derive(Debug, Error)]
pub enum GraphIoError {
    #[error("bad graph json: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Parses a graph (dotted or not) from the JSON wire format.
pub fn from_json(text: &str) -> Result<Operand, GraphIoError> {
    let file: GraphFile = serde_json::from_str(text)?;
    let palette = Palette::new(file.colors.keys().cloned());
    let mut parent = vec![None; file.n as usize];
    if file.n == 0 {
        return Err(GraphError::Empty.into());
    }
    if file.n > MAX_VERTICES {
        return Err(GraphError::TooLarge(file.n).into());
    }
    for &(child, par) in &file.edges {
        if child >= file.n {
            return Err(GraphError::VertexOutOfRange(child, file.n).into());
        }
        if par >= file.n {
            return Err(GraphError::VertexOutOfRange(par, file.n).into());
        }
        if parent[child as usize].is_some() {
            return Err(GraphError::DuplicateChild(child).into());
        }
        parent[child as usize] = Some(par);
    }
    let mut colors = vec![0u64; palette.len()];
    for (i, (_, verts)) in file.colors.iter().enumerate() {
        for &v in verts {
            if v >= file.n {
                return Err(GraphError::VertexOutOfRange(v, file.n).into());
            }
            colors[i] |= 1 << v;
        }
    }
    let g = Graph::new(file.n, parent, palette, colors)?;
    match file.dot {
        None => Ok(Operand::Plain(g)),
        Some(d) => Ok(Operand::Dotted(Dotted::new(g, d)?)),
    }
}

/// Serializes to the JSON wire format; the orphan set is derived, never
/// written.
pub fn to_json(op: &Operand) -> String {
    let g = op.graph();
    let edges: Vec<(u32, u32)> = (0..g.n)
        .filter_map(|v| g.parent(v).map(|p| (v, p)))
        .collect();
    let mut colors = BTreeMap::new();
    for (i, name) in g.palette.names().iter().enumerate() {
        let verts: Vec<u32> = (0..g.n).filter(|&v| g.colors[i] >> v & 1 == 1).collect();
        colors.insert(name.clone(), verts);
    }
    serde_json::to_string(&GraphFile {
        n: g.n,
        edges,
        colors,
        dot: op.dot(),
    })
    .expect("graph serialization")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pal() -> Palette {
        Palette::empty()
    }

    #[test]
    fn classify_c3_is_function_graph() {
        let g = Graph::cycle(&pal(), 3);
        let c = classify(&g);
        assert_eq!(c.class, StructureClass::FunctionGraph);
        assert_eq!(c.components.len(), 1);
        assert_eq!(c.cycles.len(), 1);
        assert_eq!(c.cycles[0].len(), 3);
    }

    #[test]
    fn classify_two_orphans_is_forest() {
        let g = sum(
            &Graph::singleton(&pal(), false),
            &Graph::singleton(&pal(), false),
        )
        .unwrap();
        let c = classify(&g);
        assert_eq!(c.class, StructureClass::Forest);
        assert_eq!(c.components.len(), 2);
        assert!(c.cycles.is_empty());
    }

    #[test]
    fn classify_mixed_is_general() {
        let g = sum(&Graph::cycle(&pal(), 2), &Graph::singleton(&pal(), false)).unwrap();
        let c = classify(&g);
        assert_eq!(c.class, StructureClass::General);
        assert_eq!(c.components.len(), 2);
        assert_eq!(c.cycles.len(), 1);
    }

    #[test]
    fn sum_counts_and_components() {
        let x = sum(&Graph::singleton(&pal(), false), &Graph::singleton(&pal(), true)).unwrap();
        assert_eq!(x.vertex_count(), 2);
        assert_eq!(x.orphans().count_ones(), 1);
        let c = classify(&x);
        assert_eq!(c.cycles.len(), 1);
        assert_eq!(c.cycles[0].len(), 1);

        let a = Graph::path(&pal(), 3);
        let b = Graph::cycle(&pal(), 4);
        assert_eq!(sum(&a, &b).unwrap().vertex_count(), 7);

        let fg = sum(&Graph::cycle(&pal(), 2), &Graph::cycle(&pal(), 3)).unwrap();
        let c = classify(&fg);
        assert_eq!(c.class, StructureClass::FunctionGraph);
        assert_eq!(c.components.len(), 2);
    }

    #[test]
    fn attach_root_builds_trees() {
        let f = sum(
            &Graph::singleton(&pal(), false),
            &Graph::singleton(&pal(), false),
        )
        .unwrap();
        let t = attach_root(&f).unwrap();
        assert_eq!(t.vertex_count(), 3);
        assert_eq!(classify(&t).class, StructureClass::Tree);
        assert_eq!(t.children(2).len(), 2);

        let p = attach_root(&Graph::singleton(&pal(), false)).unwrap();
        assert_eq!(p.vertex_count(), 2);
        assert_eq!(classify(&p).class, StructureClass::Tree);

        assert!(matches!(
            attach_root(&Graph::cycle(&pal(), 2)),
            Err(GraphError::NotAForest)
        ));
    }

    #[test]
    fn circular_of_dotted_singletons_is_two_cycle() {
        let a = Dotted::new(Graph::singleton(&pal(), false), 0).unwrap();
        let b = Dotted::new(Graph::singleton(&pal(), false), 0).unwrap();
        let z = circular(&a, &b).unwrap();
        assert!(z.is_function_graph());
        let c = classify(&z);
        assert_eq!(c.cycles.len(), 1);
        assert_eq!(c.cycles[0].len(), 2);
    }

    #[test]
    fn dot_into_reparents_orphans() {
        let x = sum(
            &Graph::singleton(&pal(), false),
            &Graph::singleton(&pal(), false),
        )
        .unwrap();
        let yb = Dotted::new(Graph::singleton(&pal(), true), 0).unwrap();
        let z = dot_into(&x, &yb).unwrap();
        assert_eq!(z.vertex_count(), 3);
        assert!(z.is_function_graph());
        assert_eq!(z.parent(0), Some(2));
        assert_eq!(z.parent(1), Some(2));
    }

    #[test]
    fn dotted_dot_keeps_left_dot() {
        let xa = Dotted::new(Graph::singleton(&pal(), false), 0).unwrap();
        let yb = Dotted::new(Graph::singleton(&pal(), false), 0).unwrap();
        let z = dotted_dot(&xa, &yb).unwrap();
        assert_eq!(z.dot, 0);
        assert_eq!(z.graph.parent(0), Some(1));
        assert!(z.graph.is_orphan(1));
    }

    #[test]
    fn size_additivity_all_kinds() {
        let x = Graph::path(&pal(), 2);
        let y = Graph::cycle(&pal(), 3);
        let dx = Dotted::new(x.clone(), 1).unwrap();
        let dy = Dotted::new(y.clone(), 0).unwrap();
        for kind in ComposeKind::ALL {
            let (ld, rd, _) = kind.shape();
            let left = if ld {
                Operand::Dotted(dx.clone())
            } else {
                Operand::Plain(x.clone())
            };
            let right = if rd {
                Operand::Dotted(dy.clone())
            } else {
                Operand::Plain(y.clone())
            };
            let z = compose(kind, &left, &right).unwrap();
            assert_eq!(
                z.graph().vertex_count(),
                left.graph().vertex_count() + right.graph().vertex_count()
            );
        }
    }

    #[test]
    fn json_round_trip_and_duplicate_rejection() {
        let text = r#"{"n":3,"edges":[[0,1],[1,2]],"colors":{"red":[0,2]}}"#;
        let op = from_json(text).unwrap();
        let g = op.graph();
        assert_eq!(g.vertex_count(), 3);
        assert_eq!(g.vertex_colors(0), 1);
        assert_eq!(g.vertex_colors(1), 0);
        let back = to_json(&op);
        let op2 = from_json(&back).unwrap();
        assert_eq!(&op2, &op);

        let dup = r#"{"n":2,"edges":[[0,1],[0,0]]}"#;
        assert!(from_json(dup).is_err());
    }

    #[test]
    fn dotted_json() {
        let text = r#"{"n":2,"edges":[[0,1]],"dot":1}"#;
        let op = from_json(text).unwrap();
        assert_eq!(op.dot(), Some(1));
        assert_eq!(from_json(&to_json(&op)).unwrap(), op);
        assert!(from_json(r#"{"n":1,"edges":[],"dot":4}"#).is_err());
    }

    #[test]
    fn palette_mismatch_rejected() {
        let a = Graph::singleton(&Palette::empty(), false);
        let b = Graph::singleton(&Palette::new(["red"]), false);
        assert!(matches!(sum(&a, &b), Err(GraphError::PaletteMismatch(..))));
    }
}
