//! Graph systems and windows.
//!
//! A [`GraphSystem`] is a connected weighted graph with positive edge
//! conductances and no self-loops.  Four families are supported: finite
//! explicit graphs loaded from edge lists, infinite chains indexed by the
//! non-negative integers (or all integers for the constant rule), cycles, and
//! periodic lattices.  Infinite graphs are never stored whole; a [`Window`]
//! selects a finite vertex set and [`materialize`] resolves it into a
//! [`WindowedGraph`] carrying the induced adjacency, the edges that cross the
//! window boundary, and both flavors of weighted vertex degree.

use std::collections::HashMap;
use std::fmt;
use std::io::{Read as _, Write as _};
use std::path::Path;

use serde::Deserialize;

use crate::error::{LapnetError, Result};
use crate::util::float17;

/// Format tag required in graph files.
pub const GRAPH_FORMAT_TAG: &str = "lapnet-graph-v1";

/// A vertex, identified by its integer coordinates.
///
/// Chains, cycles, and finite graphs use one coordinate; a `D`-dimensional
/// lattice uses `D`.  Ordering is lexicographic, which fixes the vertex order
/// of every materialized window.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Vertex(pub Vec<i64>);

impl Vertex {
    /// Convenience constructor for one-coordinate vertices.
    pub fn scalar(n: i64) -> Self {
        Vertex(vec![n])
    }

    /// The single coordinate of a one-dimensional vertex.
    pub fn as_scalar(&self) -> Result<i64> {
        if self.0.len() == 1 {
            Ok(self.0[0])
        } else {
            Err(LapnetError::Domain(format!(
                "expected a one-coordinate vertex, got {self}"
            )))
        }
    }

    /// Parses `"3"` or `"1,0,-2"` into a vertex.
    pub fn parse(s: &str) -> Result<Self> {
        let coords: std::result::Result<Vec<i64>, _> =
            s.split(',').map(|p| p.trim().parse::<i64>()).collect();
        match coords {
            Ok(c) if !c.is_empty() => Ok(Vertex(c)),
            _ => Err(LapnetError::Domain(format!(
                "cannot parse vertex from {s:?}; expected comma-separated integers"
            ))),
        }
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for c in &self.0 {
            if !first {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
            first = false;
        }
        Ok(())
    }
}

impl From<i64> for Vertex {
    fn from(n: i64) -> Self {
        Vertex::scalar(n)
    }
}

/// Conductance profile of a chain: the edge between `n` and `n+1` carries
/// `1`, `n+1`, `(n+1)^2`, or `lambda^(n+1)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum WeightRule {
    Constant,
    Linear,
    Square,
    Geometric(f64),
}

impl WeightRule {
    /// Conductance of the chain edge joining `n` and `n+1` (half-line: `n >= 0`).
    pub fn edge(&self, n: i64) -> f64 {
        debug_assert!(n >= 0, "half-line edge index must be non-negative");
        let k = (n + 1) as f64;
        match self {
            WeightRule::Constant => 1.0,
            WeightRule::Linear => k,
            WeightRule::Square => k * k,
            WeightRule::Geometric(l) => l.powf(k),
        }
    }
}

impl fmt::Display for WeightRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightRule::Constant => write!(f, "constant"),
            WeightRule::Linear => write!(f, "linear"),
            WeightRule::Square => write!(f, "square"),
            WeightRule::Geometric(l) => write!(f, "geometric:{l}"),
        }
    }
}

/// Index space of a chain graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IndexSpace {
    /// Vertices 0, 1, 2, ...
    HalfLine,
    /// All integers (constant rule only).
    FullLine,
}

/// Internal description of a graph system.
#[derive(Clone, Debug)]
pub enum GraphKind {
    /// Explicit finite graph; `adjacency[v]` lists `(neighbor, conductance)`
    /// sorted by neighbor index.
    Finite {
        adjacency: Vec<Vec<(usize, f64)>>,
        labels: Option<Vec<String>>,
    },
    /// Nearest-neighbor chain with a conductance rule.
    Chain { rule: WeightRule, space: IndexSpace },
    /// Cycle on `n` vertices with unit conductances.
    Cyclic { n: i64 },
    /// Periodic lattice `(Z mod extent)^dim` with unit conductances.
    Lattice { dim: usize, extent: i64 },
}

/// A connected weighted graph with positive conductances and no self-loops.
#[derive(Clone, Debug)]
pub struct GraphSystem {
    kind: GraphKind,
}

impl GraphSystem {
    /// Cycle on `n >= 3` vertices, unit conductances.
    pub fn cyclic(n: i64) -> Result<Self> {
        if n < 3 {
            return Err(LapnetError::Graph(format!(
                "cyclic graph needs at least 3 vertices, got {n}"
            )));
        }
        Ok(GraphSystem {
            kind: GraphKind::Cyclic { n },
        })
    }

    /// Chain with the given conductance rule.  Full-line chains support only
    /// the constant rule; the growing rules are half-line objects.
    pub fn chain(rule: WeightRule, space: IndexSpace) -> Result<Self> {
        if let WeightRule::Geometric(l) = rule {
            if !(l.is_finite() && l > 0.0) {
                return Err(LapnetError::Graph(format!(
                    "geometric chain ratio must be positive and finite, got {l}"
                )));
            }
        }
        if space == IndexSpace::FullLine && rule != WeightRule::Constant {
            return Err(LapnetError::Graph(
                "full-line chains support the constant rule only".into(),
            ));
        }
        Ok(GraphSystem {
            kind: GraphKind::Chain { rule, space },
        })
    }

    /// Periodic lattice `(Z mod extent)^dim`, unit conductances.
    pub fn lattice(dim: usize, extent: i64) -> Result<Self> {
        if dim == 0 {
            return Err(LapnetError::Graph("lattice dimension must be >= 1".into()));
        }
        if extent < 3 {
            return Err(LapnetError::Graph(format!(
                "lattice extent must be >= 3 so that +1 and -1 neighbors are distinct, got {extent}"
            )));
        }
        Ok(GraphSystem {
            kind: GraphKind::Lattice { dim, extent },
        })
    }

    /// Finite graph from an edge list over vertices `0..n_vertices`.
    ///
    /// Rejects self-loops, non-positive or non-finite conductances, duplicate
    /// unordered pairs, and out-of-range endpoints.  Isolated vertices are
    /// permitted here; connectivity is a separate [`validate`] concern.
    pub fn from_edges(
        n_vertices: usize,
        edges: &[(usize, usize, f64)],
        labels: Option<Vec<String>>,
    ) -> Result<Self> {
        if n_vertices == 0 {
            return Err(LapnetError::Graph("graph has no vertices".into()));
        }
        if let Some(ref l) = labels {
            if l.len() != n_vertices {
                return Err(LapnetError::Graph(format!(
                    "{} labels for {} vertices",
                    l.len(),
                    n_vertices
                )));
            }
        }
        let mut adjacency = vec![Vec::new(); n_vertices];
        let mut seen: HashMap<(usize, usize), ()> = HashMap::new();
        for &(u, v, c) in edges {
            if u >= n_vertices || v >= n_vertices {
                return Err(LapnetError::Graph(format!(
                    "edge ({u},{v}) references a vertex outside 0..{n_vertices}"
                )));
            }
            if u == v {
                return Err(LapnetError::Graph(format!("self-loop at vertex {u}")));
            }
            if !(c.is_finite() && c > 0.0) {
                return Err(LapnetError::Graph(format!(
                    "edge ({u},{v}) has non-positive conductance {c}"
                )));
            }
            let key = (u.min(v), u.max(v));
            if seen.insert(key, ()).is_some() {
                return Err(LapnetError::Graph(format!(
                    "duplicate edge between {} and {}",
                    key.0, key.1
                )));
            }
            adjacency[u].push((v, c));
            adjacency[v].push((u, c));
        }
        for row in &mut adjacency {
            row.sort_by_key(|&(j, _)| j);
        }
        Ok(GraphSystem {
            kind: GraphKind::Finite { adjacency, labels },
        })
    }

    /// Parses a builder description: `cyclic:<n>`, `chain:<rule>` (rules
    /// `constant`, `linear`, `square`, `geometric:<ratio>`), `line` for the
    /// constant chain on all of Z, or `lattice:<dim>x<extent>`.
    pub fn from_spec(spec: &str) -> Result<Self> {
        let parts: Vec<&str> = spec.split(':').collect();
        match parts.as_slice() {
            ["line"] => GraphSystem::chain(WeightRule::Constant, IndexSpace::FullLine),
            ["cyclic", n] => {
                let n: i64 = n.parse().map_err(|_| {
                    LapnetError::Graph(format!("cyclic size {n:?} is not an integer"))
                })?;
                GraphSystem::cyclic(n)
            }
            ["chain", rule] => {
                let rule = match *rule {
                    "constant" => WeightRule::Constant,
                    "linear" => WeightRule::Linear,
                    "square" => WeightRule::Square,
                    other => {
                        return Err(LapnetError::Graph(format!(
                            "unknown chain rule {other:?}; expected constant, linear, square, or geometric:<ratio>"
                        )))
                    }
                };
                GraphSystem::chain(rule, IndexSpace::HalfLine)
            }
            ["chain", "geometric", l] => {
                let l: f64 = l.parse().map_err(|_| {
                    LapnetError::Graph(format!("geometric ratio {l:?} is not a number"))
                })?;
                GraphSystem::chain(WeightRule::Geometric(l), IndexSpace::HalfLine)
            }
            ["lattice", shape] => {
                let (d, n) = shape.split_once('x').ok_or_else(|| {
                    LapnetError::Graph(format!(
                        "lattice shape {shape:?} should look like 3x16 (dim x extent)"
                    ))
                })?;
                let d: usize = d.parse().map_err(|_| {
                    LapnetError::Graph(format!("lattice dimension {d:?} is not an integer"))
                })?;
                let n: i64 = n.parse().map_err(|_| {
                    LapnetError::Graph(format!("lattice extent {n:?} is not an integer"))
                })?;
                GraphSystem::lattice(d, n)
            }
            _ => Err(LapnetError::Graph(format!(
                "unknown graph builder {spec:?}"
            ))),
        }
    }

    pub fn kind(&self) -> &GraphKind {
        &self.kind
    }

    /// Number of coordinates a vertex of this graph carries.
    pub fn coord_dim(&self) -> usize {
        match &self.kind {
            GraphKind::Lattice { dim, .. } => *dim,
            _ => 1,
        }
    }

    /// True if the vertex set is infinite (chains).
    pub fn is_infinite(&self) -> bool {
        matches!(self.kind, GraphKind::Chain { .. })
    }

    /// Vertex count for finite graph systems.
    pub fn vertex_count(&self) -> Option<usize> {
        match &self.kind {
            GraphKind::Finite { adjacency, .. } => Some(adjacency.len()),
            GraphKind::Chain { .. } => None,
            GraphKind::Cyclic { n } => Some(*n as usize),
            GraphKind::Lattice { dim, extent } => Some((*extent as usize).pow(*dim as u32)),
        }
    }

    /// Whether `x` is a vertex of this graph.
    pub fn contains(&self, x: &Vertex) -> bool {
        match &self.kind {
            GraphKind::Finite { adjacency, .. } => {
                x.0.len() == 1 && x.0[0] >= 0 && (x.0[0] as usize) < adjacency.len()
            }
            GraphKind::Chain { space, .. } => {
                x.0.len() == 1 && (*space == IndexSpace::FullLine || x.0[0] >= 0)
            }
            GraphKind::Cyclic { n } => x.0.len() == 1 && x.0[0] >= 0 && x.0[0] < *n,
            GraphKind::Lattice { dim, extent } => {
                x.0.len() == *dim && x.0.iter().all(|&c| c >= 0 && c < *extent)
            }
        }
    }

    /// Neighbors of `x` with their conductances, sorted by vertex.
    pub fn neighbors(&self, x: &Vertex) -> Result<Vec<(Vertex, f64)>> {
        if !self.contains(x) {
            return Err(LapnetError::UnknownVertex(x.to_string()));
        }
        let mut out = Vec::new();
        match &self.kind {
            GraphKind::Finite { adjacency, .. } => {
                let i = x.0[0] as usize;
                for &(j, c) in &adjacency[i] {
                    out.push((Vertex::scalar(j as i64), c));
                }
            }
            GraphKind::Chain { rule, space } => {
                let n = x.0[0];
                if *space == IndexSpace::FullLine {
                    out.push((Vertex::scalar(n - 1), 1.0));
                    out.push((Vertex::scalar(n + 1), 1.0));
                } else {
                    if n > 0 {
                        out.push((Vertex::scalar(n - 1), rule.edge(n - 1)));
                    }
                    out.push((Vertex::scalar(n + 1), rule.edge(n)));
                }
            }
            GraphKind::Cyclic { n } => {
                let k = x.0[0];
                out.push((Vertex::scalar((k + 1).rem_euclid(*n)), 1.0));
                out.push((Vertex::scalar((k - 1).rem_euclid(*n)), 1.0));
            }
            GraphKind::Lattice { dim, extent } => {
                for axis in 0..*dim {
                    for step in [1i64, -1] {
                        let mut c = x.0.clone();
                        c[axis] = (c[axis] + step).rem_euclid(*extent);
                        out.push((Vertex(c), 1.0));
                    }
                }
            }
        }
        out.sort_by(|a, b| a.0.cmp(&b.0));
        Ok(out)
    }

    /// Conductance of the edge between `x` and `y`, or `None` if they are not
    /// adjacent (or not both vertices of the graph).
    pub fn conductance(&self, x: &Vertex, y: &Vertex) -> Option<f64> {
        if !self.contains(x) || !self.contains(y) {
            return None;
        }
        self.neighbors(x)
            .ok()?
            .into_iter()
            .find(|(v, _)| v == y)
            .map(|(_, c)| c)
    }

    /// Labels of a finite explicit graph, if any.
    pub fn labels(&self) -> Option<&[String]> {
        match &self.kind {
            GraphKind::Finite { labels, .. } => labels.as_deref(),
            _ => None,
        }
    }

    /// All vertices of a finite graph system, sorted.
    pub fn all_vertices(&self) -> Option<Vec<Vertex>> {
        match &self.kind {
            GraphKind::Finite { adjacency, .. } => Some(
                (0..adjacency.len() as i64).map(Vertex::scalar).collect(),
            ),
            GraphKind::Chain { .. } => None,
            GraphKind::Cyclic { n } => Some((0..*n).map(Vertex::scalar).collect()),
            GraphKind::Lattice { dim, extent } => {
                let mut all = Vec::with_capacity((*extent as usize).pow(*dim as u32));
                let mut coords = vec![0i64; *dim];
                loop {
                    all.push(Vertex(coords.clone()));
                    let mut axis = *dim;
                    loop {
                        if axis == 0 {
                            return Some(all);
                        }
                        axis -= 1;
                        coords[axis] += 1;
                        if coords[axis] < *extent {
                            break;
                        }
                        coords[axis] = 0;
                    }
                }
            }
        }
    }

    /// Short human-readable description, used in dump headers.
    pub fn describe(&self) -> String {
        match &self.kind {
            GraphKind::Finite { adjacency, .. } => format!("finite:{}", adjacency.len()),
            GraphKind::Chain { rule, space } => match space {
                IndexSpace::HalfLine => format!("chain:{rule}"),
                IndexSpace::FullLine => "line".into(),
            },
            GraphKind::Cyclic { n } => format!("cyclic:{n}"),
            GraphKind::Lattice { dim, extent } => format!("lattice:{dim}x{extent}"),
        }
    }
}

/// A finite selection of vertices to materialize.
#[derive(Clone, Debug, PartialEq)]
pub enum Window {
    /// Contiguous index range `lo..=hi` on a chain.
    Range { lo: i64, hi: i64 },
    /// Every vertex of a finite graph system.
    All,
    /// An explicit vertex list.
    Vertices(Vec<Vertex>),
}

impl Window {
    /// Parses `"lo:hi"` into a range window.
    pub fn parse_range(s: &str) -> Result<Self> {
        let (lo, hi) = s.split_once(':').ok_or_else(|| {
            LapnetError::Window(format!("window {s:?} should look like lo:hi"))
        })?;
        let lo: i64 = lo.trim().parse().map_err(|_| {
            LapnetError::Window(format!("window bound {lo:?} is not an integer"))
        })?;
        let hi: i64 = hi.trim().parse().map_err(|_| {
            LapnetError::Window(format!("window bound {hi:?} is not an integer"))
        })?;
        Ok(Window::Range { lo, hi })
    }
}

/// A materialized window: finite vertex set, induced adjacency, crossing
/// edges, and weighted degrees.
///
/// Vertices are sorted lexicographically; all indices below refer to that
/// order.  `degree_full` is the weighted degree in the ambient graph,
/// `degree_induced` counts only edges with both ends in the window; they
/// differ exactly on the boundary vertices.
#[derive(Clone, Debug)]
pub struct WindowedGraph {
    graph: GraphSystem,
    vertices: Vec<Vertex>,
    index: HashMap<Vertex, usize>,
    adj: Vec<Vec<(usize, f64)>>,
    crossing: Vec<(usize, Vertex, f64)>,
    degree_full: Vec<f64>,
    degree_induced: Vec<f64>,
}

/// Resolves a window against a graph into its finite working form.
pub fn materialize(graph: &GraphSystem, window: &Window) -> Result<WindowedGraph> {
    let mut vertices: Vec<Vertex> = match window {
        Window::Range { lo, hi } => {
            let (rule_space, is_chain) = match graph.kind() {
                GraphKind::Chain { space, .. } => (*space, true),
                _ => (IndexSpace::HalfLine, false),
            };
            if !is_chain {
                return Err(LapnetError::Window(
                    "range windows apply to chain graphs; use an explicit vertex list or `all`"
                        .into(),
                ));
            }
            if lo > hi {
                return Err(LapnetError::Window(format!("empty window {lo}:{hi}")));
            }
            let lo = *lo;
            if rule_space == IndexSpace::HalfLine && lo < 0 {
                return Err(LapnetError::Window(format!(
                    "window {lo}:{hi} extends below 0 on a half-line chain"
                )));
            }
            (lo..=*hi).map(Vertex::scalar).collect()
        }
        Window::All => graph.all_vertices().ok_or_else(|| {
            LapnetError::Window("cannot materialize every vertex of an infinite chain".into())
        })?,
        Window::Vertices(list) => {
            if list.is_empty() {
                return Err(LapnetError::Window("empty vertex list".into()));
            }
            for v in list {
                if !graph.contains(v) {
                    return Err(LapnetError::UnknownVertex(v.to_string()));
                }
            }
            let mut list = list.clone();
            list.sort();
            list.dedup();
            list
        }
    };
    vertices.sort();

    let index: HashMap<Vertex, usize> = vertices
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, v)| (v, i))
        .collect();

    let n = vertices.len();
    let mut adj = vec![Vec::new(); n];
    let mut crossing = Vec::new();
    let mut degree_full = vec![0.0; n];
    let mut degree_induced = vec![0.0; n];

    for (i, v) in vertices.iter().enumerate() {
        for (w, c) in graph.neighbors(v)? {
            degree_full[i] += c;
            match index.get(&w) {
                Some(&j) => {
                    adj[i].push((j, c));
                    degree_induced[i] += c;
                }
                None => crossing.push((i, w, c)),
            }
        }
        adj[i].sort_by_key(|&(j, _)| j);
    }
    crossing.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));

    Ok(WindowedGraph {
        graph: graph.clone(),
        vertices,
        index,
        adj,
        crossing,
        degree_full,
        degree_induced,
    })
}

impl WindowedGraph {
    pub fn graph(&self) -> &GraphSystem {
        &self.graph
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> &Vertex {
        &self.vertices[i]
    }

    pub fn index_of(&self, v: &Vertex) -> Option<usize> {
        self.index.get(v).copied()
    }

    /// In-window neighbors of vertex `i`, as `(index, conductance)`.
    pub fn adj(&self, i: usize) -> &[(usize, f64)] {
        &self.adj[i]
    }

    /// Edges leaving the window: `(inside index, outside vertex, conductance)`,
    /// sorted by inside index then outside vertex.
    pub fn crossing(&self) -> &[(usize, Vertex, f64)] {
        &self.crossing
    }

    /// Weighted degree of vertex `i` in the ambient graph.
    pub fn degree_full(&self, i: usize) -> f64 {
        self.degree_full[i]
    }

    /// Weighted degree of vertex `i` counting in-window edges only.
    pub fn degree_induced(&self, i: usize) -> f64 {
        self.degree_induced[i]
    }

    /// Whether vertex `i` has at least one edge leaving the window.
    pub fn is_boundary(&self, i: usize) -> bool {
        self.degree_full[i] > self.degree_induced[i]
            || self.crossing.iter().any(|&(j, _, _)| j == i)
    }

    /// Indices of all boundary vertices, ascending.
    pub fn boundary_indices(&self) -> Vec<usize> {
        let mut out: Vec<usize> = self.crossing.iter().map(|&(i, _, _)| i).collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Unordered in-window edges as `(i, j, c)` with `i < j`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::new();
        for (i, row) in self.adj.iter().enumerate() {
            for &(j, c) in row {
                if i < j {
                    out.push((i, j, c));
                }
            }
        }
        out
    }

    /// True if the induced subgraph is connected.
    pub fn connected(&self) -> bool {
        if self.vertices.is_empty() {
            return false;
        }
        let mut seen = vec![false; self.len()];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(i) = stack.pop() {
            for &(j, _) in &self.adj[i] {
                if !seen[j] {
                    seen[j] = true;
                    count += 1;
                    stack.push(j);
                }
            }
        }
        count == self.len()
    }
}

// ---------------------------------------------------------------------------
// Graph files
// ---------------------------------------------------------------------------

/// Raw parse of a graph file, before axiom checking.
#[derive(Debug, Clone, Deserialize)]
pub struct RawGraph {
    pub format: String,
    #[serde(default)]
    pub labels: Option<Vec<String>>,
    pub edges: Vec<RawEdge>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct RawEdge {
    pub u: i64,
    pub v: i64,
    pub c: f64,
}

/// A single axiom violation found in a raw graph.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    BadFormatTag { found: String },
    SelfLoop { v: i64 },
    NegativeVertexId { id: i64 },
    NonPositiveConductance { u: i64, v: i64, c: f64 },
    DuplicateEdge { u: i64, v: i64 },
    LabelCountMismatch { labels: usize, vertices: usize },
    NoVertices,
    Disconnected { components: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::BadFormatTag { found } => {
                write!(f, "format tag {found:?} is not {GRAPH_FORMAT_TAG:?}")
            }
            Violation::SelfLoop { v } => write!(f, "self-loop at vertex {v}"),
            Violation::NegativeVertexId { id } => write!(f, "negative vertex id {id}"),
            Violation::NonPositiveConductance { u, v, c } => {
                write!(f, "edge ({u},{v}) has non-positive conductance {c}")
            }
            Violation::DuplicateEdge { u, v } => {
                write!(f, "duplicate edge between {u} and {v}")
            }
            Violation::LabelCountMismatch { labels, vertices } => {
                write!(f, "{labels} labels for {vertices} vertices")
            }
            Violation::NoVertices => write!(f, "graph has no vertices"),
            Violation::Disconnected { components } => {
                write!(f, "graph is disconnected ({components} components)")
            }
        }
    }
}

/// Outcome of checking a graph against the edge axioms.
#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Reads and parses a graph file without enforcing the axioms.  Parse errors
/// (bad JSON, wrong field types) are reported as [`LapnetError::GraphFile`].
pub fn read_raw_graph(path: &Path) -> Result<RawGraph> {
    let mut text = String::new();
    std::fs::File::open(path)
        .map_err(|e| LapnetError::GraphFile(format!("{}: {e}", path.display())))?
        .read_to_string(&mut text)
        .map_err(|e| LapnetError::GraphFile(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| LapnetError::GraphFile(format!("{}: {e}", path.display())))
}

/// Checks a raw graph against the axioms and reports every violation found.
pub fn validate_raw(raw: &RawGraph) -> ValidationReport {
    let mut violations = Vec::new();
    if raw.format != GRAPH_FORMAT_TAG {
        violations.push(Violation::BadFormatTag {
            found: raw.format.clone(),
        });
    }
    let mut max_id: i64 = -1;
    let mut seen: HashMap<(i64, i64), ()> = HashMap::new();
    for e in &raw.edges {
        if e.u < 0 {
            violations.push(Violation::NegativeVertexId { id: e.u });
        }
        if e.v < 0 {
            violations.push(Violation::NegativeVertexId { id: e.v });
        }
        if e.u == e.v {
            violations.push(Violation::SelfLoop { v: e.u });
        }
        if !(e.c.is_finite() && e.c > 0.0) {
            violations.push(Violation::NonPositiveConductance {
                u: e.u,
                v: e.v,
                c: e.c,
            });
        }
        max_id = max_id.max(e.u).max(e.v);
        if e.u != e.v {
            let key = (e.u.min(e.v), e.u.max(e.v));
            if seen.insert(key, ()).is_some() {
                violations.push(Violation::DuplicateEdge { u: key.0, v: key.1 });
            }
        }
    }
    let n_from_edges = (max_id + 1).max(0) as usize;
    let n_vertices = match &raw.labels {
        Some(l) => {
            if !l.is_empty() && l.len() < n_from_edges {
                violations.push(Violation::LabelCountMismatch {
                    labels: l.len(),
                    vertices: n_from_edges,
                });
            }
            n_from_edges.max(l.len())
        }
        None => n_from_edges,
    };
    if n_vertices == 0 {
        violations.push(Violation::NoVertices);
        return ValidationReport { violations };
    }
    // Connectivity over well-formed edges only.
    let mut adj = vec![Vec::new(); n_vertices];
    for e in &raw.edges {
        if e.u != e.v && e.u >= 0 && e.v >= 0 {
            adj[e.u as usize].push(e.v as usize);
            adj[e.v as usize].push(e.u as usize);
        }
    }
    let mut seen = vec![false; n_vertices];
    let mut components = 0;
    for start in 0..n_vertices {
        if seen[start] {
            continue;
        }
        components += 1;
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(i) = stack.pop() {
            for &j in &adj[i] {
                if !seen[j] {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
    }
    if components > 1 {
        violations.push(Violation::Disconnected { components });
    }
    ValidationReport { violations }
}

/// Loads a graph file strictly: any axiom violation is an error.
pub fn load_graph_file(path: &Path) -> Result<GraphSystem> {
    let raw = read_raw_graph(path)?;
    let report = validate_raw(&raw);
    if !report.is_valid() {
        let listed: Vec<String> = report
            .violations
            .iter()
            .take(5)
            .map(|v| v.to_string())
            .collect();
        return Err(LapnetError::GraphFile(format!(
            "{}: {} violation(s): {}",
            path.display(),
            report.violations.len(),
            listed.join("; ")
        )));
    }
    let n = raw
        .edges
        .iter()
        .flat_map(|e| [e.u, e.v])
        .max()
        .map(|m| (m + 1) as usize)
        .unwrap_or(0)
        .max(raw.labels.as_ref().map_or(0, |l| l.len()));
    let edges: Vec<(usize, usize, f64)> = raw
        .edges
        .iter()
        .map(|e| (e.u as usize, e.v as usize, e.c))
        .collect();
    GraphSystem::from_edges(n, &edges, raw.labels)
}

/// Writes a finite explicit graph as a graph file, edges sorted by
/// `(min endpoint, max endpoint)`.
pub fn write_graph_file(graph: &GraphSystem, path: &Path) -> Result<()> {
    let GraphKind::Finite { adjacency, labels } = graph.kind() else {
        return Err(LapnetError::Graph(
            "only finite explicit graphs can be written to a graph file".into(),
        ));
    };
    let mut edges: Vec<(usize, usize, f64)> = Vec::new();
    for (i, row) in adjacency.iter().enumerate() {
        for &(j, c) in row {
            if i < j {
                edges.push((i, j, c));
            }
        }
    }
    edges.sort_by_key(|&(u, v, _)| (u, v));

    let mut out = String::new();
    out.push_str("{\n");
    out.push_str(&format!("  \"format\": \"{GRAPH_FORMAT_TAG}\",\n"));
    if let Some(labels) = labels {
        let quoted: Vec<String> = labels
            .iter()
            .map(|l| serde_json::to_string(l).expect("string serialization"))
            .collect();
        out.push_str(&format!("  \"labels\": [{}],\n", quoted.join(", ")));
    }
    out.push_str("  \"edges\": [\n");
    for (k, (u, v, c)) in edges.iter().enumerate() {
        let comma = if k + 1 < edges.len() { "," } else { "" };
        out.push_str(&format!(
            "    {{\"u\": {u}, \"v\": {v}, \"c\": {}}}{comma}\n",
            float17(*c)
        ));
    }
    out.push_str("  ]\n}\n");

    let mut f = std::fs::File::create(path)?;
    f.write_all(out.as_bytes())?;
    Ok(())
}

/// Checks a built graph system against the axioms by sampling.
///
/// Finite systems are checked whole (including connectivity).  Chains are
/// sampled on a representative index range; the builders make violations
/// impossible, so this is a defensive re-check of the neighbor tables.
pub fn validate(graph: &GraphSystem) -> ValidationReport {
    let sample: Vec<Vertex> = match graph.kind() {
        GraphKind::Chain { space, .. } => {
            let lo = if *space == IndexSpace::FullLine { -64 } else { 0 };
            (lo..=64).map(Vertex::scalar).collect()
        }
        _ => graph.all_vertices().unwrap_or_default(),
    };
    let mut violations = Vec::new();
    if sample.is_empty() {
        violations.push(Violation::NoVertices);
        return ValidationReport { violations };
    }
    for x in &sample {
        let Ok(nbrs) = graph.neighbors(x) else {
            continue;
        };
        for (y, c) in nbrs {
            if y == *x {
                violations.push(Violation::SelfLoop { v: x.0[0] });
            }
            if !(c.is_finite() && c > 0.0) {
                violations.push(Violation::NonPositiveConductance {
                    u: x.0[0],
                    v: y.0[0],
                    c,
                });
            }
            // Symmetry: the reverse edge must exist with the same conductance.
            let back = graph.conductance(&y, x);
            if back != Some(c) {
                violations.push(Violation::DuplicateEdge { u: x.0[0], v: y.0[0] });
            }
        }
    }
    if !graph.is_infinite() {
        if let Ok(w) = materialize(graph, &Window::All) {
            if !w.connected() {
                violations.push(Violation::Disconnected { components: 2 });
            }
        }
    }
    ValidationReport { violations }
}
