//! Simple undirected graphs in canonical CSR form, the generator families
//! used by the experiments, and the edge-list text format.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{ConfigError, ParseError};
use crate::rng::{derive_rng, StreamTag};

/// Dense node identifier in `0..n`.
pub type NodeId = u32;

/// A simple undirected graph stored as sorted adjacency lists (CSR layout).
///
/// Every constructor except [`Graph::from_adjacency_unchecked`] yields a
/// canonical graph: no self-loops, no duplicate edges, symmetric adjacency,
/// each list sorted ascending.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<NodeId>,
}

/// First invariant violation found by [`Graph::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GraphViolation {
    SelfLoop { node: NodeId },
    DuplicateEdge { u: NodeId, v: NodeId },
    OutOfRange { node: NodeId, neighbor: NodeId },
    Asymmetric { u: NodeId, v: NodeId },
    Unsorted { node: NodeId },
}

impl fmt::Display for GraphViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphViolation::SelfLoop { node } => write!(f, "self-loop at node {node}"),
            GraphViolation::DuplicateEdge { u, v } => write!(f, "duplicate edge {u}-{v}"),
            GraphViolation::OutOfRange { node, neighbor } => {
                write!(f, "node {node} lists out-of-range neighbor {neighbor}")
            }
            GraphViolation::Asymmetric { u, v } => {
                write!(f, "edge {u}->{v} has no reverse entry {v}->{u}")
            }
            GraphViolation::Unsorted { node } => {
                write!(f, "adjacency list of node {node} is not sorted ascending")
            }
        }
    }
}

impl Graph {
    /// Graph with `n` isolated nodes.
    pub fn empty(n: usize) -> Self {
        Graph {
            offsets: vec![0; n + 1],
            targets: Vec::new(),
        }
    }

    /// Builds a canonical graph from an undirected edge list.
    ///
    /// Rejects self-loops, duplicate edges (in either orientation) and
    /// endpoints outside `0..n`.
    pub fn from_edges(n: usize, edges: &[(NodeId, NodeId)]) -> Result<Self, GraphViolation> {
        let mut degree = vec![0usize; n];
        for &(u, v) in edges {
            if u == v {
                return Err(GraphViolation::SelfLoop { node: u });
            }
            for (a, b) in [(u, v), (v, u)] {
                if a as usize >= n {
                    return Err(GraphViolation::OutOfRange { node: b, neighbor: a });
                }
            }
            degree[u as usize] += 1;
            degree[v as usize] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut fill = offsets[..n].to_vec();
        let mut targets = vec![0; offsets[n]];
        for &(u, v) in edges {
            targets[fill[u as usize]] = v;
            fill[u as usize] += 1;
            targets[fill[v as usize]] = u;
            fill[v as usize] += 1;
        }
        for node in 0..n {
            let list = &mut targets[offsets[node]..offsets[node + 1]];
            list.sort_unstable();
            if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
                let (u, v) = (node as NodeId, w[0]);
                return Err(GraphViolation::DuplicateEdge {
                    u: u.min(v),
                    v: u.max(v),
                });
            }
        }
        Ok(Graph { offsets, targets })
    }

    /// Wraps raw adjacency lists without checking anything. Use
    /// [`Graph::validate`] to inspect the result.
    pub fn from_adjacency_unchecked(adjacency: Vec<Vec<NodeId>>) -> Self {
        let mut offsets = Vec::with_capacity(adjacency.len() + 1);
        offsets.push(0);
        let mut targets = Vec::new();
        for list in adjacency {
            targets.extend(list);
            offsets.push(targets.len());
        }
        Graph { offsets, targets }
    }

    pub fn n(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Number of undirected edges.
    pub fn m(&self) -> usize {
        self.targets.len() / 2
    }

    #[inline]
    pub fn neighbors(&self, v: NodeId) -> &[NodeId] {
        let v = v as usize;
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    #[inline]
    pub fn degree(&self, v: NodeId) -> usize {
        let v = v as usize;
        self.offsets[v + 1] - self.offsets[v]
    }

    #[inline]
    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.neighbors(u).binary_search(&v).is_ok()
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        0..self.n() as NodeId
    }

    /// Undirected edges as `(u, v)` with `u < v`, in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.nodes().flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .copied()
                .filter(move |&v| v > u)
                .map(move |v| (u, v))
        })
    }

    /// Checks every structural invariant and reports the first violation.
    pub fn validate(&self) -> Result<(), GraphViolation> {
        let n = self.n();
        for u in self.nodes() {
            let list = self.neighbors(u);
            for &v in list {
                if v == u {
                    return Err(GraphViolation::SelfLoop { node: u });
                }
                if v as usize >= n {
                    return Err(GraphViolation::OutOfRange { node: u, neighbor: v });
                }
            }
            for w in list.windows(2) {
                if w[0] == w[1] {
                    return Err(GraphViolation::DuplicateEdge {
                        u: u.min(w[0]),
                        v: u.max(w[0]),
                    });
                }
                if w[0] > w[1] {
                    return Err(GraphViolation::Unsorted { node: u });
                }
            }
        }
        for u in self.nodes() {
            for &v in self.neighbors(u) {
                if !self.neighbors(v).contains(&u) {
                    return Err(GraphViolation::Asymmetric { u, v });
                }
            }
        }
        Ok(())
    }

    /// Serializes to the edge-list format with an explicit `# n=` header,
    /// so isolated trailing nodes survive a round trip.
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("# n={}\n", self.n());
        for (u, v) in self.edges() {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("n", &self.n())
            .field("m", &self.m())
            .finish()
    }
}

/// Parses the edge-list text format.
///
/// Each non-comment line holds two whitespace-separated node IDs. Lines
/// starting with `#` are comments, except an optional `# n=<int>` header
/// which fixes the node count. Without the header, `n` is one more than the
/// largest ID seen.
pub fn parse_edge_list(text: &str) -> Result<Graph, ParseError> {
    let mut declared_n: Option<usize> = None;
    let mut edges: Vec<(NodeId, NodeId)> = Vec::new();
    let mut lines_of: Vec<usize> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            if let Some(value) = comment.trim().strip_prefix("n=") {
                if declared_n.is_some() || !edges.is_empty() {
                    return Err(ParseError::new(line_no, "the n= header must come first"));
                }
                let n = value
                    .trim()
                    .parse::<usize>()
                    .map_err(|_| ParseError::new(line_no, format!("bad node count {value:?}")))?;
                declared_n = Some(n);
            }
            continue;
        }
        let mut fields = line.split_whitespace();
        let (Some(a), Some(b), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(ParseError::new(line_no, format!("expected \"u v\", got {line:?}")));
        };
        let parse_id = |s: &str| {
            s.parse::<NodeId>()
                .map_err(|_| ParseError::new(line_no, format!("bad node id {s:?}")))
        };
        let (u, v) = (parse_id(a)?, parse_id(b)?);
        if u == v {
            return Err(ParseError::new(line_no, format!("self-loop at node {u}")));
        }
        if let Some(n) = declared_n {
            if u.max(v) as usize >= n {
                return Err(ParseError::new(
                    line_no,
                    format!("node id {} exceeds declared n={n}", u.max(v)),
                ));
            }
        }
        edges.push((u, v));
        lines_of.push(line_no);
    }
    let n = declared_n.unwrap_or_else(|| {
        edges
            .iter()
            .map(|&(u, v)| u.max(v) as usize + 1)
            .max()
            .unwrap_or(0)
    });
    let mut seen: Vec<(NodeId, NodeId, usize)> = edges
        .iter()
        .zip(&lines_of)
        .map(|(&(u, v), &l)| (u.min(v), u.max(v), l))
        .collect();
    seen.sort_unstable();
    if let Some(w) = seen.windows(2).find(|w| (w[0].0, w[0].1) == (w[1].0, w[1].1)) {
        let line = w[0].2.max(w[1].2);
        return Err(ParseError::new(
            line,
            format!("duplicate edge {}-{}", w[0].0, w[0].1),
        ));
    }
    Graph::from_edges(n, &edges).map_err(|e| ParseError::new(0, e.to_string()))
}

/// Generator family of a [`GraphSpec`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Family {
    /// Erdős–Rényi G(n, p).
    Gnp { n: usize, p: f64 },
    Cycle { n: usize },
    Path { n: usize },
    Complete { n: usize },
    /// Node 0 is the center.
    Star { n: usize },
    /// Uniform random labeled tree.
    Tree { n: usize },
    Grid { rows: usize, cols: usize },
    File { path: String },
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Gnp { .. } => "gnp",
            Family::Cycle { .. } => "cycle",
            Family::Path { .. } => "path",
            Family::Complete { .. } => "complete",
            Family::Star { .. } => "star",
            Family::Tree { .. } => "tree",
            Family::Grid { .. } => "grid",
            Family::File { .. } => "file",
        }
    }

    /// Node count, when known without reading a file.
    pub fn n(&self) -> Option<usize> {
        match *self {
            Family::Gnp { n, .. }
            | Family::Cycle { n }
            | Family::Path { n }
            | Family::Complete { n }
            | Family::Star { n }
            | Family::Tree { n } => Some(n),
            Family::Grid { rows, cols } => Some(rows * cols),
            Family::File { .. } => None,
        }
    }
}

/// A family plus the seed that drives its randomness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphSpec {
    pub family: Family,
    pub seed: u64,
}

impl GraphSpec {
    pub fn new(family: Family, seed: u64) -> Self {
        GraphSpec { family, seed }
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        GraphSpec {
            family: self.family.clone(),
            seed,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Gnp { n, p } => write!(f, "gnp:n={n},p={p}"),
            Family::Grid { rows, cols } => write!(f, "grid:rows={rows},cols={cols}"),
            Family::File { path } => write!(f, "file:{path}"),
            other => write!(f, "{}:n={}", other.name(), other.n().unwrap_or(0)),
        }
    }
}

/// Parses the `family:key=val,...` mini-language, e.g. `cycle:n=64`,
/// `gnp:n=256,p=0.05`, `gnp:n=1024,p=8/n`, `grid:rows=4,cols=8`,
/// `file:graphs/karate.edges`.
///
/// A probability written as `X/n` is divided by the node count.
impl FromStr for Family {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (name, rest) = s.split_once(':').unwrap_or((s, ""));
        if name == "file" {
            if rest.is_empty() {
                return Err(ConfigError::new("file family needs a path: file:<path>"));
            }
            return Ok(Family::File {
                path: rest.to_string(),
            });
        }
        let mut params: Vec<(&str, &str)> = Vec::new();
        for kv in rest.split(',').filter(|kv| !kv.is_empty()) {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| ConfigError::new(format!("expected key=value, got {kv:?}")))?;
            params.push((k.trim(), v.trim()));
        }
        let get = |key: &str| params.iter().find(|(k, _)| *k == key).map(|(_, v)| *v);
        let known: &[&str] = match name {
            "gnp" => &["n", "p"],
            "grid" => &["rows", "cols"],
            "cycle" | "path" | "complete" | "star" | "tree" => &["n"],
            other => return Err(ConfigError::new(format!("unknown graph family {other:?}"))),
        };
        if let Some((k, _)) = params.iter().find(|(k, _)| !known.contains(k)) {
            return Err(ConfigError::new(format!("unknown parameter {k:?} for {name}")));
        }
        let int = |key: &str| -> Result<usize, ConfigError> {
            let v = get(key).ok_or_else(|| ConfigError::new(format!("{name} needs {key}=")))?;
            v.parse()
                .map_err(|_| ConfigError::new(format!("{key} must be a non-negative integer, got {v:?}")))
        };
        let family = match name {
            "gnp" => {
                let n = int("n")?;
                let raw = get("p").ok_or_else(|| ConfigError::new("gnp needs p="))?;
                let p = match raw.strip_suffix("/n") {
                    Some(num) => {
                        let num: f64 = num
                            .parse()
                            .map_err(|_| ConfigError::new(format!("bad probability {raw:?}")))?;
                        if n == 0 {
                            0.0
                        } else {
                            num / n as f64
                        }
                    }
                    None => raw
                        .parse()
                        .map_err(|_| ConfigError::new(format!("bad probability {raw:?}")))?,
                };
                Family::Gnp { n, p }
            }
            "cycle" => Family::Cycle { n: int("n")? },
            "path" => Family::Path { n: int("n")? },
            "complete" => Family::Complete { n: int("n")? },
            "star" => Family::Star { n: int("n")? },
            "tree" => Family::Tree { n: int("n")? },
            "grid" => Family::Grid {
                rows: int("rows")?,
                cols: int("cols")?,
            },
            _ => unreachable!(),
        };
        family.check()?;
        Ok(family)
    }
}

impl Family {
    fn check(&self) -> Result<(), ConfigError> {
        match *self {
            Family::Gnp { p, .. } if !(0.0..=1.0).contains(&p) => {
                return Err(ConfigError::new(format!("gnp probability {p} outside [0, 1]")))
            }
            Family::Cycle { n } if n < 3 => {
                return Err(ConfigError::new(format!("cycle needs n >= 3, got {n}")))
            }
            Family::Grid { rows, cols } if rows == 0 || cols == 0 => {
                return Err(ConfigError::new("grid needs rows >= 1 and cols >= 1"))
            }
            _ => {}
        }
        if self.n() == Some(0) {
            return Err(ConfigError::new(format!("{} needs n >= 1", self.name())));
        }
        Ok(())
    }
}

/// Builds the graph described by `spec`. A pure function of the spec.
pub fn generate(spec: &GraphSpec) -> Result<Graph, ConfigError> {
    spec.family.check()?;
    let edges: Vec<(NodeId, NodeId)> = match spec.family {
        Family::Gnp { n, p } => return Ok(gnp(n, p, spec.seed)),
        Family::Cycle { n } => (0..n as NodeId)
            .map(|i| (i, (i + 1) % n as NodeId))
            .collect(),
        Family::Path { n } => (1..n as NodeId).map(|i| (i - 1, i)).collect(),
        Family::Complete { n } => {
            let n = n as NodeId;
            (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect()
        }
        Family::Star { n } => (1..n as NodeId).map(|i| (0, i)).collect(),
        Family::Tree { n } => random_tree(n, spec.seed),
        Family::Grid { rows, cols } => {
            let id = |r: usize, c: usize| (r * cols + c) as NodeId;
            let mut e = Vec::new();
            for r in 0..rows {
                for c in 0..cols {
                    if c + 1 < cols {
                        e.push((id(r, c), id(r, c + 1)));
                    }
                    if r + 1 < rows {
                        e.push((id(r, c), id(r + 1, c)));
                    }
                }
            }
            e
        }
        Family::File { ref path } => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| ConfigError::new(format!("cannot read graph file {path}: {e}")))?;
            return parse_edge_list(&text)
                .map_err(|e| ConfigError::new(format!("graph file {path}: {e}")));
        }
    };
    let n = spec.family.n().unwrap();
    Ok(Graph::from_edges(n, &edges).expect("generator families emit simple graphs"))
}

/// G(n, p) by geometric skipping over the pairs `(v, w)`, `w < v`, in
/// lexicographic order: the gap to the next edge is geometric with
/// parameter `p`, so the cost is `O(n + m)` rather than one draw per pair.
fn gnp(n: usize, p: f64, seed: u64) -> Graph {
    let mut adjacency: Vec<Vec<NodeId>> = vec![Vec::new(); n];
    if p <= 0.0 || n < 2 {
        return Graph::from_adjacency_unchecked(adjacency);
    }
    let mut rng = derive_rng(seed, 0, StreamTag::Graph);
    let log_q = (1.0 - p).ln();
    let (mut v, mut w) = (1usize, -1i64);
    while v < n {
        let skip = if p >= 1.0 {
            0.0
        } else {
            ((1.0 - rng.gen::<f64>()).ln() / log_q).floor()
        };
        // Saturating float-to-int cast keeps huge skips finite.
        w = w.saturating_add(1).saturating_add(skip as i64);
        while v < n && w >= v as i64 {
            w -= v as i64;
            v += 1;
        }
        if v < n {
            adjacency[v].push(w as NodeId);
            adjacency[w as usize].push(v as NodeId);
        }
    }
    // Node x first collects its smaller neighbors (while v = x), in
    // increasing order, then the larger ones as v grows.
    Graph::from_adjacency_unchecked(adjacency)
}

/// Uniform labeled tree decoded from a uniform Prüfer sequence.
fn random_tree(n: usize, seed: u64) -> Vec<(NodeId, NodeId)> {
    if n < 2 {
        return Vec::new();
    }
    let mut rng = derive_rng(seed, 0, StreamTag::Graph);
    let code: Vec<usize> = (0..n - 2).map(|_| rng.gen_range(0..n)).collect();
    prufer_decode(n, &code)
}

pub(crate) fn prufer_decode(n: usize, code: &[usize]) -> Vec<(NodeId, NodeId)> {
    use std::cmp::Reverse;
    use std::collections::BinaryHeap;

    let mut degree = vec![1usize; n];
    for &c in code {
        degree[c] += 1;
    }
    let mut leaves: BinaryHeap<Reverse<usize>> =
        (0..n).filter(|&v| degree[v] == 1).map(Reverse).collect();
    let mut edges = Vec::with_capacity(n - 1);
    for &c in code {
        let Reverse(leaf) = leaves.pop().expect("a Prüfer code always leaves a leaf");
        edges.push((leaf as NodeId, c as NodeId));
        degree[c] -= 1;
        if degree[c] == 1 {
            leaves.push(Reverse(c));
        }
    }
    let Reverse(a) = leaves.pop().unwrap();
    let Reverse(b) = leaves.pop().unwrap();
    edges.push((a as NodeId, b as NodeId));
    edges
}
