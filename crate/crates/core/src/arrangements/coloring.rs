//! Two-colorings of a graph driven by edges: pick an edge uniformly and
//! paint both endpoints `+` or both `−` with a fair coin.
//!
//! States are sign vectors indexed by vertex. The same process is the walk
//! on the Boolean arrangement in ℝ^V whose faces are the `(+,+)` and `(−,−)`
//! patterns on an edge, each with weight 1/(2|E|).

use std::collections::BTreeSet;
use std::str::FromStr;

use super::{transition_matrix, Boolean, FaceWeightTable, Sign, SignVector, TransitionMatrix};
use crate::error::{Error, Result};
use crate::par::Execution;
use crate::rng::RngStream;

/// A connected simple graph. Vertex labels from the input are sorted and
/// mapped to coordinates `0..V`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    labels: Vec<u64>,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    /// Builds a graph from labelled edges.
    pub fn from_edges(edges: &[(u64, u64)]) -> Result<Self> {
        if edges.is_empty() {
            return Err(Error::InvalidArgument("graph has no edges".into()));
        }
        let labels: Vec<u64> = edges.iter().flat_map(|&(u, v)| [u, v]).collect::<BTreeSet<_>>().into_iter().collect();
        let idx = |x: u64| labels.binary_search(&x).expect("label collected above");
        let mut seen = BTreeSet::new();
        let mut out = Vec::with_capacity(edges.len());
        for &(u, v) in edges {
            if u == v {
                return Err(Error::InvalidArgument(format!("self-loop at vertex {u}")));
            }
            let (a, b) = (idx(u).min(idx(v)), idx(u).max(idx(v)));
            if !seen.insert((a, b)) {
                return Err(Error::InvalidArgument(format!("repeated edge {u} {v}")));
            }
            out.push((a, b));
        }
        let g = Self { labels, edges: out };
        if !g.is_connected() {
            return Err(Error::InvalidArgument("graph is not connected".into()));
        }
        Ok(g)
    }

    /// Path `1 − 2 − … − n`.
    pub fn path(n: usize) -> Result<Self> {
        let edges: Vec<(u64, u64)> = (1..n as u64).map(|i| (i, i + 1)).collect();
        Self::from_edges(&edges)
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[u64] {
        &self.labels
    }

    /// Edges as coordinate pairs `(a, b)` with `a < b`.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    fn is_connected(&self) -> bool {
        let n = self.vertex_count();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        let mut components = n;
        for &(a, b) in &self.edges {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra != rb {
                parent[ra] = rb;
                components -= 1;
            }
        }
        components == 1
    }
}

/// Parses one `u v` pair per line; blank lines and `#` comments are skipped.
impl FromStr for Graph {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut edges = Vec::new();
        for (lineno, line) in s.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let parts: Vec<&str> = line.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty()).collect();
            let [u, v] = parts.as_slice() else {
                return Err(Error::Parse(format!("line {}: expected two vertices", lineno + 1)));
            };
            let parse = |t: &str| t.parse::<u64>().map_err(|e| Error::Parse(format!("line {}: {t:?}: {e}", lineno + 1)));
            edges.push((parse(u)?, parse(v)?));
        }
        Self::from_edges(&edges)
    }
}

/// One step of the coloring chain.
pub fn graph_coloring_step(coloring: &SignVector, graph: &Graph, rng: &mut RngStream) -> Result<SignVector> {
    if coloring.len() != graph.vertex_count() {
        return Err(Error::DimensionMismatch { expected: graph.vertex_count(), actual: coloring.len() });
    }
    if !coloring.is_chamber() {
        return Err(Error::InvalidArgument(format!("{coloring} has an uncolored vertex")));
    }
    let (a, b) = graph.edges[rng.index(graph.edges.len())];
    let s = if rng.coin() { Sign::Plus } else { Sign::Minus };
    let mut out = coloring.clone();
    out.set(a, s);
    out.set(b, s);
    Ok(out)
}

/// The coloring chain as a face table on the Boolean arrangement of
/// dimension V.
pub fn coloring_face_weights(graph: &Graph) -> Result<FaceWeightTable<Boolean>> {
    let d = graph.vertex_count();
    let w = 1.0 / (2 * graph.edges.len()) as f64;
    let entries = graph.edges.iter().flat_map(|&(a, b)| {
        [Sign::Plus, Sign::Minus].map(move |s| {
            let mut f = SignVector::constant(d, Sign::Zero);
            f.set(a, s);
            f.set(b, s);
            (f, w)
        })
    });
    FaceWeightTable::new(Boolean::new(d)?, entries)
}

pub fn coloring_transition_matrix(graph: &Graph, exec: Execution) -> Result<TransitionMatrix<SignVector>> {
    transition_matrix(&coloring_face_weights(graph)?, exec)
}
