//! Finite simple undirected graphs, the standard generator families, and
//! real-valued functions on vertices.

use std::collections::VecDeque;
use std::fmt;
use std::ops::Deref;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::json::{format_f64, Real};

/// Immutable finite simple graph on vertices `0..n`.
///
/// Adjacency lists are sorted and deduplicated; the relation is symmetric and
/// irreflexive by construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adjacency: Vec<Vec<usize>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphDocument {
    n: usize,
    edges: Vec<[usize; 2]>,
}

impl Graph {
    /// Builds a graph from an undirected edge list. Duplicate edges (in either
    /// orientation) collapse to one; self-loops are rejected.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adjacency = vec![Vec::new(); n];
        for &(u, v) in edges {
            for index in [u, v] {
                if index >= n {
                    return Err(Error::VertexOutOfRange { index, n });
                }
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
        }
        Ok(Graph { adjacency })
    }

    /// Parses a graph document `{"n": <int>, "edges": [[u, v], ...]}`.
    pub fn from_document(text: &str) -> Result<Self> {
        let doc: GraphDocument = serde_json::from_str(text)?;
        let edges: Vec<(usize, usize)> = doc.edges.iter().map(|e| (e[0], e[1])).collect();
        Graph::from_edges(doc.n, &edges)
    }

    /// Writes the graph document with edges listed once as `u < v`, sorted.
    pub fn to_document(&self) -> String {
        let edges: Vec<String> = self
            .edges()
            .map(|(u, v)| format!("[{u}, {v}]"))
            .collect();
        format!("{{\"n\": {}, \"edges\": [{}]}}", self.vertex_count(), edges.join(", "))
    }

    pub fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Edges `(u, v)` with `u < v` in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    /// Sorted neighbors of `v`. Panics if `v` is out of range.
    #[inline]
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn is_adjacent(&self, u: usize, v: usize) -> bool {
        self.adjacency
            .get(u)
            .is_some_and(|list| list.binary_search(&v).is_ok())
    }

    pub fn check_vertex(&self, v: usize) -> Result<()> {
        if v < self.vertex_count() {
            Ok(())
        } else {
            Err(Error::VertexOutOfRange { index: v, n: self.vertex_count() })
        }
    }

    /// Checks that `values` has one entry per vertex.
    pub fn check_function(&self, values: &[f64]) -> Result<()> {
        if values.len() == self.vertex_count() {
            Ok(())
        } else {
            Err(Error::LengthMismatch { expected: self.vertex_count(), got: values.len() })
        }
    }

    /// Vertices at graph distance at most `radius` from `v`, sorted ascending.
    pub fn ball(&self, v: usize, radius: usize) -> Result<Vec<usize>> {
        self.check_vertex(v)?;
        let mut dist = vec![usize::MAX; self.vertex_count()];
        let mut queue = VecDeque::from([v]);
        dist[v] = 0;
        while let Some(u) = queue.pop_front() {
            if dist[u] == radius {
                continue;
            }
            for &w in self.neighbors(u) {
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        Ok((0..self.vertex_count()).filter(|&u| dist[u] != usize::MAX).collect())
    }

    /// True if every vertex has the same degree.
    pub fn is_regular(&self) -> bool {
        self.adjacency.windows(2).all(|w| w[0].len() == w[1].len())
    }

    pub fn generate(spec: &GeneratorSpec) -> Result<Self> {
        spec.validate()?;
        let p = &spec.params;
        let mut edges = Vec::new();
        let n = match spec.family {
            Family::Cycle => {
                let n = p[0];
                edges.extend((0..n).map(|i| (i, (i + 1) % n)));
                n
            }
            Family::Path => {
                let n = p[0];
                edges.extend((1..n).map(|i| (i - 1, i)));
                n
            }
            Family::Complete => {
                let n = p[0];
                for u in 0..n {
                    edges.extend((u + 1..n).map(|v| (u, v)));
                }
                n
            }
            Family::Hypercube => {
                let n = 1usize << p[0];
                for u in 0..n {
                    for bit in 0..p[0] {
                        let v = u ^ (1 << bit);
                        if u < v {
                            edges.push((u, v));
                        }
                    }
                }
                n
            }
            Family::Torus2d => {
                let (rows, cols) = (p[0], p[1]);
                for r in 0..rows {
                    for c in 0..cols {
                        let u = r * cols + c;
                        edges.push((u, r * cols + (c + 1) % cols));
                        edges.push((u, ((r + 1) % rows) * cols + c));
                    }
                }
                rows * cols
            }
            Family::Petersen => {
                for i in 0..5 {
                    edges.push((i, (i + 1) % 5));
                    edges.push((5 + i, 5 + (i + 2) % 5));
                    edges.push((i, i + 5));
                }
                10
            }
            Family::Star => {
                edges.extend((1..=p[0]).map(|leaf| (0, leaf)));
                p[0] + 1
            }
        };
        Graph::from_edges(n, &edges)
    }

    pub fn cycle(n: usize) -> Result<Self> {
        Graph::generate(&GeneratorSpec::new(Family::Cycle, vec![n]))
    }

    pub fn path(n: usize) -> Result<Self> {
        Graph::generate(&GeneratorSpec::new(Family::Path, vec![n]))
    }

    pub fn complete(n: usize) -> Result<Self> {
        Graph::generate(&GeneratorSpec::new(Family::Complete, vec![n]))
    }

    pub fn hypercube(dim: usize) -> Result<Self> {
        Graph::generate(&GeneratorSpec::new(Family::Hypercube, vec![dim]))
    }

    pub fn torus2d(rows: usize, cols: usize) -> Result<Self> {
        Graph::generate(&GeneratorSpec::new(Family::Torus2d, vec![rows, cols]))
    }

    pub fn petersen() -> Self {
        Graph::generate(&GeneratorSpec::new(Family::Petersen, vec![]))
            .expect("petersen takes no parameters")
    }

    pub fn star(leaves: usize) -> Result<Self> {
        Graph::generate(&GeneratorSpec::new(Family::Star, vec![leaves]))
    }
}

/// Generator families. Vertex numbering:
/// cycle and path are consecutive `0..n`; hypercube vertices are binary codes
/// with edges flipping one bit; torus2d is row-major `r * cols + c`;
/// petersen has the outer 5-cycle on `0..5`, the inner pentagram on `5..10`
/// and spokes `i -- i+5`; star has center `0` and leaves `1..=k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Cycle,
    Path,
    Complete,
    Hypercube,
    Torus2d,
    Petersen,
    Star,
}

impl Family {
    pub const ALL: [Family; 7] = [
        Family::Cycle,
        Family::Path,
        Family::Complete,
        Family::Hypercube,
        Family::Torus2d,
        Family::Petersen,
        Family::Star,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Cycle => "cycle",
            Family::Path => "path",
            Family::Complete => "complete",
            Family::Hypercube => "hypercube",
            Family::Torus2d => "torus2d",
            Family::Petersen => "petersen",
            Family::Star => "star",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::InvalidGenerator {
                family: s.to_string(),
                reason: "unknown family".into(),
            })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorSpec {
    pub family: Family,
    pub params: Vec<usize>,
}

impl GeneratorSpec {
    pub fn new(family: Family, params: Vec<usize>) -> Self {
        GeneratorSpec { family, params }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |reason: &str| {
            Err(Error::InvalidGenerator { family: self.family.to_string(), reason: reason.into() })
        };
        let arity = match self.family {
            Family::Petersen => 0,
            Family::Torus2d => 2,
            _ => 1,
        };
        if self.params.len() != arity {
            return bad(&format!("expected {arity} parameter(s), got {}", self.params.len()));
        }
        let p = &self.params;
        match self.family {
            Family::Cycle if p[0] < 3 => bad("cycle needs n >= 3"),
            Family::Path | Family::Complete if p[0] < 1 => bad("needs n >= 1"),
            Family::Hypercube if !(1..=20).contains(&p[0]) => bad("hypercube needs 1 <= dim <= 20"),
            Family::Torus2d if p[0] < 3 || p[1] < 3 => bad("torus2d needs m, n >= 3"),
            Family::Star if p[0] < 1 => bad("star needs at least one leaf"),
            _ => Ok(()),
        }
    }
}

/// Real-valued function on the vertices of a graph.
///
/// Dereferences to the underlying slice, so it can be passed wherever the
/// operator functions take `&[f64]`.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexFunction {
    values: Vec<f64>,
    positive: bool,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FunctionDocument<T> {
    values: Vec<T>,
}

impl VertexFunction {
    pub fn new(values: Vec<f64>) -> Self {
        let positive = values.iter().all(|&x| x > 0.0);
        VertexFunction { values, positive }
    }

    /// Builds a function that is required to be strictly positive.
    pub fn positive(values: Vec<f64>) -> Result<Self> {
        if let Some((vertex, &value)) = values.iter().enumerate().find(|(_, &x)| !(x > 0.0)) {
            return Err(Error::NonPositive { vertex, value });
        }
        Ok(VertexFunction { values, positive: true })
    }

    pub fn constant(n: usize, c: f64) -> Self {
        VertexFunction::new(vec![c; n])
    }

    pub fn is_positive(&self) -> bool {
        self.positive
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        VertexFunction::new(self.values.iter().map(|&x| f(x)).collect())
    }

    /// Parses `{"values": [...]}`.
    pub fn from_document(text: &str) -> Result<Self> {
        let doc: FunctionDocument<f64> = serde_json::from_str(text)?;
        Ok(VertexFunction::new(doc.values))
    }

    pub fn to_document(&self) -> String {
        let values: Vec<String> = self.values.iter().map(|&x| format_f64(x)).collect();
        format!("{{\"values\": [{}]}}", values.join(", "))
    }

    pub(crate) fn to_reals(&self) -> Vec<Real> {
        crate::json::reals(&self.values)
    }
}

impl Deref for VertexFunction {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.values
    }
}

impl From<Vec<f64>> for VertexFunction {
    fn from(values: Vec<f64>) -> Self {
        VertexFunction::new(values)
    }
}

/// Returns an error naming the first non-positive entry, if any.
pub(crate) fn require_positive(values: &[f64]) -> Result<()> {
    match values.iter().position(|&x| !(x > 0.0)) {
        Some(vertex) => Err(Error::NonPositive { vertex, value: values[vertex] }),
        None => Ok(()),
    }
}
