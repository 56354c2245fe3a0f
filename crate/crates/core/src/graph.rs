//! Simple graphs with sorted adjacency lists, plus the edge-list text format.
//!
//! Vertex ids are dense integers `0..n`. Undirected graphs store each edge in
//! both endpoint lists; directed graphs store out-neighbors only. Every graph
//! handed out by this module is simple (no self-loops, no parallel edges).

use std::fmt;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Vertex = usize;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("self-loop at vertex {0}")]
    SelfLoop(Vertex),
    #[error("parallel edge ({0}, {1})")]
    ParallelEdge(Vertex, Vertex),
    #[error("edge ({0}, {1}) references a vertex outside 0..{2}")]
    VertexOutOfRange(Vertex, Vertex, usize),
    #[error("asymmetric adjacency: {0} lists {1} but not vice versa")]
    Asymmetric(Vertex, Vertex),
    #[error("isolated vertex {0}")]
    IsolatedVertex(Vertex),
    #[error("graph has no vertices")]
    Empty,
    #[error("consecutive walk vertices {0} and {1} are not adjacent")]
    InvalidWalk(Vertex, Vertex),
    #[error("edge list line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("i/o error: {0}")]
    Io(String),
}

/// An unweighted simple graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Graph {
    n: usize,
    adjacency: Vec<Vec<Vertex>>,
    directed: bool,
}

impl Graph {
    /// Builds an undirected graph and checks that it is simple.
    pub fn undirected(n: usize, edges: &[(Vertex, Vertex)]) -> Result<Self, GraphError> {
        Self::build(n, edges, false)
    }

    /// Builds a directed graph (adjacency holds out-neighbors).
    pub fn directed(n: usize, edges: &[(Vertex, Vertex)]) -> Result<Self, GraphError> {
        Self::build(n, edges, true)
    }

    fn build(n: usize, edges: &[(Vertex, Vertex)], directed: bool) -> Result<Self, GraphError> {
        let mut adjacency = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(GraphError::VertexOutOfRange(u, v, n));
            }
            adjacency[u].push(v);
            if !directed && u != v {
                adjacency[v].push(u);
            }
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        let g = Graph {
            n,
            adjacency,
            directed,
        };
        g.validate(false)?;
        Ok(g)
    }

    /// Checks every structural invariant, reporting the first violation.
    pub fn validate(&self, require_no_isolated: bool) -> Result<(), GraphError> {
        if self.n == 0 {
            return Err(GraphError::Empty);
        }
        for (u, list) in self.adjacency.iter().enumerate() {
            for (i, &v) in list.iter().enumerate() {
                if v >= self.n {
                    return Err(GraphError::VertexOutOfRange(u, v, self.n));
                }
                if v == u {
                    return Err(GraphError::SelfLoop(u));
                }
                if i > 0 && list[i - 1] == v {
                    return Err(GraphError::ParallelEdge(u, v));
                }
                if !self.directed && self.adjacency[v].binary_search(&u).is_err() {
                    return Err(GraphError::Asymmetric(u, v));
                }
            }
        }
        if require_no_isolated {
            if let Some(v) = (0..self.n).find(|&v| self.is_isolated(v)) {
                return Err(GraphError::IsolatedVertex(v));
            }
        }
        Ok(())
    }

    fn is_isolated(&self, v: Vertex) -> bool {
        if !self.adjacency[v].is_empty() {
            return false;
        }
        // a directed sink may still have in-edges
        !self.directed || !self.adjacency.iter().any(|l| l.binary_search(&v).is_ok())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of edges (unordered pairs for undirected graphs, arcs otherwise).
    pub fn m(&self) -> usize {
        let arcs: usize = self.adjacency.iter().map(Vec::len).sum();
        if self.directed {
            arcs
        } else {
            arcs / 2
        }
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    /// Degree (out-degree for directed graphs).
    pub fn degree(&self, v: Vertex) -> usize {
        self.adjacency[v].len()
    }

    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.adjacency[v]
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        u < self.n && self.adjacency[u].binary_search(&v).is_ok()
    }

    /// Edges in canonical order: `(u, v)` with `u < v` for undirected graphs,
    /// every arc for directed ones, sorted lexicographically.
    pub fn edges(&self) -> Vec<(Vertex, Vertex)> {
        let mut out = Vec::with_capacity(self.m());
        for (u, list) in self.adjacency.iter().enumerate() {
            for &v in list {
                if self.directed || u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    /// Parses the edge-list text format.
    ///
    /// One edge per line as two whitespace-separated ids; `#` starts a comment
    /// line; a `directed` line marks a directed graph; `n=<count>` fixes the
    /// vertex count, otherwise it is the largest id plus one.
    pub fn read_edge_list<R: BufRead>(reader: R) -> Result<Self, GraphError> {
        let mut directed = false;
        let mut declared_n = None;
        let mut edges = Vec::new();
        for (idx, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| GraphError::Io(e.to_string()))?;
            let line = line.trim();
            let lineno = idx + 1;
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if line == "directed" {
                directed = true;
                continue;
            }
            if let Some(count) = line.strip_prefix("n=") {
                let count = count.trim().parse::<usize>().map_err(|e| GraphError::Parse {
                    line: lineno,
                    msg: format!("bad vertex count: {e}"),
                })?;
                declared_n = Some(count);
                continue;
            }
            let mut parts = line.split_whitespace();
            let mut next_id = || -> Result<Vertex, GraphError> {
                let tok = parts.next().ok_or_else(|| GraphError::Parse {
                    line: lineno,
                    msg: "expected two vertex ids".into(),
                })?;
                tok.parse::<Vertex>().map_err(|e| GraphError::Parse {
                    line: lineno,
                    msg: format!("bad vertex id {tok:?}: {e}"),
                })
            };
            let u = next_id()?;
            let v = next_id()?;
            if parts.next().is_some() {
                return Err(GraphError::Parse {
                    line: lineno,
                    msg: "trailing tokens after edge".into(),
                });
            }
            edges.push((u, v));
        }
        let inferred = edges.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(0);
        let n = declared_n.unwrap_or(inferred);
        Self::build(n, &edges, directed)
    }

    pub fn write_edge_list<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        if self.directed {
            writeln!(w, "directed")?;
        }
        writeln!(w, "n={}", self.n)?;
        for (u, v) in self.edges() {
            writeln!(w, "{u} {v}")?;
        }
        Ok(())
    }
}

/// A walk `(v_0, ..., v_l)`; length `l = vertices - 1` may be zero.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Walk(pub Vec<Vertex>);

impl Walk {
    pub fn new(vertices: Vec<Vertex>) -> Self {
        assert!(!vertices.is_empty(), "a walk has at least one vertex");
        Walk(vertices)
    }

    pub fn len(&self) -> usize {
        self.0.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.0
    }

    pub fn start(&self) -> Vertex {
        self.0[0]
    }

    pub fn end(&self) -> Vertex {
        *self.0.last().unwrap()
    }

    /// The walk cut down to its first `steps` steps.
    pub fn truncated(&self, steps: usize) -> Walk {
        Walk(self.0[..=steps.min(self.len())].to_vec())
    }

    /// Checks that consecutive vertices are adjacent in `g`.
    pub fn validate(&self, g: &Graph) -> Result<(), GraphError> {
        for pair in self.0.windows(2) {
            if !g.has_edge(pair[0], pair[1]) {
                return Err(GraphError::InvalidWalk(pair[0], pair[1]));
            }
        }
        Ok(())
    }
}

impl fmt::Display for Walk {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Unordered edge identity `{u, v}` used when comparing walk steps.
pub(crate) fn edge_key(u: Vertex, v: Vertex) -> (Vertex, Vertex) {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_is_valid() {
        let g = Graph::undirected(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert!(g.validate(true).is_ok());
        assert_eq!(g.m(), 3);
        assert_eq!(g.neighbors(1), &[0, 2]);
    }

    #[test]
    fn self_loop_rejected() {
        let err = Graph::undirected(4, &[(0, 1), (3, 3)]).unwrap_err();
        assert_eq!(err, GraphError::SelfLoop(3));
    }

    #[test]
    fn parallel_edge_rejected() {
        let err = Graph::undirected(2, &[(0, 1), (1, 0)]).unwrap_err();
        assert!(matches!(err, GraphError::ParallelEdge(_, _)));
    }

    #[test]
    fn isolated_vertex_reported_when_required() {
        let g = Graph::undirected(3, &[(0, 1)]).unwrap();
        assert!(g.validate(false).is_ok());
        assert_eq!(g.validate(true), Err(GraphError::IsolatedVertex(2)));
    }

    #[test]
    fn directed_sink_with_in_edges_is_not_isolated() {
        let g = Graph::directed(3, &[(0, 1), (1, 2), (2, 1)]).unwrap();
        assert!(g.validate(true).is_ok());
        assert_eq!(g.degree(0), 1);
        let lonely = Graph::directed(3, &[(0, 1)]).unwrap();
        assert_eq!(lonely.validate(true), Err(GraphError::IsolatedVertex(2)));
    }

    #[test]
    fn out_of_range_rejected() {
        assert!(matches!(
            Graph::undirected(2, &[(0, 2)]),
            Err(GraphError::VertexOutOfRange(0, 2, 2))
        ));
    }

    #[test]
    fn edge_list_round_trip() {
        let text = "# a comment\nn=5\n0 1\n1 2\n\n3 4\n";
        let g = Graph::read_edge_list(text.as_bytes()).unwrap();
        assert_eq!(g.n(), 5);
        assert_eq!(g.edges(), vec![(0, 1), (1, 2), (3, 4)]);
        let mut buf = Vec::new();
        g.write_edge_list(&mut buf).unwrap();
        assert_eq!(Graph::read_edge_list(buf.as_slice()).unwrap(), g);
    }

    #[test]
    fn edge_list_directed_and_inferred_n() {
        let g = Graph::read_edge_list("directed\n0 1\n1 0\n2 0\n".as_bytes()).unwrap();
        assert!(g.is_directed());
        assert_eq!(g.n(), 3);
        assert_eq!(g.m(), 3);
    }

    #[test]
    fn edge_list_errors_carry_line_numbers() {
        let err = Graph::read_edge_list("0 1\n1 x\n".as_bytes()).unwrap_err();
        assert!(matches!(err, GraphError::Parse { line: 2, .. }));
        let err = Graph::read_edge_list("0 1 2\n".as_bytes()).unwrap_err();
        assert!(matches!(err, GraphError::Parse { line: 1, .. }));
    }

    #[test]
    fn walk_validation() {
        let g = Graph::undirected(3, &[(0, 1), (1, 2)]).unwrap();
        assert!(Walk::new(vec![0, 1, 2, 1]).validate(&g).is_ok());
        assert_eq!(
            Walk::new(vec![0, 2]).validate(&g),
            Err(GraphError::InvalidWalk(0, 2))
        );
        assert!(Walk::new(vec![2]).validate(&g).is_ok());
        assert_eq!(Walk::new(vec![0, 1, 2]).truncated(1), Walk::new(vec![0, 1]));
    }
}
