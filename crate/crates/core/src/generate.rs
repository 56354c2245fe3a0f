//! Deterministic graph families for experiments and tests.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use thiserror::Error;

use crate::graph::{Graph, GraphError, Vertex};
use crate::rng::{substream, Domain};

/// Pairing-model attempts before [`random_regular`] gives up.
pub const REGULAR_ATTEMPTS: u64 = 10_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GenerateError {
    #[error("invalid parameters: {0}")]
    Invalid(String),
    #[error("no simple {d}-regular graph on {n} vertices after {attempts} attempts")]
    RegularFailed { n: usize, d: usize, attempts: u64 },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

fn invalid(msg: impl Into<String>) -> GenerateError {
    GenerateError::Invalid(msg.into())
}

/// `0 - 1 - ... - (n-1)`.
pub fn path(n: usize) -> Result<Graph, GenerateError> {
    if n < 2 {
        return Err(invalid("path needs n >= 2"));
    }
    let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
    Ok(Graph::undirected(n, &edges)?)
}

pub fn cycle(n: usize) -> Result<Graph, GenerateError> {
    if n < 3 {
        return Err(invalid("cycle needs n >= 3"));
    }
    let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    Ok(Graph::undirected(n, &edges)?)
}

pub fn complete(n: usize) -> Result<Graph, GenerateError> {
    if n < 2 {
        return Err(invalid("complete graph needs n >= 2"));
    }
    let edges: Vec<_> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    Ok(Graph::undirected(n, &edges)?)
}

/// Center 0 joined to leaves `1..n`.
pub fn star(n: usize) -> Result<Graph, GenerateError> {
    if n < 2 {
        return Err(invalid("star needs n >= 2"));
    }
    let edges: Vec<_> = (1..n).map(|v| (0, v)).collect();
    Ok(Graph::undirected(n, &edges)?)
}

/// Uniform simple `d`-regular graph from the pairing model, rejecting
/// pairings with loops or repeated edges.
pub fn random_regular(n: usize, d: usize, seed: u64) -> Result<Graph, GenerateError> {
    if d == 0 || d >= n {
        return Err(invalid(format!("random-regular needs 0 < d < n (n = {n}, d = {d})")));
    }
    if !(n * d).is_multiple_of(2) {
        return Err(invalid(format!("random-regular needs n*d even (n = {n}, d = {d})")));
    }
    let mut points: Vec<Vertex> = (0..n).flat_map(|v| std::iter::repeat_n(v, d)).collect();
    for attempt in 0..REGULAR_ATTEMPTS {
        let mut rng = substream(seed, Domain::Generator, attempt);
        points.shuffle(&mut rng);
        let mut seen = HashSet::with_capacity(points.len() / 2);
        let simple = points.chunks_exact(2).all(|pair| {
            let (u, v) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
            u != v && seen.insert((u, v))
        });
        if simple {
            let edges: Vec<_> = seen.into_iter().collect();
            return Ok(Graph::undirected(n, &edges)?);
        }
    }
    Err(GenerateError::RegularFailed {
        n,
        d,
        attempts: REGULAR_ATTEMPTS,
    })
}

/// Vertex-disjoint union; the `i`-th part is shifted past all earlier parts.
pub fn disjoint_union(parts: &[Graph]) -> Result<Graph, GenerateError> {
    if parts.is_empty() {
        return Err(invalid("disjoint union of nothing"));
    }
    if parts.iter().any(Graph::is_directed) {
        return Err(invalid("disjoint union takes undirected graphs"));
    }
    let mut offset = 0;
    let mut edges = Vec::new();
    for g in parts {
        edges.extend(g.edges().into_iter().map(|(u, v)| (u + offset, v + offset)));
        offset += g.n();
    }
    Ok(Graph::undirected(offset, &edges)?)
}

/// Largest vertex count [`small_graphs`] enumerates.
pub const MAX_SMALL_N: usize = 6;

/// One representative of every isomorphism class of simple graphs on
/// `2..=max_n` vertices without isolated vertices, ordered by vertex count
/// and then edge count.
pub fn small_graphs(max_n: usize) -> Result<Vec<Graph>, GenerateError> {
    if max_n > MAX_SMALL_N {
        return Err(invalid(format!("small_graphs enumerates up to {MAX_SMALL_N} vertices")));
    }
    let mut out = Vec::new();
    for n in 2..=max_n {
        let pairs: Vec<(Vertex, Vertex)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        let perms = permutations(n);
        let mut seen = HashSet::new();
        let mut found: Vec<(u32, Vec<(Vertex, Vertex)>)> = Vec::new();
        for mask in 0u32..1 << pairs.len() {
            let edges: Vec<_> = (0..pairs.len()).filter(|&i| mask >> i & 1 == 1).map(|i| pairs[i]).collect();
            let mut covered = vec![false; n];
            for &(u, v) in &edges {
                covered[u] = true;
                covered[v] = true;
            }
            if covered.contains(&false) {
                continue;
            }
            let canonical = perms
                .iter()
                .map(|p| {
                    let mut relabeled: Vec<_> = edges.iter().map(|&(u, v)| (p[u].min(p[v]), p[u].max(p[v]))).collect();
                    relabeled.sort_unstable();
                    relabeled
                })
                .min()
                .unwrap();
            if seen.insert(canonical.clone()) {
                found.push((edges.len() as u32, canonical));
            }
        }
        found.sort();
        for (_, edges) in found {
            out.push(Graph::undirected(n, &edges)?);
        }
    }
    Ok(out)
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..n {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_families() {
        let c = cycle(6).unwrap();
        assert_eq!((c.n(), c.m()), (6, 6));
        assert!((0..6).all(|v| c.degree(v) == 2));

        let s = star(5).unwrap();
        assert_eq!(s.degree(0), 4);
        assert!((1..5).all(|v| s.degree(v) == 1));

        assert_eq!(path(3).unwrap().edges(), vec![(0, 1), (1, 2)]);
        assert_eq!(complete(5).unwrap().m(), 10);
        assert!(cycle(2).is_err());
        assert!(path(1).is_err());
    }

    #[test]
    fn regular_graphs() {
        for seed in 0..200 {
            let g = random_regular(10, 3, seed).unwrap();
            g.validate(true).unwrap();
            assert!((0..10).all(|v| g.degree(v) == 3));
            assert_eq!(g, random_regular(10, 3, seed).unwrap());
        }
        assert!(random_regular(5, 3, 0).is_err());
        assert!(random_regular(4, 4, 0).is_err());
    }

    #[test]
    fn small_graph_counts() {
        // isomorphism classes without isolated vertices: 1, 2, 7, 23
        let counts: Vec<usize> = (2..=5)
            .map(|n| small_graphs(5).unwrap().iter().filter(|g| g.n() == n).count())
            .collect();
        assert_eq!(counts, vec![1, 2, 7, 23]);
        assert!(small_graphs(7).is_err());
    }

    #[test]
    fn union_of_triangles() {
        let t = complete(3).unwrap();
        let g = disjoint_union(&[t.clone(), t]).unwrap();
        assert_eq!(g.n(), 6);
        assert_eq!(g.edges(), vec![(0, 1), (0, 2), (1, 2), (3, 4), (3, 5), (4, 5)]);
    }
}
