//! Exact brute-force references for small graphs.
//!
//! Everything here is desk-scale: walk enumeration is capped at
//! [`MAX_ENUMERATED_WALKS`] and dense solves at [`MAX_DENSE_N`] vertices.

use std::collections::BTreeMap;
use std::hash::Hash;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, GraphError, Vertex, Walk};

pub const MAX_ENUMERATED_WALKS: f64 = 1e7;
pub const MAX_DENSE_N: usize = 2000;
pub const DEFAULT_TOL: f64 = 1e-12;
const MAX_POWER_ITERATIONS: usize = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("instance too large: {what} = {size:.3e} exceeds {limit:.3e}")]
    TooLarge { what: &'static str, size: f64, limit: f64 },
    #[error("vertex {0} has out-degree 0")]
    Dangling(Vertex),
    #[error("start vertex {start} outside 0..{n}")]
    StartOutOfRange { start: Vertex, n: usize },
    #[error("alpha {0} outside (0, 1)")]
    Alpha(f64),
    #[error("tolerance {0} must be positive")]
    Tolerance(f64),
    #[error("walk distributions of length {0} and {1} live on different universes")]
    MismatchedLength(usize, usize),
    #[error("walks in a sample have different lengths ({0} and {1})")]
    MixedLengths(usize, usize),
    #[error("empty sample")]
    EmptySample,
    #[error("power iteration did not reach tolerance {0}")]
    NoConvergence(f64),
    #[error("dense system is singular")]
    Singular,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Start {
    Vertex(Vertex),
    Uniform,
}

/// Probability law over walks of one fixed length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WalkDistribution {
    pub k: usize,
    pub entries: BTreeMap<Walk, f64>,
}

impl WalkDistribution {
    pub fn get(&self, w: &Walk) -> f64 {
        self.entries.get(w).copied().unwrap_or(0.0)
    }

    pub fn total(&self) -> f64 {
        self.entries.values().sum()
    }

    /// Mass by final vertex.
    pub fn endpoint_marginal(&self, n: usize) -> Vec<f64> {
        let mut out = vec![0.0; n];
        for (w, p) in &self.entries {
            out[w.end()] += p;
        }
        out
    }
}

/// Every vertex needs somewhere to go: no isolated vertices for undirected
/// graphs, no sinks for directed ones.
fn check_walkable(g: &Graph) -> Result<(), OracleError> {
    g.validate(false)?;
    for v in 0..g.n() {
        if g.degree(v) == 0 {
            return Err(if g.is_directed() {
                OracleError::Dangling(v)
            } else {
                GraphError::IsolatedVertex(v).into()
            });
        }
    }
    Ok(())
}

fn start_vector(g: &Graph, start: Start) -> Result<Vec<f64>, OracleError> {
    let n = g.n();
    match start {
        Start::Uniform => Ok(vec![1.0 / n as f64; n]),
        Start::Vertex(v) if v < n => {
            let mut p = vec![0.0; n];
            p[v] = 1.0;
            Ok(p)
        }
        Start::Vertex(start) => Err(OracleError::StartOutOfRange { start, n }),
    }
}

/// One step of the walk: `p -> p M` with `M` row-normalized adjacency.
fn step(g: &Graph, p: &[f64]) -> Vec<f64> {
    let mut next = vec![0.0; p.len()];
    for (u, &mass) in p.iter().enumerate() {
        if mass == 0.0 {
            continue;
        }
        let share = mass / g.degree(u) as f64;
        for &v in g.neighbors(u) {
            next[v] += share;
        }
    }
    next
}

/// Enumerates every `k`-step walk with its exact probability.
pub fn exact_walk_distribution(g: &Graph, start: Start, k: usize) -> Result<WalkDistribution, OracleError> {
    check_walkable(g)?;
    let p0 = start_vector(g, start)?;

    // count walks first so the guard fires before any allocation
    let mut counts: Vec<f64> = p0.iter().map(|&p| if p > 0.0 { 1.0 } else { 0.0 }).collect();
    for _ in 0..k {
        let mut next = vec![0.0; g.n()];
        for (u, &c) in counts.iter().enumerate() {
            for &v in g.neighbors(u) {
                next[v] += c;
            }
        }
        counts = next;
    }
    let total: f64 = counts.iter().sum();
    if total > MAX_ENUMERATED_WALKS {
        return Err(OracleError::TooLarge {
            what: "walk count",
            size: total,
            limit: MAX_ENUMERATED_WALKS,
        });
    }

    let mut entries = BTreeMap::new();
    let mut path = Vec::with_capacity(k + 1);
    for (v, &p) in p0.iter().enumerate() {
        if p > 0.0 {
            path.push(v);
            expand(g, k, p, &mut path, &mut entries);
            path.pop();
        }
    }
    Ok(WalkDistribution { k, entries })
}

fn expand(g: &Graph, k: usize, p: f64, path: &mut Vec<Vertex>, out: &mut BTreeMap<Walk, f64>) {
    if path.len() == k + 1 {
        out.insert(Walk(path.clone()), p);
        return;
    }
    let u = *path.last().unwrap();
    let q = p / g.degree(u) as f64;
    for &v in g.neighbors(u) {
        path.push(v);
        expand(g, k, q, path, out);
        path.pop();
    }
}

/// Endpoint law of the `k`-step walk by repeated vector-matrix products.
pub fn endpoint_distribution(g: &Graph, start: Start, k: usize) -> Result<Vec<f64>, OracleError> {
    check_walkable(g)?;
    let mut p = start_vector(g, start)?;
    for _ in 0..k {
        p = step(g, &p);
    }
    Ok(p)
}

/// Average `k`-step return probability `(1/n) sum_u p^k_u(u)`.
pub fn exact_rp(g: &Graph, k: usize) -> Result<f64, OracleError> {
    check_walkable(g)?;
    let n = g.n();
    if n > MAX_DENSE_N {
        return Err(OracleError::TooLarge {
            what: "n",
            size: n as f64,
            limit: MAX_DENSE_N as f64,
        });
    }
    let mut sum = 0.0;
    for u in 0..n {
        sum += endpoint_distribution(g, Start::Vertex(u), k)?[u];
    }
    Ok(sum / n as f64)
}

fn check_alpha(alpha: f64) -> Result<(), OracleError> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(OracleError::Alpha(alpha))
    }
}

/// PageRank with reset probability `alpha` by power iteration on
/// `p = alpha/n + (1 - alpha) p M`, stopping once successive iterates differ
/// by less than `tol` in L1.
pub fn exact_pagerank(g: &Graph, alpha: f64, tol: f64) -> Result<Vec<f64>, OracleError> {
    check_alpha(alpha)?;
    if !(tol > 0.0) {
        return Err(OracleError::Tolerance(tol));
    }
    check_walkable(g)?;
    let n = g.n();
    let reset = alpha / n as f64;
    let mut p = vec![1.0 / n as f64; n];
    for _ in 0..MAX_POWER_ITERATIONS {
        let next: Vec<f64> = step(g, &p).into_iter().map(|x| reset + (1.0 - alpha) * x).collect();
        let diff = l1(&p, &next);
        p = next;
        if diff < tol {
            return Ok(p);
        }
    }
    Err(OracleError::NoConvergence(tol))
}

/// The same fixed point via a dense LU solve of `(I - (1 - alpha) M^T) p = alpha/n`.
pub fn pagerank_dense_solve(g: &Graph, alpha: f64) -> Result<Vec<f64>, OracleError> {
    check_alpha(alpha)?;
    check_walkable(g)?;
    let n = g.n();
    if n > MAX_DENSE_N {
        return Err(OracleError::TooLarge {
            what: "n",
            size: n as f64,
            limit: MAX_DENSE_N as f64,
        });
    }
    let mut a = DMatrix::<f64>::identity(n, n);
    for u in 0..n {
        let w = (1.0 - alpha) / g.degree(u) as f64;
        for &v in g.neighbors(u) {
            a[(v, u)] -= w;
        }
    }
    let rhs = DVector::from_element(n, alpha / n as f64);
    let p = a.lu().solve(&rhs).ok_or(OracleError::Singular)?;
    Ok(p.iter().copied().collect())
}

/// `sum_{j=0..=k_max} alpha (1 - alpha)^j (uniform-start j-step endpoint law)`.
/// Its total mass is `1 - (1 - alpha)^(k_max + 1)`.
pub fn truncated_pagerank(g: &Graph, alpha: f64, k_max: usize) -> Result<Vec<f64>, OracleError> {
    check_alpha(alpha)?;
    check_walkable(g)?;
    let n = g.n();
    let mut p = vec![1.0 / n as f64; n];
    let mut out = vec![0.0; n];
    let mut weight = alpha;
    for j in 0..=k_max {
        if j > 0 {
            p = step(g, &p);
        }
        for (o, x) in out.iter_mut().zip(&p) {
            *o += weight * x;
        }
        weight *= 1.0 - alpha;
    }
    Ok(out)
}

/// `||p - alpha/n - (1 - alpha) p M||_1`.
pub fn pagerank_residual(g: &Graph, alpha: f64, p: &[f64]) -> f64 {
    let reset = alpha / g.n() as f64;
    let next: Vec<f64> = step(g, p).into_iter().map(|x| reset + (1.0 - alpha) * x).collect();
    l1(p, &next)
}

pub fn l1(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

/// Half the L1 distance between two maps over a common universe; missing keys
/// count as zero.
pub fn tv_distance_maps<K: Ord>(p: &BTreeMap<K, f64>, q: &BTreeMap<K, f64>) -> f64 {
    let mut sum = 0.0;
    for (key, &a) in p {
        sum += (a - q.get(key).copied().unwrap_or(0.0)).abs();
    }
    for (key, &b) in q {
        if !p.contains_key(key) {
            sum += b.abs();
        }
    }
    sum / 2.0
}

/// Total variation distance between two walk laws of the same length.
pub fn tv_distance(p: &WalkDistribution, q: &WalkDistribution) -> Result<f64, OracleError> {
    if p.k != q.k {
        return Err(OracleError::MismatchedLength(p.k, q.k));
    }
    Ok(tv_distance_maps(&p.entries, &q.entries))
}

/// Normalized frequencies of arbitrary outcomes.
pub fn frequencies<K: Ord + Clone + Hash, I: IntoIterator<Item = K>>(samples: I) -> BTreeMap<K, f64> {
    let mut counts: BTreeMap<K, u64> = BTreeMap::new();
    let mut total = 0u64;
    for s in samples {
        *counts.entry(s).or_default() += 1;
        total += 1;
    }
    counts.into_iter().map(|(k, c)| (k, c as f64 / total as f64)).collect()
}

pub fn empirical_distribution(samples: &[Walk]) -> Result<WalkDistribution, OracleError> {
    let first = samples.first().ok_or(OracleError::EmptySample)?;
    let k = first.len();
    if let Some(w) = samples.iter().find(|w| w.len() != k) {
        return Err(OracleError::MixedLengths(k, w.len()));
    }
    Ok(WalkDistribution {
        k,
        entries: frequencies(samples.iter().cloned()),
    })
}
