//! Return-probability and set-PageRank estimates computed from sampled walks.

use rand_distr::{Distribution, Geometric};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Vertex, Walk};
use crate::rng::{substream, Domain, Rng};
use crate::sampler::{simulate_walks, SamplerConfig, SamplerError};
use crate::stream::Stream;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EstimatorError {
    #[error("epsilon {0} outside (0, 1/2)")]
    Epsilon(f64),
    #[error("alpha {0} outside (0, 1)")]
    Alpha(f64),
    #[error("expected {expected} walks, got {got}")]
    WalkCount { expected: usize, got: usize },
    #[error("walk {index} has length {len}, expected {expected}")]
    WalkLength { index: usize, len: usize, expected: usize },
    #[error(transparent)]
    Sampler(#[from] SamplerError),
}

fn check_epsilon(epsilon: f64) -> Result<(), EstimatorError> {
    if epsilon > 0.0 && epsilon < 0.5 {
        Ok(())
    } else {
        Err(EstimatorError::Epsilon(epsilon))
    }
}

fn check_alpha(alpha: f64) -> Result<(), EstimatorError> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(EstimatorError::Alpha(alpha))
    }
}

/// Walk-length cap `K = ceil((2 / alpha) ln(1 / epsilon))`.
pub fn walk_cap(alpha: f64, epsilon: f64) -> usize {
    ((2.0 / alpha) * (1.0 / epsilon).ln()).ceil() as usize
}

/// Fraction of walks that end where they started.
pub fn rp_from_walks(walks: &[Walk]) -> f64 {
    if walks.is_empty() {
        return 0.0;
    }
    let returned = walks.iter().filter(|w| w.start() == w.end()).count();
    returned as f64 / walks.len() as f64
}

/// Estimates the average `k`-step return probability from
/// `b = ceil(D / epsilon^2)` sampled walks. `cfg.k` and `cfg.b` are replaced.
pub fn approx_rp(stream: &Stream, k: usize, epsilon: f64, cfg: &SamplerConfig) -> Result<f64, EstimatorError> {
    check_epsilon(epsilon)?;
    let cfg = SamplerConfig {
        k,
        epsilon,
        b: cfg.estimator_batch(epsilon),
        ..cfg.clone()
    };
    let walks = simulate_walks(stream, &cfg)?;
    Ok(rp_from_walks(&walks))
}

/// The set-PageRank estimate from `b * (K + 1)` walks of length at least `K`.
///
/// Block `j` holds walks `b*j .. b*(j+1)`, each read as its `j`-step prefix.
/// Each of `b` trials draws `J` with `P[J = j] = alpha (1 - alpha)^j`, skips
/// when `J > K`, and otherwise checks whether the trial's walk in block `J`
/// ends in `T`.
pub fn pagerank_from_walks(
    walks: &[Walk],
    b: usize,
    k_cap: usize,
    alpha: f64,
    in_target: &dyn Fn(Vertex) -> bool,
    rng: &mut Rng,
) -> Result<f64, EstimatorError> {
    check_alpha(alpha)?;
    let expected = b * (k_cap + 1);
    if walks.len() != expected {
        return Err(EstimatorError::WalkCount {
            expected,
            got: walks.len(),
        });
    }
    if let Some((index, w)) = walks.iter().enumerate().find(|(_, w)| w.len() < k_cap) {
        return Err(EstimatorError::WalkLength {
            index,
            len: w.len(),
            expected: k_cap,
        });
    }
    let geometric = Geometric::new(alpha).expect("alpha checked above");
    let mut hits = 0usize;
    for i in 0..b {
        let j = geometric.sample(rng);
        if j > k_cap as u64 {
            continue;
        }
        let j = j as usize;
        let w = &walks[b * j + i];
        if in_target(w.vertices()[j]) {
            hits += 1;
        }
    }
    Ok(hits as f64 / b as f64)
}

/// Estimates `p_alpha(T)` to additive `epsilon`. `cfg.k` and `cfg.b` are
/// replaced by `K` and `b * (K + 1)`.
pub fn approx_pagerank(
    stream: &Stream,
    alpha: f64,
    in_target: &dyn Fn(Vertex) -> bool,
    epsilon: f64,
    cfg: &SamplerConfig,
) -> Result<f64, EstimatorError> {
    check_alpha(alpha)?;
    check_epsilon(epsilon)?;
    let k_cap = walk_cap(alpha, epsilon);
    let b = cfg.estimator_batch(epsilon);
    let sampler_cfg = SamplerConfig {
        k: k_cap.max(1),
        epsilon,
        b: b * (k_cap + 1),
        ..cfg.clone()
    };
    let walks = simulate_walks(stream, &sampler_cfg)?;
    let mut rng = substream(cfg.seed, Domain::Estimator, 0);
    pagerank_from_walks(&walks, b, k_cap, alpha, in_target, &mut rng)
}

/// One estimator run, as emitted by the command-line tool.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateRecord {
    pub estimate: Option<f64>,
    pub b: usize,
    pub k_or_alpha: f64,
    pub epsilon: f64,
    pub seed: u64,
    pub failed: bool,
}

impl EstimateRecord {
    /// `failed` is set only for a sampler FAIL; other errors are returned.
    pub fn from_result(
        result: Result<f64, EstimatorError>,
        b: usize,
        k_or_alpha: f64,
        epsilon: f64,
        seed: u64,
    ) -> Result<Self, EstimatorError> {
        let estimate = match result {
            Ok(x) => Some(x),
            Err(EstimatorError::Sampler(SamplerError::Fail { .. })) => None,
            Err(e) => return Err(e),
        };
        Ok(EstimateRecord {
            failed: estimate.is_none(),
            estimate,
            b,
            k_or_alpha,
            epsilon,
            seed,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use crate::oracle::{exact_pagerank, truncated_pagerank, DEFAULT_TOL};
    use crate::stream::make_stream;
    use rand::Rng as _;

    fn w(v: &[usize]) -> Walk {
        Walk(v.to_vec())
    }

    #[test]
    fn cap_values() {
        assert_eq!(walk_cap(0.3, 0.2), 11);
        assert_eq!(walk_cap(0.15, 0.1), 31);
        // the truncation gap is at most epsilon / 2
        for (a, e) in [(0.3, 0.2), (0.15, 0.1), (0.9, 0.49)] {
            assert!((1.0f64 - a).powi(walk_cap(a, e) as i32) <= e / 2.0);
        }
    }

    #[test]
    fn rp_counts_returns() {
        let walks = [w(&[0, 1, 0]), w(&[0, 1, 2]), w(&[2, 1, 2]), w(&[1, 0, 1])];
        assert_eq!(rp_from_walks(&walks), 0.75);
        assert_eq!(rp_from_walks(&[]), 0.0);
    }

    /// Walks drawn exactly from the random-walk law give an unbiased estimate
    /// of the truncated PageRank mass.
    #[test]
    fn pagerank_from_exact_walks() {
        let g = Graph::undirected(4, &[(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)]).unwrap();
        let (alpha, k_cap, b) = (0.3, 11, 20_000);
        let mut rng = substream(9, Domain::Estimator, 1);
        let walks: Vec<Walk> = (0..b * (k_cap + 1))
            .map(|_| {
                let mut v = vec![rng.random_range(0..4)];
                for _ in 0..k_cap {
                    let u = *v.last().unwrap();
                    v.push(g.neighbors(u)[rng.random_range(0..g.degree(u))]);
                }
                Walk(v)
            })
            .collect();
        let est = pagerank_from_walks(&walks, b, k_cap, alpha, &|v| v == 0, &mut rng).unwrap();
        let truth = truncated_pagerank(&g, alpha, k_cap).unwrap()[0];
        assert!((est - truth).abs() < 0.015, "{est} vs {truth}");
        let full = exact_pagerank(&g, alpha, DEFAULT_TOL).unwrap()[0];
        assert!((truth - full).abs() <= 0.7f64.powi(12));
    }

    #[test]
    fn pagerank_input_checks() {
        let mut rng = substream(0, Domain::Estimator, 0);
        let walks = vec![w(&[0, 1]); 4];
        assert!(pagerank_from_walks(&walks, 2, 1, 0.5, &|_| true, &mut rng).is_ok());
        assert!(matches!(
            pagerank_from_walks(&walks, 3, 1, 0.5, &|_| true, &mut rng),
            Err(EstimatorError::WalkCount { .. })
        ));
        assert!(matches!(
            pagerank_from_walks(&walks, 1, 3, 0.5, &|_| true, &mut rng),
            Err(EstimatorError::WalkLength { index: 0, len: 1, expected: 3 })
        ));
        assert_eq!(
            pagerank_from_walks(&walks, 2, 1, 1.0, &|_| true, &mut rng),
            Err(EstimatorError::Alpha(1.0))
        );
    }

    #[test]
    fn bad_epsilon_and_fail() {
        let g = Graph::undirected(2, &[(0, 1)]).unwrap();
        let s = make_stream(&g, 0);
        let cfg = SamplerConfig::lab(1, 0.5, 1, 0);
        assert_eq!(approx_rp(&s, 1, 0.5, &cfg), Err(EstimatorError::Epsilon(0.5)));
        // either every instance succeeds (the edge lands in the first window) or none does
        let r = approx_rp(&s, 1, 0.49, &cfg.clone().with_instances(500));
        match r {
            Ok(x) => assert_eq!(x, 0.0),
            Err(e) => assert!(matches!(e, EstimatorError::Sampler(SamplerError::Fail { .. }))),
        }
        let rec = EstimateRecord::from_result(
            Err(EstimatorError::Sampler(SamplerError::Fail {
                needed: 2,
                succeeded: 1,
                instances: 3,
            })),
            2,
            1.0,
            0.2,
            7,
        )
        .unwrap();
        assert!(rec.failed && rec.estimate.is_none());
        assert_eq!(
            serde_json::to_string(&rec).unwrap(),
            r#"{"estimate":null,"b":2,"k_or_alpha":1.0,"epsilon":0.2,"seed":7,"failed":true}"#
        );
    }
}
