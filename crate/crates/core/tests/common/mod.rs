#![allow(dead_code)]

use std::collections::HashMap;

use proptest::prelude::*;
use rowalk::Graph;
use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Simple undirected graphs on 2..=max_n vertices from an edge bitmask.
pub fn graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (2..=max_n).prop_flat_map(|n| {
        let pairs = n * (n - 1) / 2;
        proptest::collection::vec(any::<bool>(), pairs).prop_map(move |mask| {
            let all = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
            let edges: Vec<_> = all.zip(mask).filter(|(_, keep)| *keep).map(|(e, _)| e).collect();
            Graph::undirected(n, &edges).unwrap()
        })
    })
}

/// [`graph`] restricted to graphs without isolated vertices.
pub fn walkable_graph(max_n: usize) -> impl Strategy<Value = Graph> {
    graph(max_n).prop_filter("isolated vertex", |g| (0..g.n()).all(|v| g.degree(v) > 0))
}

pub fn chorded_c4() -> Graph {
    Graph::undirected(4, &[(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)]).unwrap()
}

/// Chi-square p-value of `counts` against the uniform law on `cells` cells.
pub fn uniform_p_value<K>(counts: &HashMap<K, u64>, cells: usize) -> f64 {
    let total: u64 = counts.values().sum();
    let expected = total as f64 / cells as f64;
    let seen: f64 = counts.values().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    let stat = seen + (cells - counts.len()) as f64 * expected;
    1.0 - ChiSquared::new((cells - 1) as f64).unwrap().cdf(stat)
}
