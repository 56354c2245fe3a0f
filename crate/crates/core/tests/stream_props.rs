mod common;

use std::collections::HashMap;

use proptest::prelude::*;
use rand::Rng as _;
use rowalk::generate::{path, star};
use rowalk::rng::{substream, Domain};
use rowalk::stream::gen_order_statistics;
use rowalk::{make_stream, Graph};

/// Arrival orders of the edges of `g`, as edge indices, over `seeds` streams.
fn arrival_orders(g: &Graph, seeds: u64) -> HashMap<Vec<usize>, u64> {
    let edges = g.edges();
    let mut counts = HashMap::new();
    for seed in 0..seeds {
        let order: Vec<usize> = make_stream(g, seed)
            .events()
            .iter()
            .map(|e| edges.iter().position(|&(u, v)| (u, v) == (e.u.min(e.v), e.u.max(e.v))).unwrap())
            .collect();
        *counts.entry(order).or_default() += 1;
    }
    counts
}

#[test]
fn arrival_orders_are_uniform() {
    let triangle = Graph::undirected(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
    for (g, cells) in [(path(3).unwrap(), 2), (triangle.clone(), 6), (star(5).unwrap(), 24), (common::chorded_c4(), 120)] {
        let counts = arrival_orders(&g, 100_000);
        assert_eq!(counts.len(), cells);
        let p = common::uniform_p_value(&counts, cells);
        assert!(p >= 1e-3, "{} edges: p = {p}", g.m());
    }
    // each of the 6 orders of a 3-edge graph at 1/6 +- 0.01
    for c in arrival_orders(&triangle, 100_000).values() {
        assert!((*c as f64 / 1e5 - 1.0 / 6.0).abs() <= 0.01);
    }
}

#[test]
fn first_order_statistic_mean() {
    let runs = 10_000;
    let firsts: Vec<f64> = (0..runs).map(|s| gen_order_statistics(100, s).next().unwrap()).collect();
    let mean = firsts.iter().sum::<f64>() / runs as f64;
    // X_(1) of 100 uniforms is Beta(1, 100)
    let sd = (100.0 / (101.0f64.powi(2) * 102.0)).sqrt();
    assert!((mean - 1.0 / 101.0).abs() <= 3.0 * sd / (runs as f64).sqrt(), "{mean}");
}

/// Two-sample Kolmogorov-Smirnov statistic.
fn ks_statistic(mut a: Vec<f64>, mut b: Vec<f64>) -> f64 {
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / a.len() as f64 - j as f64 / b.len() as f64).abs());
    }
    d
}

#[test]
fn order_statistics_match_sorted_uniforms() {
    let runs = 20_000u64;
    for n in [1usize, 2, 5, 8] {
        let streamed: Vec<Vec<f64>> = (0..runs).map(|s| gen_order_statistics(n, s).collect()).collect();
        let mut rng = substream(1, Domain::Generator, n as u64);
        let sorted: Vec<Vec<f64>> = (0..runs)
            .map(|_| {
                let mut v: Vec<f64> = (0..n).map(|_| rng.random()).collect();
                v.sort_by(f64::total_cmp);
                v
            })
            .collect();
        // critical value at significance 1e-3 for equal sample sizes
        let critical = 1.949 * (2.0 / runs as f64).sqrt();
        for idx in 0..n {
            let a = streamed.iter().map(|v| v[idx]).collect();
            let b = sorted.iter().map(|v| v[idx]).collect();
            let d = ks_statistic(a, b);
            assert!(d <= critical, "n={n} index {idx}: D = {d} > {critical}");
        }
    }
}

proptest! {
    #[test]
    fn order_statistics_are_sorted_in_open_unit_interval(n in 1usize..500, seed: u64) {
        let xs: Vec<f64> = gen_order_statistics(n, seed).collect();
        prop_assert_eq!(xs.len(), n);
        prop_assert!(xs.iter().all(|&x| x > 0.0 && x < 1.0));
        prop_assert!(xs.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn streams_hold_each_edge_once_in_order(g in common::graph(8), seed: u64) {
        let s = make_stream(&g, seed);
        prop_assert_eq!(s.m(), g.m());
        let ev = s.events();
        prop_assert!(ev.iter().all(|e| (0.0..1.0).contains(&e.t)));
        prop_assert!(ev.windows(2).all(|w| (w[0].t, w[0].tiebreak) < (w[1].t, w[1].tiebreak)));
        let mut seen: Vec<_> = ev.iter().map(|e| (e.u.min(e.v), e.u.max(e.v))).collect();
        seen.sort_unstable();
        prop_assert_eq!(seen, g.edges());
        let again = make_stream(&g, seed);
        prop_assert_eq!(again.events(), ev);
    }

    #[test]
    fn windows_tile_the_stream(g in common::graph(8), seed: u64, k in 1usize..6, frac in 0.1f64..1.0) {
        let s = make_stream(&g, seed);
        let eta = frac / k as f64;
        let mut covered = 0;
        for j in 0..k {
            covered += s.window(eta * j as f64, eta * (j + 1) as f64, false).unwrap().len();
        }
        covered += s.window(eta * k as f64, 1.0, true).unwrap().len();
        prop_assert_eq!(covered, s.m());
    }
}
