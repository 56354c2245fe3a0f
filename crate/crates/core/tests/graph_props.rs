mod common;

use proptest::prelude::*;
use rand::Rng as _;
use rowalk::rng::{substream, Domain};
use rowalk::{conforms, enumerate_templates, template_of, Graph, Walk};

fn random_walk(g: &Graph, k: usize, seed: u64) -> Walk {
    let mut rng = substream(seed, Domain::Generator, 0);
    let mut v = vec![rng.random_range(0..g.n())];
    for _ in 0..k {
        let u = *v.last().unwrap();
        v.push(g.neighbors(u)[rng.random_range(0..g.degree(u))]);
    }
    Walk(v)
}

proptest! {
    #[test]
    fn every_walk_conforms_to_exactly_one_template(g in common::walkable_graph(6), k in 1usize..=5, seed: u64) {
        let w = random_walk(&g, k, seed);
        let matching: Vec<_> = enumerate_templates(k)
            .unwrap()
            .into_iter()
            .filter(|t| conforms(&w, t, &g).unwrap())
            .collect();
        prop_assert_eq!(matching.len(), 1);
        let own = template_of(&w, &g).unwrap();
        prop_assert!(own.is_consistent());
        prop_assert_eq!(&matching[0], &own);
    }

    #[test]
    fn templates_of_prefixes_are_prefixes(g in common::walkable_graph(6), k in 1usize..=6, seed: u64) {
        let w = random_walk(&g, k, seed);
        let full = template_of(&w, &g).unwrap();
        for j in 1..=k {
            let prefix = template_of(&w.truncated(j), &g).unwrap();
            prop_assert_eq!(prefix.entries(), &full.entries()[..j]);
        }
    }

    #[test]
    fn edge_lists_round_trip(g in common::graph(8)) {
        let mut buf = Vec::new();
        g.write_edge_list(&mut buf).unwrap();
        let back = Graph::read_edge_list(buf.as_slice()).unwrap();
        prop_assert_eq!(back, g);
    }
}
