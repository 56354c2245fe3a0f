use proptest::prelude::*;
use rowalk::lower_bound::{
    event_holds, gen_chosen_vertex_instance, gen_digraph_instance, run_trials, success_rate, AlwaysZero,
    DecisionRule, Family, IndexingInput, Roles, StreamAlgorithm,
};
use rowalk::oracle::{exact_pagerank, DEFAULT_TOL};
use rowalk::rng::{substream, Domain};

fn input(n: usize, seed: u64) -> IndexingInput {
    IndexingInput::random(n, &mut substream(seed, Domain::HardInstance, 9)).unwrap()
}

proptest! {
    #[test]
    fn digraph_instances_have_no_sinks(n in 1usize..12, beta in 1usize..10, seed: u64) {
        let inst = gen_digraph_instance(n, beta, &input(n, seed), seed).unwrap();
        prop_assert_eq!(inst.graph.n(), beta * n + n + 5);
        prop_assert_eq!(inst.stream.m(), inst.graph.m());
        prop_assert!((0..inst.graph.n()).all(|v| inst.graph.degree(v) >= 1));
    }

    #[test]
    fn chosen_vertex_start_is_a_leaf(n in 4usize..20, seed: u64) {
        let inst = gen_chosen_vertex_instance(n, &input(n - 3, seed), seed).unwrap();
        let Roles::ChosenVertex { a, .. } = inst.roles else { panic!("wrong roles") };
        prop_assert_eq!(inst.graph.n(), n);
        prop_assert_eq!(inst.graph.degree(a), 1);
    }

    /// When the event holds, the sinks for the hidden bit hold at least
    /// `(1 - 6/beta)(1 - alpha)^3` of the PageRank.
    #[test]
    fn sinks_for_the_hidden_bit_hold_the_mass(n in 1usize..6, seed: u64) {
        let (beta, alpha) = (116, 0.15);
        let inst = gen_digraph_instance(n, beta, &input(n, seed), seed).unwrap();
        prop_assume!(event_holds(&inst));
        let p = exact_pagerank(&inst.graph, alpha, DEFAULT_TOL).unwrap();
        let mass: f64 = (0..inst.graph.n())
            .filter(|&v| inst.roles.sink_bit(v) == Some(inst.hidden_bit()))
            .map(|v| p[v])
            .sum();
        prop_assert!(mass >= (1.0 - 6.0 / beta as f64) * (1.0 - alpha).powi(3) - 1e-6);
    }
}

#[test]
fn digraph_vertex_count() {
    let inst = gen_digraph_instance(10, 3, &input(10, 1), 1).unwrap();
    assert_eq!(inst.graph.n(), 45);
}

#[test]
fn blind_guess_is_a_coin() {
    let make = |_: &Roles| Box::new(AlwaysZero) as Box<dyn StreamAlgorithm>;
    let records = run_trials(Family::Digraph { n: 6, beta: 2 }, &make, DecisionRule::ThresholdHalf, 20_000, 8).unwrap();
    assert!((success_rate(&records) - 0.5).abs() <= 0.01);
}
