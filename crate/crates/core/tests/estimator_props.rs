use proptest::prelude::*;
use rowalk::estimators::{pagerank_from_walks, rp_from_walks, walk_cap};
use rowalk::rng::{substream, Domain};
use rowalk::Walk;

fn walks(len: usize) -> impl Strategy<Value = Vec<Walk>> {
    prop::collection::vec(prop::collection::vec(0usize..5, len + 1).prop_map(Walk), 1..60)
}

proptest! {
    #[test]
    fn rp_is_the_returning_fraction(ws in walks(3)) {
        let returned = ws.iter().filter(|w| w.vertices()[0] == w.vertices()[3]).count();
        let est = rp_from_walks(&ws);
        prop_assert_eq!(est, returned as f64 / ws.len() as f64);
        prop_assert!((0.0..=1.0).contains(&est));
    }

    #[test]
    fn pagerank_estimates_are_fractions(
        b in 1usize..30,
        alpha in 0.2f64..0.9,
        seed: u64,
        target in prop::collection::vec(any::<bool>(), 5),
    ) {
        let k_cap = walk_cap(alpha, 0.3);
        let mut rng = substream(seed, Domain::Estimator, 1);
        let ws: Vec<Walk> = (0..b * (k_cap + 1))
            .map(|i| Walk((0..=k_cap).map(|j| (i + j) % 5).collect()))
            .collect();
        let est = pagerank_from_walks(&ws, b, k_cap, alpha, &|v| target[v], &mut rng).unwrap();
        prop_assert!((0.0..=1.0).contains(&est));
        prop_assert_eq!((est * b as f64).round() / b as f64, est);
        let all = pagerank_from_walks(&ws, b, k_cap, alpha, &|_| true, &mut substream(seed, Domain::Estimator, 1)).unwrap();
        prop_assert!(all >= est);
        prop_assert!(pagerank_from_walks(&ws[1..], b, k_cap, alpha, &|_| true, &mut rng).is_err());
    }
}

#[test]
fn walk_cap_values() {
    assert_eq!(walk_cap(0.3, 0.2), 11);
    assert_eq!(walk_cap(0.15, 0.1), 31);
    assert!(rp_from_walks(&[]) == 0.0);
}
