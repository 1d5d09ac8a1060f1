mod common;

use std::collections::BTreeMap;

use gsd_alloc::bayes::{build_cpt, run_stream, sample_state, DiscreteDistribution, NetworkFile, NodeSpec, Sign};
use gsd_alloc::Level5;
use proptest::prelude::*;

use common::*;

fn any_sign() -> impl Strategy<Value = Sign> {
    prop_oneof![Just(Sign::Positive), Just(Sign::Negative)]
}

proptest! {
    #[test]
    fn cpt_rows_are_distributions(
        parents in proptest::collection::vec((0.1f64..5.0, any_sign()), 0..4),
        sigma in 0.05f64..3.0,
        prior in 1.0f64..=5.0,
    ) {
        let mut node = NodeSpec::root("x").with_sigma(sigma).with_prior_mean(prior);
        for (i, (w, s)) in parents.iter().enumerate() {
            node = node.with_parent(format!("p{i}"), *w, *s);
        }
        let cpt = build_cpt(&node).unwrap();
        prop_assert_eq!(cpt.rows().len(), 5usize.pow(parents.len() as u32));
        for row in cpt.rows() {
            let sum: f64 = row.probabilities().iter().sum();
            prop_assert!((sum - 1.0).abs() <= 1e-12);
            prop_assert!(row.probabilities().iter().all(|p| *p >= 0.0));
        }
    }

    #[test]
    fn single_parent_row_mean_is_monotone(sigma in 0.05f64..3.0, w in 0.1f64..5.0) {
        let cpt = build_cpt(&NodeSpec::root("x").with_parent("p", w, Sign::Positive).with_sigma(sigma)).unwrap();
        let means: Vec<f64> = Level5::ALL.iter().map(|s| cpt.row(&[*s]).mean()).collect();
        prop_assert!(means.windows(2).all(|m| m[0] <= m[1] + 1e-12), "{:?}", means);
    }

    #[test]
    fn inference_matches_enumeration(seed in any::<u64>()) {
        let mut r = rng(seed);
        let net = random_network(&mut r, 6);
        let evidence = random_evidence(&mut r, &net, 0.4);
        let oracle = joint_marginals(&net, &evidence);
        for (id, want) in oracle.iter().enumerate() {
            let got = net.marginal(id, &evidence).unwrap();
            for k in 0..5 {
                prop_assert!((got.probabilities()[k] - want[k]).abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn sampling_is_reproducible(seed in any::<u64>(), run in any::<u64>(), weights in proptest::array::uniform5(0.0f64..1.0)) {
        prop_assume!(weights.iter().sum::<f64>() > 1e-6);
        let d = DiscreteDistribution::normalize(weights).unwrap();
        let draw = || {
            let mut rng = run_stream(seed, run);
            (0..50).map(|_| sample_state(&d, &mut rng)).collect::<Vec<_>>()
        };
        let a = draw();
        prop_assert_eq!(&a, &draw());
        prop_assert!(a.iter().all(|s| d.probability(*s) > 0.0));
    }
}

#[test]
fn evidence_on_a_node_returns_a_point_mass() {
    let net = random_network(&mut rng(5), 8);
    let evidence = BTreeMap::from([(net.spec().node(0).name.clone(), Level5::High)]);
    let marginals = net.infer(&evidence).unwrap();
    assert_eq!(marginals[&net.spec().node(0).name], DiscreteDistribution::point(Level5::High));
}

#[test]
fn network_files_accept_strength_marks() {
    let file: NetworkFile = serde_json::from_str(
        r#"{
            "name": "demo",
            "nodes": [
                {"name": "a"},
                {"name": "b"},
                {"name": "c", "parents": [
                    {"name": "a", "weight": "+++"},
                    {"name": "b", "weight": "+", "sign": "negative"}
                ], "sigma": 0.5}
            ],
            "outputs": ["c"]
        }"#,
    )
    .unwrap();
    let c = &file.nodes[2];
    assert_eq!(c.parents[0].weight.0, 3.0);
    assert_eq!(c.parents[1].weight.0, 1.0);
    assert_eq!(c.parents[1].sign, Sign::Negative);
    assert_eq!(c.sigma, 0.5);
    assert_eq!(file.nodes[0].sigma, 0.75);
}
