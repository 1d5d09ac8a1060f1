mod common;

use gsd_alloc::assign::{
    brute_force_assignment, build_forest, local_improve, optimal_tree_assignment, solve, total_cost, tree_dp,
    Assignment, DEFAULT_BRUTE_FORCE_CAP,
};
use proptest::prelude::*;

use common::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn local_improve_never_raises_the_cost(seed in any::<u64>()) {
        let inst = random_cyclic_instance(&mut rng(seed));
        let start = Assignment(vec![0; inst.task_ids.len()]);
        let before = total_cost(&start, &inst.e, &inst.s, &inst.edges);
        let improved = local_improve(&start, &inst.e, &inst.s, &inst.edges);
        prop_assert!(total_cost(&improved, &inst.e, &inst.s, &inst.edges) <= before);
        // a local optimum is a fixed point
        prop_assert_eq!(local_improve(&improved, &inst.e, &inst.s, &inst.edges), improved);
    }

    #[test]
    fn dp_root_cost_is_the_tree_optimum(seed in any::<u64>()) {
        let inst = random_tree_instance(&mut rng(seed));
        let forest = build_forest(&inst.task_ids, &inst.edges);
        let table = tree_dp(&forest, &inst.e, &inst.s).unwrap();
        let sum_of_roots: f64 = forest
            .roots
            .iter()
            .map(|&r| table.cost[r].iter().copied().fold(f64::INFINITY, f64::min))
            .sum();
        let (_, best) = brute_force_assignment(&inst.e, &inst.s, &inst.edges, DEFAULT_BRUTE_FORCE_CAP).unwrap();
        prop_assert_eq!(sum_of_roots, best);
    }

    #[test]
    fn forest_partitions_the_edges(seed in any::<u64>()) {
        let inst = random_cyclic_instance(&mut rng(seed));
        let forest = build_forest(&inst.task_ids, &inst.edges);
        prop_assert_eq!(forest.tree_edges.len() + forest.residual_edges.len(), inst.edges.len());
        for e in &inst.edges {
            let in_tree = forest.tree_edges.contains(e);
            let in_residual = forest.residual_edges.contains(e);
            prop_assert!(in_tree != in_residual);
        }
        // every task belongs to exactly one tree
        let mut seen = vec![0; inst.task_ids.len()];
        for &r in &forest.roots {
            for t in forest.tree_order(r) {
                seen[t] += 1;
            }
        }
        prop_assert!(seen.iter().all(|&c| c == 1));
    }

    #[test]
    fn solving_is_deterministic(seed in any::<u64>()) {
        let inst = random_cyclic_instance(&mut rng(seed));
        let a = solve(&inst.task_ids, &inst.edges, &inst.e, &inst.s).unwrap();
        let b = solve(&inst.task_ids, &inst.edges, &inst.e, &inst.s).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn collocation_costs_only_execution(seed in any::<u64>(), site in 0usize..3) {
        let inst = random_cyclic_instance(&mut rng(seed));
        let p = site % inst.e.sites();
        let a = Assignment(vec![p; inst.task_ids.len()]);
        let exec: f64 = (0..inst.task_ids.len()).map(|i| inst.e.get(i, p)).sum();
        prop_assert_eq!(total_cost(&a, &inst.e, &inst.s, &inst.edges), exec);
    }

    #[test]
    fn tree_assignment_is_optimal_when_overheads_vanish(seed in any::<u64>()) {
        let mut r = rng(seed);
        let inst = random_tree_instance(&mut r);
        let zero = gsd_alloc::assign::TransCostTensor::new(inst.task_ids.len(), inst.e.sites());
        let forest = build_forest(&inst.task_ids, &inst.edges);
        let a = optimal_tree_assignment(&forest, &inst.e, &zero).unwrap();
        for (i, &p) in a.as_slice().iter().enumerate() {
            let row = inst.e.row(i);
            let first_min = (0..row.len()).find(|&q| row[q] == row.iter().copied().fold(f64::INFINITY, f64::min)).unwrap();
            prop_assert_eq!(p, first_min);
        }
    }
}
