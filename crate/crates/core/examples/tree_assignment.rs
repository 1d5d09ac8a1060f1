//! Solves a random task graph with the spanning-forest dynamic program plus
//! local repair, and checks it against exhaustive search.
//!
//! ```bash
//! cargo run --release --example tree_assignment -- [seed]
//! ```

use gsd_alloc::assign::{
    brute_force_assignment, build_forest, optimal_tree_assignment, solve, total_cost, ExecCostMatrix,
    TaskEdge, TransCostTensor, DEFAULT_BRUTE_FORCE_CAP,
};
use gsd_alloc::Level5;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let seed = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(7);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (tasks, sites) = (7, 3);

    let task_ids: Vec<String> = (0..tasks).map(|i| format!("t{i}")).collect();
    let mut edges: Vec<TaskEdge> = (1..tasks)
        .map(|j| TaskEdge::new(rng.random_range(0..j), j, Level5::from_index(rng.random_range(0..5)).unwrap()))
        .collect();
    // one extra edge closes a cycle
    edges.push(TaskEdge::new(0, tasks - 1, Level5::Low));

    let e = ExecCostMatrix::new(
        (0..tasks)
            .map(|_| (0..sites).map(|_| rng.random_range(0.0..3.0)).collect())
            .collect(),
    )?;
    let mut s = TransCostTensor::new(tasks, sites);
    for edge in &edges {
        let mut m = vec![0.0; sites * sites];
        for p in 0..sites {
            for q in p + 1..sites {
                let v = rng.random_range(0.0..2.0);
                m[p * sites + q] = v;
                m[q * sites + p] = v;
            }
        }
        s.set(edge.a, edge.b, m)?;
    }

    let forest = build_forest(&task_ids, &edges);
    println!("tree edges {:?}", forest.tree_edges.iter().map(|e| (e.a, e.b)).collect::<Vec<_>>());
    println!("residual   {:?}", forest.residual_edges.iter().map(|e| (e.a, e.b)).collect::<Vec<_>>());

    let tree = optimal_tree_assignment(&forest, &e, &s)?;
    let repaired = solve(&task_ids, &edges, &e, &s)?;
    let (best, best_cost) = brute_force_assignment(&e, &s, &edges, DEFAULT_BRUTE_FORCE_CAP)?;

    println!("tree optimum  {:?} cost {:.4}", tree.as_slice(), total_cost(&tree, &e, &s, &edges));
    println!("after repair  {:?} cost {:.4}", repaired.as_slice(), total_cost(&repaired, &e, &s, &edges));
    println!("brute force   {:?} cost {:.4}", best.as_slice(), best_cost);
    Ok(())
}
