#![allow(dead_code)]

use std::path::PathBuf;

use gsd_alloc::assign::{ExecCostMatrix, TaskEdge, TransCostTensor};
use gsd_alloc::bayes::{BayesNet, NetworkSpec, NodeSpec, Sign};
use gsd_alloc::io;
use gsd_alloc::{Level5, ProjectSpec};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn fixture_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/gsd3.json")
}

pub fn fixture() -> ProjectSpec {
    io::load_project(&fixture_path()).unwrap().project
}

pub fn level(i: usize) -> Level5 {
    Level5::from_index(i).unwrap()
}

/// Posterior marginals by summing the full joint over every unobserved node.
/// Reads only CPT rows; shares no code with variable elimination.
pub fn joint_marginals(net: &BayesNet, evidence: &[(usize, Level5)]) -> Vec<[f64; 5]> {
    let spec = net.spec();
    let n = spec.len();
    let mut fixed: Vec<Option<usize>> = vec![None; n];
    for (id, s) in evidence {
        fixed[*id] = Some(s.index());
    }
    let free: Vec<usize> = (0..n).filter(|i| fixed[*i].is_none()).collect();
    let mut state: Vec<usize> = fixed.iter().map(|f| f.unwrap_or(0)).collect();
    let mut acc = vec![[0.0f64; 5]; n];
    let mut total = 0.0;
    let combos = 5usize.pow(free.len() as u32);
    let mut parent_levels = Vec::new();
    for mut c in 0..combos {
        for &v in &free {
            state[v] = c % 5;
            c /= 5;
        }
        let mut p = 1.0;
        for node in 0..n {
            parent_levels.clear();
            parent_levels.extend(spec.parents(node).iter().map(|&q| level(state[q])));
            p *= net.cpt(node).row(&parent_levels).probabilities()[state[node]];
        }
        total += p;
        for node in 0..n {
            acc[node][state[node]] += p;
        }
    }
    for row in &mut acc {
        for x in row.iter_mut() {
            *x /= total;
        }
    }
    acc
}

/// Random DAG with up to `max_nodes` nodes, at most three parents each,
/// random weights, signs, dispersions and prior means. Nodes are listed in a
/// shuffled order so the builder has to sort them.
pub fn random_network(rng: &mut ChaCha8Rng, max_nodes: usize) -> BayesNet {
    let n = rng.random_range(1..=max_nodes);
    let mut nodes = Vec::with_capacity(n);
    for i in 0..n {
        let mut node = NodeSpec::root(format!("n{i}"))
            .with_sigma(rng.random_range(0.3..2.0))
            .with_prior_mean(rng.random_range(1.0..=5.0));
        let mut candidates: Vec<usize> = (0..i).collect();
        candidates.shuffle(rng);
        let k = rng.random_range(0..=candidates.len().min(3));
        for &p in &candidates[..k] {
            let sign = if rng.random_bool(0.5) {
                Sign::Positive
            } else {
                Sign::Negative
            };
            node = node.with_parent(format!("n{p}"), rng.random_range(0.1..3.0), sign);
        }
        nodes.push(node);
    }
    nodes.shuffle(rng);
    let outputs = vec![nodes[0].name.clone()];
    BayesNet::new(NetworkSpec::new(nodes, &outputs).unwrap()).unwrap()
}

pub fn random_evidence(rng: &mut ChaCha8Rng, net: &BayesNet, p: f64) -> Vec<(usize, Level5)> {
    let mut out = Vec::new();
    for id in 0..net.spec().len() {
        if rng.random_bool(p) {
            out.push((id, level(rng.random_range(0..5))));
        }
    }
    out
}

/// An assignment instance with costs on a 1/64 grid, so sums are exact in
/// floating point and minima compare with `==`.
pub struct Instance {
    pub task_ids: Vec<String>,
    pub edges: Vec<TaskEdge>,
    pub e: ExecCostMatrix,
    pub s: TransCostTensor,
}

fn grid(rng: &mut ChaCha8Rng) -> f64 {
    f64::from(rng.random_range(0u32..=64)) / 64.0
}

pub fn instance_with_edges(rng: &mut ChaCha8Rng, n: usize, m: usize, pairs: &[(usize, usize)]) -> Instance {
    let task_ids: Vec<String> = (0..n).map(|i| format!("t{i}")).collect();
    let e = ExecCostMatrix::new((0..n).map(|_| (0..m).map(|_| grid(rng)).collect()).collect()).unwrap();
    let mut s = TransCostTensor::new(n, m);
    let mut edges = Vec::with_capacity(pairs.len());
    for &(a, b) in pairs {
        let mut matrix = vec![0.0; m * m];
        for p in 0..m {
            for q in p + 1..m {
                let v = grid(rng);
                matrix[p * m + q] = v;
                matrix[q * m + p] = v;
            }
        }
        s.set(a, b, matrix).unwrap();
        edges.push(TaskEdge::new(a, b, level(rng.random_range(0..5))));
    }
    Instance { task_ids, edges, e, s }
}

/// Random forest (a tree, with some edges dropped) over a shuffled labelling.
pub fn random_tree_instance(rng: &mut ChaCha8Rng) -> Instance {
    let n = rng.random_range(1..=6);
    let m = rng.random_range(1..=3);
    let mut label: Vec<usize> = (0..n).collect();
    label.shuffle(rng);
    let mut pairs = Vec::new();
    for i in 1..n {
        if rng.random_bool(0.85) {
            pairs.push((label[rng.random_range(0..i)], label[i]));
        }
    }
    instance_with_edges(rng, n, m, &pairs)
}

/// Connected or not, but always with at least one cycle.
pub fn random_cyclic_instance(rng: &mut ChaCha8Rng) -> Instance {
    let n = rng.random_range(3..=6);
    let m = rng.random_range(2..=3);
    let mut all: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
    all.shuffle(rng);
    // n or more edges on n vertices always close a cycle
    let k = rng.random_range(n..=all.len().min(9));
    instance_with_edges(rng, n, m, &all[..k])
}

/// Minimal valid project JSON with the given sites; tasks form a chain.
pub fn small_project(tasks: usize, sites: &[(&str, f64, u8)], weights: (f64, f64, f64)) -> serde_json::Value {
    use serde_json::json;
    let task_values: Vec<_> = (0..tasks)
        .map(|i| {
            json!({
                "id": format!("T{i}"),
                "size": 3,
                "required_knowledge": {"dev": 3},
                "customer_interaction": 2
            })
        })
        .collect();
    let edges: Vec<_> = (1..tasks)
        .map(|i| json!({"from_task": format!("T{}", i - 1), "to_task": format!("T{i}"), "coupling": 3}))
        .collect();
    let site_values: Vec<_> = sites
        .iter()
        .map(|(id, rate, skill)| {
            json!({
                "id": id,
                "cost_rate": rate,
                "staff_capability": skill,
                "process_maturity": 3,
                "proximity_to_customer": 3,
                "available_knowledge": {"dev": skill}
            })
        })
        .collect();
    let mut pairs = Vec::new();
    for (i, a) in sites.iter().enumerate() {
        for b in &sites[i + 1..] {
            pairs.push(json!({
                "site_a": a.0, "site_b": b.0,
                "time_zone_shift": 3.0, "cultural_difference": 3, "language_difference": 2,
                "infrastructure_quality": 3, "collaboration_history": 3
            }));
        }
    }
    json!({
        "tasks": task_values,
        "edges": edges,
        "sites": site_values,
        "site_pairs": pairs,
        "weights": {"w_cost": weights.0, "w_time": weights.1, "w_quality": weights.2},
        "model_config": "default",
        "breakpoints": {"cost_rate": [25.0, 50.0, 75.0, 90.0]}
    })
}

pub fn parse(value: serde_json::Value) -> ProjectSpec {
    io::parse_project_value(value).unwrap().project
}
