//! Deterministic task-to-site assignment.
//!
//! The dependency graph is reduced to a spanning forest, each tree is solved
//! exactly with the shortest-tree dynamic program over (task, site) pairs,
//! and dependencies left out of the forest are handled by single-task local
//! moves against the full objective.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::InputError;
use crate::model::Level5;

pub const DEFAULT_BRUTE_FORCE_CAP: f64 = 1e6;

/// `e[i][p]`: cost of doing task `i` at site `p`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExecCostMatrix {
    sites: usize,
    rows: Vec<Vec<f64>>,
}

impl ExecCostMatrix {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self, InputError> {
        let sites = rows.first().map_or(0, Vec::len);
        if sites == 0 {
            return Err(InputError::Dimension("cost matrix needs at least one site".into()));
        }
        for (i, r) in rows.iter().enumerate() {
            if r.len() != sites {
                return Err(InputError::Dimension(format!(
                    "row {i} has {} sites, expected {sites}",
                    r.len()
                )));
            }
            if r.iter().any(|c| !c.is_finite() || *c < 0.0) {
                return Err(InputError::Dimension(format!(
                    "row {i} has a negative or non-finite cost"
                )));
            }
        }
        Ok(Self { sites, rows })
    }

    pub fn tasks(&self) -> usize {
        self.rows.len()
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn get(&self, task: usize, site: usize) -> f64 {
        self.rows[task][site]
    }

    pub fn row(&self, task: usize) -> &[f64] {
        &self.rows[task]
    }
}

/// `s[i][j][p][q]`: overhead of the dependency between tasks `i` and `j`
/// when placed at sites `p` and `q`. Symmetric in both index pairs and zero
/// for collocated tasks. Pairs without a dependency cost nothing.
#[derive(Clone, Debug, PartialEq)]
pub struct TransCostTensor {
    tasks: usize,
    sites: usize,
    index: HashMap<(usize, usize), usize>,
    matrices: Vec<Vec<f64>>,
}

impl TransCostTensor {
    pub fn new(tasks: usize, sites: usize) -> Self {
        Self {
            tasks,
            sites,
            index: HashMap::new(),
            matrices: Vec::new(),
        }
    }

    /// Sets the site-pair matrix (row-major, `sites x sites`) for the task
    /// pair `{i, j}`.
    pub fn set(&mut self, i: usize, j: usize, matrix: Vec<f64>) -> Result<(), InputError> {
        let m = self.sites;
        if i >= self.tasks || j >= self.tasks || i == j {
            return Err(InputError::Dimension(format!("invalid task pair ({i}, {j})")));
        }
        if matrix.len() != m * m {
            return Err(InputError::Dimension(format!(
                "matrix for ({i}, {j}) has {} entries, expected {}",
                matrix.len(),
                m * m
            )));
        }
        for p in 0..m {
            if matrix[p * m + p] != 0.0 {
                return Err(InputError::Dimension(format!(
                    "collocated overhead for ({i}, {j}) at site {p} must be zero"
                )));
            }
            for q in 0..m {
                let v = matrix[p * m + q];
                if !v.is_finite() || v < 0.0 || v != matrix[q * m + p] {
                    return Err(InputError::Dimension(format!(
                        "matrix for ({i}, {j}) must be finite, non-negative and symmetric"
                    )));
                }
            }
        }
        let key = (i.min(j), i.max(j));
        match self.index.get(&key) {
            Some(&slot) => self.matrices[slot] = matrix,
            None => {
                self.index.insert(key, self.matrices.len());
                self.matrices.push(matrix);
            }
        }
        Ok(())
    }

    pub fn get(&self, i: usize, j: usize, p: usize, q: usize) -> f64 {
        match self.index.get(&(i.min(j), i.max(j))) {
            Some(&slot) => self.matrices[slot][p * self.sites + q],
            None => 0.0,
        }
    }

    pub fn sites(&self) -> usize {
        self.sites
    }
}

/// Dependency between task indices `a` and `b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TaskEdge {
    pub a: usize,
    pub b: usize,
    pub coupling: Level5,
}

impl TaskEdge {
    pub fn new(a: usize, b: usize, coupling: Level5) -> Self {
        Self { a, b, coupling }
    }
}

/// Rooted spanning forest of the dependency graph.
#[derive(Clone, Debug, PartialEq)]
pub struct Forest {
    /// Roots in order of their smallest task id.
    pub roots: Vec<usize>,
    pub parent: Vec<Option<usize>>,
    /// Children of each task in ascending index order.
    pub children: Vec<Vec<usize>>,
    pub tree_edges: Vec<TaskEdge>,
    pub residual_edges: Vec<TaskEdge>,
}

impl Forest {
    pub fn tasks(&self) -> usize {
        self.parent.len()
    }

    /// Members of the tree rooted at `root`, parents before children.
    pub fn tree_order(&self, root: usize) -> Vec<usize> {
        let mut order = Vec::new();
        let mut queue = VecDeque::from([root]);
        while let Some(n) = queue.pop_front() {
            order.push(n);
            queue.extend(self.children[n].iter().copied());
        }
        order
    }
}

struct DisjointSet {
    parent: Vec<usize>,
}

impl DisjointSet {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        true
    }
}

/// Maximum-coupling spanning forest (Kruskal). Equal couplings are taken in
/// lexicographic order of `(smaller id, larger id)`. Each tree is rooted at
/// its lexicographically smallest task id.
pub fn build_forest(task_ids: &[String], edges: &[TaskEdge]) -> Forest {
    let n = task_ids.len();
    let key = |e: &TaskEdge| {
        let (x, y) = (&task_ids[e.a], &task_ids[e.b]);
        if x <= y {
            (x.clone(), y.clone())
        } else {
            (y.clone(), x.clone())
        }
    };
    let mut sorted: Vec<&TaskEdge> = edges.iter().collect();
    sorted.sort_by(|l, r| {
        r.coupling
            .cmp(&l.coupling)
            .then_with(|| key(l).cmp(&key(r)))
    });

    let mut dsu = DisjointSet::new(n);
    let mut adjacency = vec![Vec::new(); n];
    let mut tree_edges = Vec::new();
    let mut residual_edges = Vec::new();
    for e in sorted {
        if dsu.union(e.a, e.b) {
            adjacency[e.a].push(e.b);
            adjacency[e.b].push(e.a);
            tree_edges.push(*e);
        } else {
            residual_edges.push(*e);
        }
    }

    let mut by_id: Vec<usize> = (0..n).collect();
    by_id.sort_by(|&x, &y| task_ids[x].cmp(&task_ids[y]).then(x.cmp(&y)));
    let mut parent = vec![None; n];
    let mut children = vec![Vec::new(); n];
    let mut seen = vec![false; n];
    let mut roots = Vec::new();
    for start in by_id {
        if seen[start] {
            continue;
        }
        roots.push(start);
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            let mut next: Vec<usize> = adjacency[u].iter().copied().filter(|&v| !seen[v]).collect();
            next.sort_unstable();
            for v in next {
                seen[v] = true;
                parent[v] = Some(u);
                children[u].push(v);
                queue.push_back(v);
            }
        }
    }
    for c in &mut children {
        c.sort_unstable();
    }

    Forest {
        roots,
        parent,
        children,
        tree_edges,
        residual_edges,
    }
}

/// Site index for every task, in task order. Ordered lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Assignment(pub Vec<usize>);

impl Assignment {
    pub fn site_of(&self, task: usize) -> usize {
        self.0[task]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(usize::to_string).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

/// Table of the tree dynamic program: `cost[i][p]` is the cheapest cost of
/// the subtree under `i` with `i` placed at `p`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DpTable {
    pub cost: Vec<Vec<f64>>,
    /// `choice[j][p]`: best site of child `j` when its parent sits at `p`.
    pub choice: Vec<Vec<usize>>,
}

/// Runs the shortest-tree recurrence
/// `cost(i,p) = e[i][p] + sum over children j of min_q (cost(j,q) + s[i][j][p][q])`
/// on every tree of the forest. Residual edges are ignored.
pub fn tree_dp(forest: &Forest, e: &ExecCostMatrix, s: &TransCostTensor) -> Result<DpTable, InputError> {
    let n = forest.tasks();
    if let Some(missing) = (e.tasks()..n).next() {
        return Err(InputError::MissingTask(missing));
    }
    if s.sites() != e.sites() {
        return Err(InputError::Dimension(format!(
            "{} sites in the execution costs, {} in the overheads",
            e.sites(),
            s.sites()
        )));
    }
    let m = e.sites();
    let mut cost = vec![vec![0.0; m]; n];
    let mut choice = vec![vec![0usize; m]; n];
    for &root in &forest.roots {
        for &i in forest.tree_order(root).iter().rev() {
            for p in 0..m {
                let mut total = e.get(i, p);
                for &j in &forest.children[i] {
                    let mut best = f64::INFINITY;
                    let mut best_q = 0;
                    for q in 0..m {
                        let c = cost[j][q] + s.get(i, j, p, q);
                        if c < best {
                            best = c;
                            best_q = q;
                        }
                    }
                    total += best;
                    choice[j][p] = best_q;
                }
                cost[i][p] = total;
            }
        }
    }
    Ok(DpTable { cost, choice })
}

/// Optimal assignment for the tree edges of `forest`. Ties go to the lowest
/// site index, for roots and for children alike.
pub fn optimal_tree_assignment(
    forest: &Forest,
    e: &ExecCostMatrix,
    s: &TransCostTensor,
) -> Result<Assignment, InputError> {
    let table = tree_dp(forest, e, s)?;
    Ok(assignment_from_table(forest, &table))
}

pub fn assignment_from_table(forest: &Forest, table: &DpTable) -> Assignment {
    let mut sites = vec![0usize; forest.tasks()];
    for &root in &forest.roots {
        let row = &table.cost[root];
        let mut best = 0;
        for p in 1..row.len() {
            if row[p] < row[best] {
                best = p;
            }
        }
        sites[root] = best;
        for i in forest.tree_order(root) {
            for &j in &forest.children[i] {
                sites[j] = table.choice[j][sites[i]];
            }
        }
    }
    Assignment(sites)
}

/// Full objective: execution costs plus the overhead of every dependency,
/// tree or residual.
pub fn total_cost(a: &Assignment, e: &ExecCostMatrix, s: &TransCostTensor, edges: &[TaskEdge]) -> f64 {
    let exec: f64 = a.0.iter().enumerate().map(|(i, &p)| e.get(i, p)).sum();
    let trans: f64 = edges
        .iter()
        .map(|edge| s.get(edge.a, edge.b, a.0[edge.a], a.0[edge.b]))
        .sum();
    exec + trans
}

/// Single-task moves until no move strictly lowers [`total_cost`]. Tasks are
/// scanned in index order; each moves to its best site, lowest index on ties.
pub fn local_improve(
    a: &Assignment,
    e: &ExecCostMatrix,
    s: &TransCostTensor,
    edges: &[TaskEdge],
) -> Assignment {
    let mut current = a.clone();
    let mut current_cost = total_cost(&current, e, s, edges);
    loop {
        let mut improved = false;
        for task in 0..current.len() {
            let original = current.0[task];
            let mut best_site = original;
            let mut best_cost = current_cost;
            for p in 0..e.sites() {
                if p == original {
                    continue;
                }
                current.0[task] = p;
                let c = total_cost(&current, e, s, edges);
                if c < best_cost {
                    best_cost = c;
                    best_site = p;
                }
            }
            current.0[task] = best_site;
            if best_site != original {
                current_cost = best_cost;
                improved = true;
            }
        }
        if !improved {
            return current;
        }
    }
}

/// Exhaustive minimum of [`total_cost`]. The first minimum in lexicographic
/// order wins. Refuses instances with more than `cap` assignments.
pub fn brute_force_assignment(
    e: &ExecCostMatrix,
    s: &TransCostTensor,
    edges: &[TaskEdge],
    cap: f64,
) -> Result<(Assignment, f64), InputError> {
    let (n, m) = (e.tasks(), e.sites());
    let combinations = (m as f64).powi(n as i32);
    if combinations > cap {
        return Err(InputError::SearchSpaceTooLarge { combinations, cap });
    }
    let mut current = Assignment(vec![0; n]);
    let mut best = current.clone();
    let mut best_cost = total_cost(&current, e, s, edges);
    loop {
        // odometer with the last task fastest, giving lexicographic order
        let mut d = n;
        loop {
            if d == 0 {
                return Ok((best, best_cost));
            }
            d -= 1;
            current.0[d] += 1;
            if current.0[d] < m {
                break;
            }
            current.0[d] = 0;
        }
        let c = total_cost(&current, e, s, edges);
        if c < best_cost {
            best_cost = c;
            best = current.clone();
        }
    }
}

/// Forest, tree optimum and local repair in one call.
pub fn solve(
    task_ids: &[String],
    edges: &[TaskEdge],
    e: &ExecCostMatrix,
    s: &TransCostTensor,
) -> Result<Assignment, InputError> {
    let forest = build_forest(task_ids, edges);
    let tree = optimal_tree_assignment(&forest, e, s)?;
    Ok(local_improve(&tree, e, s, edges))
}
