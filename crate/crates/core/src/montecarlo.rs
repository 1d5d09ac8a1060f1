//! Monte Carlo ranking of assignments.
//!
//! Cost distributions are computed once per (task, site) and (dependency,
//! site pair). Every run draws one level from each distribution, turns the
//! draws into scalar costs with the goal weights, solves the resulting
//! deterministic instance and records the winning assignment. Assignments
//! are returned by decreasing number of wins.

use std::collections::BTreeMap;
use std::path::Path;

use indexmap::IndexMap;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::assign::{self, Assignment, ExecCostMatrix, TaskEdge, TransCostTensor};
use crate::bayes::{run_stream, sample_state, RunRng};
use crate::cost_model::{scalarize, CostTriple, ModelConfig, ProjectCosts};
use crate::error::{Error, InputError};
use crate::model::{GoalWeights, Level5, ProjectSpec};

pub const DEFAULT_RUNS: u64 = 1000;

/// Tally of winning assignments.
#[derive(Clone, Debug, PartialEq)]
pub struct RankedAssignments {
    pub runs: u64,
    pub seed: u64,
    pub weights: GoalWeights,
    pub task_ids: Vec<String>,
    pub site_ids: Vec<String>,
    /// By decreasing count, ties in lexicographic assignment order.
    pub entries: Vec<RankedEntry>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RankedEntry {
    pub assignment: Assignment,
    pub count: u64,
    pub frequency: f64,
}

impl RankedAssignments {
    fn from_tally(
        tally: BTreeMap<Assignment, u64>,
        runs: u64,
        seed: u64,
        weights: GoalWeights,
        task_ids: Vec<String>,
        site_ids: Vec<String>,
    ) -> Self {
        let mut entries: Vec<RankedEntry> = tally
            .into_iter()
            .map(|(assignment, count)| RankedEntry {
                assignment,
                count,
                frequency: count as f64 / runs as f64,
            })
            .collect();
        // stable sort keeps the BTreeMap's lexicographic order among equal counts
        entries.sort_by(|a, b| b.count.cmp(&a.count));
        Self {
            runs,
            seed,
            weights,
            task_ids,
            site_ids,
            entries,
        }
    }

    pub fn top(&self) -> Option<&RankedEntry> {
        self.entries.first()
    }

    pub fn truncate(&mut self, k: usize) {
        self.entries.truncate(k);
    }

    /// Task id to site id for one assignment, in task order.
    pub fn named(&self, a: &Assignment) -> IndexMap<String, String> {
        self.task_ids
            .iter()
            .zip(a.as_slice())
            .map(|(t, &s)| (t.clone(), self.site_ids[s].clone()))
            .collect()
    }

    pub fn count_of(&self, a: &Assignment) -> u64 {
        self.entries
            .iter()
            .find(|e| &e.assignment == a)
            .map_or(0, |e| e.count)
    }

    pub fn to_document(&self) -> RankedDocument {
        RankedDocument {
            runs: self.runs,
            seed: self.seed,
            weights: self.weights,
            sites: self.site_ids.clone(),
            assignments: self
                .entries
                .iter()
                .enumerate()
                .map(|(i, e)| RankedDocumentEntry {
                    rank: i + 1,
                    count: e.count,
                    frequency: e.frequency,
                    assignment: self.named(&e.assignment),
                })
                .collect(),
        }
    }

    /// Plain-text table: one block per assignment, one row per task with an
    /// `X` under its site.
    pub fn to_table(&self) -> String {
        let width = self
            .task_ids
            .iter()
            .map(String::len)
            .max()
            .unwrap_or(4)
            .max(4);
        let col = self.site_ids.iter().map(String::len).max().unwrap_or(1).max(3);
        let mut out = format!(
            "{} runs, seed {}, weights cost {:.2} / time {:.2} / quality {:.2}\n",
            self.runs, self.seed, self.weights.w_cost, self.weights.w_time, self.weights.w_quality
        );
        for (rank, e) in self.entries.iter().enumerate() {
            out.push_str(&format!(
                "\n{}.: {:.1}% ({} runs)\n",
                rank + 1,
                e.frequency * 100.0,
                e.count
            ));
            out.push_str(&format!("  {:width$}", ""));
            for s in &self.site_ids {
                out.push_str(&format!(" {s:^col$}"));
            }
            out.push('\n');
            for (t, &site) in self.task_ids.iter().zip(e.assignment.as_slice()) {
                out.push_str(&format!("  {t:width$}"));
                for p in 0..self.site_ids.len() {
                    let mark = if p == site { "X" } else { "" };
                    out.push_str(&format!(" {mark:^col$}"));
                }
                out.push('\n');
            }
        }
        out
    }
}

/// JSON form of [`RankedAssignments`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankedDocument {
    pub runs: u64,
    pub seed: u64,
    pub weights: GoalWeights,
    pub sites: Vec<String>,
    pub assignments: Vec<RankedDocumentEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankedDocumentEntry {
    pub rank: usize,
    pub count: u64,
    pub frequency: f64,
    /// Task id to site id, in task order.
    pub assignment: IndexMap<String, String>,
}

/// One draw of every cost level.
#[derive(Clone, Debug)]
pub struct SampledLevels {
    /// `exec[i * sites + p]`
    pub exec: Vec<[Level5; 3]>,
    /// `trans[edge][p * sites + q]`, symmetric, very low on the diagonal.
    pub trans: Vec<Vec<[Level5; 3]>>,
}

/// Precomputed cost distributions of a project, ready for sampling.
#[derive(Clone, Debug)]
pub struct Engine {
    task_ids: Vec<String>,
    site_ids: Vec<String>,
    edges: Vec<TaskEdge>,
    weights: GoalWeights,
    costs: ProjectCosts,
}

impl Engine {
    /// Validates the project and computes every cost distribution.
    pub fn new(project: &ProjectSpec, cfg: &ModelConfig) -> Result<Self, Error> {
        let report = project.validate();
        if !report.is_valid() {
            return Err(Error::Invalid(report));
        }
        let weights = project.weights.normalized()?;
        let costs = ProjectCosts::compute(project, cfg)?;
        let edges = project
            .edges
            .iter()
            .map(|e| {
                TaskEdge::new(
                    project.task_index(&e.from_task).unwrap(),
                    project.task_index(&e.to_task).unwrap(),
                    e.coupling,
                )
            })
            .collect();
        Ok(Self {
            task_ids: project.tasks.iter().map(|t| t.id.clone()).collect(),
            site_ids: project.sites.iter().map(|s| s.id.clone()).collect(),
            edges,
            weights,
            costs,
        })
    }

    /// Resolves the project's model configuration (paths relative to
    /// `base_dir`) and builds the engine.
    pub fn for_project(project: &ProjectSpec, base_dir: Option<&Path>) -> Result<Self, Error> {
        let report = project.validate();
        if !report.is_valid() {
            return Err(Error::Invalid(report));
        }
        let cfg = ModelConfig::for_project(project, base_dir)?;
        Self::new(project, &cfg)
    }

    pub fn with_weights(mut self, weights: GoalWeights) -> Result<Self, Error> {
        self.weights = weights.normalized()?;
        Ok(self)
    }

    pub fn task_ids(&self) -> &[String] {
        &self.task_ids
    }

    pub fn site_ids(&self) -> &[String] {
        &self.site_ids
    }

    pub fn edges(&self) -> &[TaskEdge] {
        &self.edges
    }

    pub fn weights(&self) -> GoalWeights {
        self.weights
    }

    pub fn costs(&self) -> &ProjectCosts {
        &self.costs
    }

    /// Draws every level for one run. Order: tasks, then sites, then the
    /// financial/time/quality components; afterwards edges, then site pairs
    /// `p < q`.
    pub fn sample_levels(&self, rng: &mut RunRng) -> SampledLevels {
        let m = self.site_ids.len();
        let draw = |triple: &CostTriple, rng: &mut RunRng| {
            triple.components().map(|d| sample_state(d, rng))
        };
        let mut exec = Vec::with_capacity(self.task_ids.len() * m);
        for row in &self.costs.exec {
            for triple in row {
                exec.push(draw(triple, rng));
            }
        }
        let lowest = [Level5::VeryLow; 3];
        let mut trans = Vec::with_capacity(self.edges.len());
        for matrix in &self.costs.trans {
            let mut levels = vec![lowest; m * m];
            for p in 0..m {
                for q in p + 1..m {
                    let l = draw(&matrix[p][q], rng);
                    levels[p * m + q] = l;
                    levels[q * m + p] = l;
                }
            }
            trans.push(levels);
        }
        SampledLevels { exec, trans }
    }

    /// Scalar cost instance for a draw.
    pub fn instance(&self, levels: &SampledLevels) -> (ExecCostMatrix, TransCostTensor) {
        let m = self.site_ids.len();
        let w = &self.weights;
        let scalar = |l: &[Level5; 3]| scalarize((l[0], l[1], l[2]), w);
        let rows = levels
            .exec
            .chunks(m)
            .map(|row| row.iter().map(scalar).collect())
            .collect();
        let e = ExecCostMatrix::new(rows).expect("scalarized costs lie in [0, 1]");
        let mut s = TransCostTensor::new(self.task_ids.len(), m);
        for (edge, matrix) in self.edges.iter().zip(&levels.trans) {
            s.set(edge.a, edge.b, matrix.iter().map(scalar).collect())
                .expect("sampled overheads are symmetric with a zero diagonal");
        }
        (e, s)
    }

    /// Winning assignment of run `run`.
    pub fn run_once(&self, seed: u64, run: u64) -> Result<Assignment, InputError> {
        let mut rng = run_stream(seed, run);
        let levels = self.sample_levels(&mut rng);
        let (e, s) = self.instance(&levels);
        assign::solve(&self.task_ids, &self.edges, &e, &s)
    }

    /// Runs the simulation. The result depends only on `(runs, seed)`, not
    /// on `parallel`.
    pub fn rank(&self, runs: u64, seed: u64, parallel: bool) -> Result<RankedAssignments, Error> {
        if runs == 0 {
            return Err(InputError::NoRuns.into());
        }
        let winners: Vec<Assignment> = if parallel {
            (0..runs)
                .into_par_iter()
                .map(|r| self.run_once(seed, r))
                .collect::<Result<_, _>>()?
        } else {
            (0..runs)
                .map(|r| self.run_once(seed, r))
                .collect::<Result<_, _>>()?
        };
        let mut tally = BTreeMap::new();
        for a in winners {
            *tally.entry(a).or_insert(0u64) += 1;
        }
        Ok(RankedAssignments::from_tally(
            tally,
            runs,
            seed,
            self.weights,
            self.task_ids.clone(),
            self.site_ids.clone(),
        ))
    }

    /// Maps a task id to site id table onto site indices.
    pub fn resolve_assignment(&self, named: &IndexMap<String, String>) -> Result<Assignment, InputError> {
        let mut sites = Vec::with_capacity(self.task_ids.len());
        for task in &self.task_ids {
            let site = named
                .get(task)
                .ok_or_else(|| InputError::Assignment(format!("task {task:?} is not assigned")))?;
            let idx = self
                .site_ids
                .iter()
                .position(|s| s == site)
                .ok_or_else(|| InputError::Assignment(format!("unknown site {site:?} for task {task:?}")))?;
            sites.push(idx);
        }
        if let Some(extra) = named.keys().find(|k| !self.task_ids.contains(k)) {
            return Err(InputError::Assignment(format!("unknown task {extra:?}")));
        }
        Ok(Assignment(sites))
    }

    /// Scores a fixed assignment over sampled runs.
    pub fn evaluate(&self, a: &Assignment, runs: u64, seed: u64) -> Result<EvaluationReport, Error> {
        if runs == 0 {
            return Err(InputError::NoRuns.into());
        }
        if a.len() != self.task_ids.len() || a.as_slice().iter().any(|&p| p >= self.site_ids.len()) {
            return Err(InputError::Assignment("assignment does not cover the project".into()).into());
        }
        let m = self.site_ids.len();
        let unit = |l: Level5| f64::from(l.value() - 1) / 4.0;
        let mut sums = [0.0f64; 4];
        for run in 0..runs {
            let mut rng = run_stream(seed, run);
            let levels = self.sample_levels(&mut rng);
            let (e, s) = self.instance(&levels);
            sums[0] += assign::total_cost(a, &e, &s, &self.edges);
            let mut goal = [0.0f64; 3];
            for (i, &p) in a.as_slice().iter().enumerate() {
                for (g, l) in goal.iter_mut().zip(levels.exec[i * m + p]) {
                    *g += unit(l);
                }
            }
            for (edge, matrix) in self.edges.iter().zip(&levels.trans) {
                let l = matrix[a.site_of(edge.a) * m + a.site_of(edge.b)];
                for (g, l) in goal.iter_mut().zip(l) {
                    *g += unit(l);
                }
            }
            for k in 0..3 {
                sums[k + 1] += goal[k];
            }
        }
        let n = runs as f64;
        let exact = a
            .as_slice()
            .iter()
            .enumerate()
            .map(|(i, &p)| self.costs.exec[i][p].expected_scalar(&self.weights))
            .sum::<f64>()
            + self
                .edges
                .iter()
                .zip(&self.costs.trans)
                .map(|(edge, m)| m[a.site_of(edge.a)][a.site_of(edge.b)].expected_scalar(&self.weights))
                .sum::<f64>();
        Ok(EvaluationReport {
            runs,
            seed,
            weights: self.weights,
            assignment: self
                .task_ids
                .iter()
                .zip(a.as_slice())
                .map(|(t, &s)| (t.clone(), self.site_ids[s].clone()))
                .collect(),
            expected_total: sums[0] / n,
            expected_cost: sums[1] / n,
            expected_time: sums[2] / n,
            expected_quality: sums[3] / n,
            exact_expected_total: exact,
        })
    }
}

/// Expected costs of one fixed assignment.
///
/// `expected_total` is the mean weighted objective over the sampled runs.
/// The per-goal values are unweighted: the mean over runs of the summed
/// unit-scaled levels of that goal across all tasks and dependencies.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub runs: u64,
    pub seed: u64,
    pub weights: GoalWeights,
    pub assignment: IndexMap<String, String>,
    pub expected_total: f64,
    pub expected_cost: f64,
    pub expected_time: f64,
    pub expected_quality: f64,
    /// Closed-form expectation of the weighted objective.
    pub exact_expected_total: f64,
}

/// Ranks a project with its own model configuration, serially.
pub fn rank_assignments(p: &ProjectSpec, runs: u64, seed: u64) -> Result<RankedAssignments, Error> {
    Engine::for_project(p, None)?.rank(runs, seed, false)
}
