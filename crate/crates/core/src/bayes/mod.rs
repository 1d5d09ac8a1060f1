//! Discrete Bayesian networks over five-level ordinal variables.
//!
//! Conditional probability tables are not entered by hand. Each node names
//! its parents with a weight and a sign; the row for a parent-state
//! combination is a normal distribution centred on the weighted parent
//! average, integrated over the unit intervals `(0,1) .. (4,5)` and
//! renormalized onto the five states.

mod cpt;
mod inference;
mod sample;

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::de::{self, Deserializer};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::ConfigError;
use crate::model::Level5;

pub use cpt::{build_cpt, normal_interval_mass, Cpt};
pub use inference::{infer_marginals, Factor};
pub use sample::{run_stream, sample_state, RunRng};

pub const DEFAULT_SIGMA: f64 = 0.75;
pub const DEFAULT_PRIOR_MEAN: f64 = 3.0;

/// Probability vector over the five ordinal states.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscreteDistribution([f64; 5]);

impl DiscreteDistribution {
    /// Accepts a vector that is non-negative and sums to one within 1e-12.
    pub fn new(probabilities: [f64; 5]) -> Option<Self> {
        let sum: f64 = probabilities.iter().sum();
        let ok = probabilities.iter().all(|p| p.is_finite() && *p >= 0.0) && (sum - 1.0).abs() <= 1e-12;
        ok.then_some(Self(probabilities))
    }

    /// Scales a non-negative vector with positive mass to sum to one.
    pub fn normalize(weights: [f64; 5]) -> Option<Self> {
        let sum: f64 = weights.iter().sum();
        if !(sum.is_finite() && sum > 0.0) || weights.iter().any(|w| *w < 0.0) {
            return None;
        }
        Some(Self(weights.map(|w| w / sum)))
    }

    pub fn point(level: Level5) -> Self {
        let mut p = [0.0; 5];
        p[level.index()] = 1.0;
        Self(p)
    }

    pub fn uniform() -> Self {
        Self([0.2; 5])
    }

    pub fn probabilities(&self) -> &[f64; 5] {
        &self.0
    }

    pub fn probability(&self, level: Level5) -> f64 {
        self.0[level.index()]
    }

    /// Expected ordinal value `sum k * p_k`.
    pub fn mean(&self) -> f64 {
        self.0
            .iter()
            .enumerate()
            .map(|(i, p)| (i + 1) as f64 * p)
            .sum()
    }

    /// The state carrying all mass, if any.
    pub fn as_point(&self) -> Option<Level5> {
        self.0
            .iter()
            .position(|&p| p == 1.0)
            .and_then(Level5::from_index)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sign {
    Positive,
    Negative,
}

impl Sign {
    /// Parent value as seen by the child: `v` or `6 - v`.
    pub fn apply(self, level: Level5) -> Level5 {
        match self {
            Sign::Positive => level,
            Sign::Negative => level.reversed(),
        }
    }
}

/// Influence weight. In files it may be a number or one of the strength
/// marks `+` (1), `++` (2), `+++` (3).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Weight(pub f64);

impl Serialize for Weight {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_f64(self.0)
    }
}

impl<'de> Deserialize<'de> for Weight {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Number(f64),
            Mark(String),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Number(w) => Ok(Weight(w)),
            Raw::Mark(m) => match m.trim() {
                "+" | "soft" => Ok(Weight(1.0)),
                "++" | "medium" => Ok(Weight(2.0)),
                "+++" | "strong" => Ok(Weight(3.0)),
                other => Err(de::Error::custom(format!("unknown strength {other:?}"))),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParentSpec {
    pub name: String,
    pub weight: Weight,
    #[serde(default = "positive")]
    pub sign: Sign,
}

fn positive() -> Sign {
    Sign::Positive
}

fn default_sigma() -> f64 {
    DEFAULT_SIGMA
}

fn default_prior_mean() -> f64 {
    DEFAULT_PRIOR_MEAN
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodeSpec {
    pub name: String,
    #[serde(default)]
    pub parents: Vec<ParentSpec>,
    #[serde(default = "default_sigma")]
    pub sigma: f64,
    /// Mean of the generating normal for nodes without parents.
    #[serde(default = "default_prior_mean")]
    pub prior_mean: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
}

impl NodeSpec {
    pub fn root(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            parents: Vec::new(),
            sigma: DEFAULT_SIGMA,
            prior_mean: DEFAULT_PRIOR_MEAN,
            description: None,
        }
    }

    pub fn with_parent(mut self, name: impl Into<String>, weight: f64, sign: Sign) -> Self {
        self.parents.push(ParentSpec {
            name: name.into(),
            weight: Weight(weight),
            sign,
        });
        self
    }

    pub fn with_sigma(mut self, sigma: f64) -> Self {
        self.sigma = sigma;
        self
    }

    pub fn with_prior_mean(mut self, mean: f64) -> Self {
        self.prior_mean = mean;
        self
    }

    pub(crate) fn check(&self) -> Result<(), ConfigError> {
        if !(self.sigma.is_finite() && self.sigma > 0.0) {
            return Err(ConfigError::Sigma {
                node: self.name.clone(),
                sigma: self.sigma,
            });
        }
        if !(1.0..=5.0).contains(&self.prior_mean) {
            return Err(ConfigError::PriorMean {
                node: self.name.clone(),
                mean: self.prior_mean,
            });
        }
        for p in &self.parents {
            if !(p.weight.0.is_finite() && p.weight.0 > 0.0) {
                return Err(ConfigError::Weight {
                    node: self.name.clone(),
                    parent: p.name.clone(),
                    weight: p.weight.0,
                });
            }
        }
        Ok(())
    }
}

/// On-disk network definition: nodes, designated outputs and, for the cost
/// networks, which project field feeds each input node.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NetworkFile {
    #[serde(default)]
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub nodes: Vec<NodeSpec>,
    #[serde(default)]
    pub outputs: Vec<String>,
    #[serde(default)]
    pub bindings: BTreeMap<String, crate::cost_model::Binding>,
}

/// A validated network structure: unique node names, resolvable parents and
/// an acyclic graph.
#[derive(Clone, Debug, PartialEq)]
pub struct NetworkSpec {
    nodes: Vec<NodeSpec>,
    outputs: Vec<usize>,
    index: HashMap<String, usize>,
    parents: Vec<Vec<usize>>,
    topo: Vec<usize>,
}

impl NetworkSpec {
    pub fn new(nodes: Vec<NodeSpec>, outputs: &[String]) -> Result<Self, ConfigError> {
        let mut index = HashMap::new();
        for (i, n) in nodes.iter().enumerate() {
            n.check()?;
            if index.insert(n.name.clone(), i).is_some() {
                return Err(ConfigError::DuplicateNode(n.name.clone()));
            }
        }
        let mut parents = Vec::with_capacity(nodes.len());
        for n in &nodes {
            let mut ids = Vec::with_capacity(n.parents.len());
            for p in &n.parents {
                let id = *index.get(&p.name).ok_or_else(|| ConfigError::UnknownParent {
                    node: n.name.clone(),
                    parent: p.name.clone(),
                })?;
                if ids.contains(&id) {
                    return Err(ConfigError::Network {
                        network: String::new(),
                        message: format!("node {:?} lists parent {:?} twice", n.name, p.name),
                    });
                }
                ids.push(id);
            }
            parents.push(ids);
        }
        let topo = topological_order(&nodes, &parents)?;
        let outputs = outputs
            .iter()
            .map(|o| {
                index
                    .get(o)
                    .copied()
                    .ok_or_else(|| ConfigError::UnknownNode(o.clone()))
            })
            .collect::<Result<_, _>>()?;
        Ok(Self {
            nodes,
            outputs,
            index,
            parents,
            topo,
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[NodeSpec] {
        &self.nodes
    }

    pub fn node(&self, id: usize) -> &NodeSpec {
        &self.nodes[id]
    }

    pub fn id(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn parents(&self, id: usize) -> &[usize] {
        &self.parents[id]
    }

    pub fn outputs(&self) -> &[usize] {
        &self.outputs
    }

    pub fn topological_order(&self) -> &[usize] {
        &self.topo
    }

    /// Nodes without parents.
    pub fn inputs(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.nodes.len()).filter(|&i| self.parents[i].is_empty())
    }

    /// Builds the table of every node.
    pub fn build_cpts(&self) -> Result<Vec<Cpt>, ConfigError> {
        self.nodes.iter().map(build_cpt).collect()
    }
}

fn topological_order(nodes: &[NodeSpec], parents: &[Vec<usize>]) -> Result<Vec<usize>, ConfigError> {
    let n = nodes.len();
    let mut children = vec![Vec::new(); n];
    let mut indegree = vec![0usize; n];
    for (child, ps) in parents.iter().enumerate() {
        indegree[child] = ps.len();
        for &p in ps {
            children[p].push(child);
        }
    }
    // Kahn's algorithm, always taking the lowest pending index.
    let mut ready: std::collections::BTreeSet<usize> =
        (0..n).filter(|&i| indegree[i] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(&next) = ready.iter().next() {
        ready.remove(&next);
        order.push(next);
        for &c in &children[next] {
            indegree[c] -= 1;
            if indegree[c] == 0 {
                ready.insert(c);
            }
        }
    }
    if order.len() < n {
        let stuck = (0..n).find(|&i| indegree[i] > 0).unwrap();
        return Err(ConfigError::Cycle(nodes[stuck].name.clone()));
    }
    Ok(order)
}

/// A network together with its generated tables.
#[derive(Clone, Debug)]
pub struct BayesNet {
    spec: NetworkSpec,
    cpts: Vec<Cpt>,
}

impl BayesNet {
    pub fn new(spec: NetworkSpec) -> Result<Self, ConfigError> {
        let cpts = spec.build_cpts()?;
        Ok(Self { spec, cpts })
    }

    pub fn spec(&self) -> &NetworkSpec {
        &self.spec
    }

    pub fn cpts(&self) -> &[Cpt] {
        &self.cpts
    }

    pub fn cpt(&self, id: usize) -> &Cpt {
        &self.cpts[id]
    }

    /// Posterior marginals of every node, keyed by node name.
    pub fn infer(
        &self,
        evidence: &BTreeMap<String, Level5>,
    ) -> Result<BTreeMap<String, DiscreteDistribution>, crate::error::InputError> {
        infer_marginals(&self.spec, &self.cpts, evidence)
    }

    /// Posterior marginal of a single node given evidence by node id.
    pub fn marginal(
        &self,
        node: usize,
        evidence: &[(usize, Level5)],
    ) -> Result<DiscreteDistribution, crate::error::InputError> {
        inference::marginal(&self.spec, &self.cpts, node, evidence)
    }
}

impl fmt::Display for DiscreteDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{:.4}, {:.4}, {:.4}, {:.4}, {:.4}]",
            self.0[0], self.0[1], self.0[2], self.0[3], self.0[4]
        )
    }
}
