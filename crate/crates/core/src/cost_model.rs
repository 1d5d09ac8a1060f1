//! Cost networks instantiated per (task, site) and per (dependency, site
//! pair), and the weighted scalarization of sampled cost levels.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bayes::{BayesNet, DiscreteDistribution, NetworkFile, NetworkSpec};
use crate::error::{ConfigError, Error, InputError};
use crate::model::{
    check_breakpoints, ordinal_of, Breakpoints, DependencyEdge, GoalWeights, Level5,
    ModelConfigRef, NetworkSource, ProjectSpec, SitePairSpec, SiteSpec, TaskSpec,
};

pub const DEFAULT_SITE_COST_NETWORK: &str = include_str!("../data/site_cost.network.json");
pub const DEFAULT_TRANSMISSION_NETWORK: &str = include_str!("../data/transmission.network.json");

/// Distributions of the financial, time and quality cost levels. Higher
/// levels are worse.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostTriple {
    pub financial: DiscreteDistribution,
    pub time: DiscreteDistribution,
    pub quality: DiscreteDistribution,
}

impl CostTriple {
    /// All three components at the lowest level.
    pub fn minimal() -> Self {
        let p = DiscreteDistribution::point(Level5::VeryLow);
        Self {
            financial: p,
            time: p,
            quality: p,
        }
    }

    pub fn components(&self) -> [&DiscreteDistribution; 3] {
        [&self.financial, &self.time, &self.quality]
    }

    /// Expected value of [`scalarize`] under independent components.
    pub fn expected_scalar(&self, w: &GoalWeights) -> f64 {
        w.w_cost * (self.financial.mean() - 1.0) / 4.0
            + w.w_time * (self.time.mean() - 1.0) / 4.0
            + w.w_quality * (self.quality.mean() - 1.0) / 4.0
    }
}

/// Weighted sum of the three cost levels, each mapped onto `[0, 1]`.
pub fn scalarize(levels: (Level5, Level5, Level5), w: &GoalWeights) -> f64 {
    let unit = |l: Level5| f64::from(l.value() - 1) / 4.0;
    w.w_cost * unit(levels.0) + w.w_time * unit(levels.1) + w.w_quality * unit(levels.2)
}

/// Project quantity that feeds an input node of a cost network.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Binding {
    TaskSize,
    CustomerInteraction,
    /// `3 + min(available - required)` over the task's knowledge areas,
    /// clamped to the scale. Areas missing at the site count as very low.
    KnowledgeFit,
    StaffCapability,
    ProcessMaturity,
    ProximityToCustomer,
    /// Site cost rate through the project's cost-rate breakpoints.
    CostRate,
    /// `1 + max(0, customer_interaction - proximity_to_customer)`: how far the
    /// site is from the customer contact the task needs.
    CustomerDistance,
    Coupling,
    /// Hours through the time-zone breakpoints.
    TimeZoneShift,
    CulturalDifference,
    LanguageDifference,
    InfrastructureQuality,
    CollaborationHistory,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NetworkRole {
    SiteCost,
    Transmission,
}

impl NetworkRole {
    fn label(self) -> &'static str {
        match self {
            NetworkRole::SiteCost => "site_cost",
            NetworkRole::Transmission => "transmission",
        }
    }
}

impl Binding {
    pub fn role(self) -> NetworkRole {
        use Binding::*;
        match self {
            TaskSize | CustomerInteraction | KnowledgeFit | StaffCapability | ProcessMaturity
            | ProximityToCustomer | CostRate | CustomerDistance => NetworkRole::SiteCost,
            Coupling | TimeZoneShift | CulturalDifference | LanguageDifference
            | InfrastructureQuality | CollaborationHistory => NetworkRole::Transmission,
        }
    }
}

pub fn knowledge_fit(task: &TaskSpec, site: &SiteSpec) -> Level5 {
    let worst_gap = task
        .required_knowledge
        .iter()
        .map(|(area, required)| {
            let available = site
                .available_knowledge
                .get(area)
                .copied()
                .unwrap_or(Level5::VeryLow);
            i64::from(available.value()) - i64::from(required.value())
        })
        .min()
        .unwrap_or(0);
    Level5::saturating(3 + worst_gap)
}

pub fn customer_distance(task: &TaskSpec, site: &SiteSpec) -> Level5 {
    let gap = i64::from(task.customer_interaction.value())
        - i64::from(site.proximity_to_customer.value());
    Level5::saturating(1 + gap.max(0))
}

/// One cost network with its outputs in financial/time/quality order and
/// its evidence bindings.
#[derive(Clone, Debug)]
pub struct CostNetwork {
    name: String,
    net: BayesNet,
    outputs: [usize; 3],
    bindings: Vec<(usize, Binding)>,
}

impl CostNetwork {
    pub fn from_file(file: &NetworkFile, role: NetworkRole) -> Result<Self, ConfigError> {
        let name = if file.name.is_empty() {
            role.label().to_string()
        } else {
            file.name.clone()
        };
        let spec = NetworkSpec::new(file.nodes.clone(), &file.outputs).map_err(|e| match e {
            ConfigError::Network { message, .. } => ConfigError::Network {
                network: name.clone(),
                message,
            },
            other => other,
        })?;
        let outputs: [usize; 3] = spec.outputs().try_into().map_err(|_| ConfigError::Network {
            network: name.clone(),
            message: format!(
                "expected exactly three outputs (financial, time, quality), got {}",
                spec.outputs().len()
            ),
        })?;
        let mut bindings = Vec::with_capacity(file.bindings.len());
        for (node, binding) in &file.bindings {
            let id = spec.id(node).ok_or_else(|| ConfigError::Binding {
                network: name.clone(),
                node: node.clone(),
                message: "no such node".into(),
            })?;
            if binding.role() != role {
                return Err(ConfigError::Binding {
                    network: name.clone(),
                    node: node.clone(),
                    message: format!("{binding:?} is not available to a {} network", role.label()),
                });
            }
            bindings.push((id, *binding));
        }
        let net = BayesNet::new(spec)?;
        Ok(Self {
            name,
            net,
            outputs,
            bindings,
        })
    }

    pub fn parse(json: &str, role: NetworkRole) -> Result<Self, ConfigError> {
        let file: NetworkFile = serde_json::from_str(json).map_err(|e| ConfigError::NetworkFile {
            path: role.label().into(),
            message: e.to_string(),
        })?;
        Self::from_file(&file, role)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn net(&self) -> &BayesNet {
        &self.net
    }

    pub fn bindings(&self) -> &[(usize, Binding)] {
        &self.bindings
    }

    /// Marginals of the three outputs given evidence by node id.
    pub fn evaluate(&self, evidence: &[(usize, Level5)]) -> Result<CostTriple, InputError> {
        let [f, t, q] = self.outputs.map(|o| self.net.marginal(o, evidence));
        Ok(CostTriple {
            financial: f?,
            time: t?,
            quality: q?,
        })
    }
}

/// Resolved model: both networks plus numeric breakpoints.
#[derive(Clone, Debug)]
pub struct ModelConfig {
    pub site_cost: CostNetwork,
    pub transmission: CostNetwork,
    pub breakpoints: Breakpoints,
}

impl ModelConfig {
    /// Shipped networks with the given breakpoints.
    pub fn with_defaults(breakpoints: Breakpoints) -> Result<Self, ConfigError> {
        check_breakpoints(&breakpoints.cost_rate)?;
        check_breakpoints(&breakpoints.time_zone_shift)?;
        Ok(Self {
            site_cost: CostNetwork::parse(DEFAULT_SITE_COST_NETWORK, NetworkRole::SiteCost)?,
            transmission: CostNetwork::parse(
                DEFAULT_TRANSMISSION_NETWORK,
                NetworkRole::Transmission,
            )?,
            breakpoints,
        })
    }

    /// Resolves the project's `model_config`. Network paths are relative to
    /// `base_dir` when given.
    pub fn for_project(project: &ProjectSpec, base_dir: Option<&Path>) -> Result<Self, ConfigError> {
        let mut cfg = Self::with_defaults(project.breakpoints.clone())?;
        match &project.model_config {
            ModelConfigRef::Named(name) if name == "default" => {}
            ModelConfigRef::Named(other) => {
                return Err(ConfigError::Network {
                    network: other.clone(),
                    message: "unknown named model configuration (only \"default\" is built in)"
                        .into(),
                })
            }
            ModelConfigRef::Custom {
                site_cost_network,
                transmission_network,
            } => {
                if let Some(src) = site_cost_network {
                    cfg.site_cost = load_network(src, NetworkRole::SiteCost, base_dir)?;
                }
                if let Some(src) = transmission_network {
                    cfg.transmission = load_network(src, NetworkRole::Transmission, base_dir)?;
                }
            }
        }
        Ok(cfg)
    }

    fn site_evidence(&self, task: &TaskSpec, site: &SiteSpec) -> Result<Vec<(usize, Level5)>, ConfigError> {
        self.site_cost
            .bindings
            .iter()
            .map(|&(node, binding)| {
                let level = match binding {
                    Binding::TaskSize => task.size,
                    Binding::CustomerInteraction => task.customer_interaction,
                    Binding::KnowledgeFit => knowledge_fit(task, site),
                    Binding::StaffCapability => site.staff_capability,
                    Binding::ProcessMaturity => site.process_maturity,
                    Binding::ProximityToCustomer => site.proximity_to_customer,
                    Binding::CostRate => ordinal_of(site.cost_rate, &self.breakpoints.cost_rate)?,
                    Binding::CustomerDistance => customer_distance(task, site),
                    other => unreachable!("{other:?} rejected when the network was loaded"),
                };
                Ok((node, level))
            })
            .collect()
    }

    fn transmission_evidence(
        &self,
        edge: &DependencyEdge,
        relation: &SitePairSpec,
    ) -> Result<Vec<(usize, Level5)>, ConfigError> {
        self.transmission
            .bindings
            .iter()
            .map(|&(node, binding)| {
                let level = match binding {
                    Binding::Coupling => edge.coupling,
                    Binding::TimeZoneShift => {
                        ordinal_of(relation.time_zone_shift, &self.breakpoints.time_zone_shift)?
                    }
                    Binding::CulturalDifference => relation.cultural_difference,
                    Binding::LanguageDifference => relation.language_difference,
                    Binding::InfrastructureQuality => relation.infrastructure_quality,
                    Binding::CollaborationHistory => relation.collaboration_history,
                    other => unreachable!("{other:?} rejected when the network was loaded"),
                };
                Ok((node, level))
            })
            .collect()
    }
}

fn load_network(
    src: &NetworkSource,
    role: NetworkRole,
    base_dir: Option<&Path>,
) -> Result<CostNetwork, ConfigError> {
    match src {
        NetworkSource::Inline(file) => CostNetwork::from_file(file, role),
        NetworkSource::Path(path) => {
            let full = match base_dir {
                Some(dir) => dir.join(path),
                None => Path::new(path).to_path_buf(),
            };
            let text = std::fs::read_to_string(&full).map_err(|e| ConfigError::NetworkFile {
                path: full.display().to_string(),
                message: e.to_string(),
            })?;
            let file: NetworkFile =
                serde_json::from_str(&text).map_err(|e| ConfigError::NetworkFile {
                    path: full.display().to_string(),
                    message: e.to_string(),
                })?;
            CostNetwork::from_file(&file, role)
        }
    }
}

/// Cost distributions of doing `task` at `site`.
pub fn site_cost(task: &TaskSpec, site: &SiteSpec, cfg: &ModelConfig) -> Result<CostTriple, Error> {
    let evidence = cfg.site_evidence(task, site)?;
    Ok(cfg.site_cost.evaluate(&evidence)?)
}

/// Overhead distributions of dependency `edge` when its tasks run at `p` and
/// `q`. Collocated tasks (`p == q`) have minimal overhead and need no
/// relation; otherwise `relation` must describe the pair.
pub fn transmission_cost(
    edge: &DependencyEdge,
    p: &SiteSpec,
    q: &SiteSpec,
    relation: Option<&SitePairSpec>,
    cfg: &ModelConfig,
) -> Result<CostTriple, Error> {
    if p.id == q.id {
        return Ok(CostTriple::minimal());
    }
    let relation = relation
        .filter(|r| r.connects(&p.id, &q.id))
        .ok_or_else(|| {
            InputError::Dimension(format!("no relation between sites {:?} and {:?}", p.id, q.id))
        })?;
    let evidence = cfg.transmission_evidence(edge, relation)?;
    Ok(cfg.transmission.evaluate(&evidence)?)
}

/// Every (task, site) and (edge, site pair) cost triple of a project.
#[derive(Clone, Debug)]
pub struct ProjectCosts {
    /// `exec[task][site]`
    pub exec: Vec<Vec<CostTriple>>,
    /// `trans[edge][p][q]`, symmetric in `p, q`, minimal on the diagonal.
    pub trans: Vec<Vec<Vec<CostTriple>>>,
}

impl ProjectCosts {
    pub fn compute(project: &ProjectSpec, cfg: &ModelConfig) -> Result<Self, Error> {
        let exec = project
            .tasks
            .iter()
            .map(|t| {
                project
                    .sites
                    .iter()
                    .map(|s| site_cost(t, s, cfg))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;

        let n = project.sites.len();
        let mut trans = Vec::with_capacity(project.edges.len());
        for edge in &project.edges {
            let mut m = vec![vec![CostTriple::minimal(); n]; n];
            for p in 0..n {
                for q in p + 1..n {
                    let (sp, sq) = (&project.sites[p], &project.sites[q]);
                    let triple = transmission_cost(edge, sp, sq, project.site_pair(&sp.id, &sq.id), cfg)?;
                    m[p][q] = triple;
                    m[q][p] = triple;
                }
            }
            trans.push(m);
        }
        Ok(Self { exec, trans })
    }

    /// Breakdown by node of the site-cost network, for inspection.
    pub fn explain_site(
        task: &TaskSpec,
        site: &SiteSpec,
        cfg: &ModelConfig,
    ) -> Result<BTreeMap<String, DiscreteDistribution>, Error> {
        let evidence = cfg.site_evidence(task, site)?;
        let named = evidence
            .iter()
            .map(|(id, l)| (cfg.site_cost.net.spec().node(*id).name.clone(), *l))
            .collect();
        Ok(cfg.site_cost.net.infer(&named)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bps() -> Breakpoints {
        Breakpoints {
            cost_rate: [20.0, 40.0, 60.0, 80.0],
            time_zone_shift: crate::model::default_time_zone_breakpoints(),
        }
    }

    fn task() -> TaskSpec {
        TaskSpec {
            id: "t".into(),
            size: Level5::Medium,
            required_knowledge: BTreeMap::from([("impl".into(), Level5::High)]),
            customer_interaction: Level5::Low,
        }
    }

    fn site(id: &str, level: Level5, rate: f64) -> SiteSpec {
        SiteSpec {
            id: id.into(),
            cost_rate: rate,
            staff_capability: level,
            process_maturity: level,
            proximity_to_customer: level,
            available_knowledge: BTreeMap::from([("impl".into(), level)]),
        }
    }

    #[test]
    fn scalarize_examples() {
        let w = GoalWeights::new(0.2, 0.3, 0.5);
        let lo = (Level5::VeryLow, Level5::VeryLow, Level5::VeryLow);
        let hi = (Level5::VeryHigh, Level5::VeryHigh, Level5::VeryHigh);
        assert_eq!(scalarize(lo, &w), 0.0);
        assert!((scalarize(hi, &w) - 1.0).abs() < 1e-15);
        let w = GoalWeights::new(0.8, 0.1, 0.1);
        let got = scalarize((Level5::VeryLow, Level5::VeryHigh, Level5::VeryHigh), &w);
        assert!((got - 0.2).abs() < 1e-15);
    }

    #[test]
    fn knowledge_fit_uses_worst_area() {
        let mut t = task();
        t.required_knowledge.insert("design".into(), Level5::VeryHigh);
        let s = site("s", Level5::VeryHigh, 10.0);
        // design is missing at the site: 3 + (1 - 5) clamps to 1
        assert_eq!(knowledge_fit(&t, &s), Level5::VeryLow);
        assert_eq!(knowledge_fit(&task(), &s), Level5::High);
        assert_eq!(knowledge_fit(&task(), &site("s", Level5::Low, 1.0)), Level5::VeryLow);
    }

    #[test]
    fn customer_distance_only_matters_for_customer_facing_tasks() {
        let far = site("far", Level5::VeryLow, 10.0);
        let mut t = task();
        t.customer_interaction = Level5::VeryLow;
        assert_eq!(customer_distance(&t, &far), Level5::VeryLow);
        t.customer_interaction = Level5::VeryHigh;
        assert_eq!(customer_distance(&t, &far), Level5::VeryHigh);
        assert_eq!(customer_distance(&t, &site("near", Level5::VeryHigh, 1.0)), Level5::VeryLow);
    }

    #[test]
    fn default_networks_load() {
        let cfg = ModelConfig::with_defaults(bps()).unwrap();
        assert_eq!(cfg.site_cost.bindings().len(), 6);
        assert_eq!(cfg.transmission.bindings().len(), 6);
    }

    #[test]
    fn collocated_tasks_have_minimal_overhead() {
        let cfg = ModelConfig::with_defaults(bps()).unwrap();
        let e = DependencyEdge {
            from_task: "a".into(),
            to_task: "b".into(),
            coupling: Level5::VeryHigh,
        };
        let s = site("s", Level5::Low, 10.0);
        let c = transmission_cost(&e, &s, &s, None, &cfg).unwrap();
        assert_eq!(c, CostTriple::minimal());
        assert_eq!(c.expected_scalar(&GoalWeights::new(0.2, 0.3, 0.5)), 0.0);
    }

    #[test]
    fn missing_relation_is_an_error() {
        let cfg = ModelConfig::with_defaults(bps()).unwrap();
        let e = DependencyEdge {
            from_task: "a".into(),
            to_task: "b".into(),
            coupling: Level5::Low,
        };
        let (p, q) = (site("p", Level5::Low, 10.0), site("q", Level5::Low, 10.0));
        assert!(transmission_cost(&e, &p, &q, None, &cfg).is_err());
    }

    #[test]
    fn wrong_role_binding_is_a_configuration_error() {
        let mut file: NetworkFile = serde_json::from_str(DEFAULT_SITE_COST_NETWORK).unwrap();
        file.bindings.insert("task_size".into(), Binding::Coupling);
        assert!(matches!(
            CostNetwork::from_file(&file, NetworkRole::SiteCost),
            Err(ConfigError::Binding { .. })
        ));
        let mut file: NetworkFile = serde_json::from_str(DEFAULT_SITE_COST_NETWORK).unwrap();
        file.outputs.pop();
        assert!(matches!(
            CostNetwork::from_file(&file, NetworkRole::SiteCost),
            Err(ConfigError::Network { .. })
        ));
    }

    #[test]
    fn site_cost_is_deterministic() {
        let cfg = ModelConfig::with_defaults(bps()).unwrap();
        let s = site("s", Level5::Medium, 50.0);
        let a = site_cost(&task(), &s, &cfg).unwrap();
        let b = site_cost(&task(), &s, &cfg).unwrap();
        assert_eq!(a, b);
    }
}
