//! Project domain types: tasks, sites, site-pair relations, goal weights and
//! the ordinal scale shared with the Bayesian networks.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::ConfigError;

/// Five-step ordinal scale from "very low" (1) to "very high" (5).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Level5 {
    VeryLow = 1,
    Low = 2,
    Medium = 3,
    High = 4,
    VeryHigh = 5,
}

impl Level5 {
    pub const ALL: [Level5; 5] = [
        Level5::VeryLow,
        Level5::Low,
        Level5::Medium,
        Level5::High,
        Level5::VeryHigh,
    ];

    pub fn new(value: u8) -> Option<Self> {
        match value {
            1 => Some(Level5::VeryLow),
            2 => Some(Level5::Low),
            3 => Some(Level5::Medium),
            4 => Some(Level5::High),
            5 => Some(Level5::VeryHigh),
            _ => None,
        }
    }

    /// Clamps any integer onto the scale.
    pub fn saturating(value: i64) -> Self {
        Self::new(value.clamp(1, 5) as u8).unwrap()
    }

    pub fn value(self) -> u8 {
        self as u8
    }

    /// Zero-based index, used for table lookups.
    pub fn index(self) -> usize {
        self as usize - 1
    }

    pub fn from_index(index: usize) -> Option<Self> {
        Self::new(index as u8 + 1)
    }

    /// The mirrored level `6 - v`.
    pub fn reversed(self) -> Self {
        Self::new(6 - self.value()).unwrap()
    }

    pub fn label(self) -> &'static str {
        match self {
            Level5::VeryLow => "very_low",
            Level5::Low => "low",
            Level5::Medium => "medium",
            Level5::High => "high",
            Level5::VeryHigh => "very_high",
        }
    }

    fn from_label(label: &str) -> Option<Self> {
        let normalized = label.trim().to_ascii_lowercase().replace([' ', '-'], "_");
        Self::ALL.into_iter().find(|l| l.label() == normalized)
    }
}

impl fmt::Display for Level5 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl Serialize for Level5 {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_u8(self.value())
    }
}

impl<'de> Deserialize<'de> for Level5 {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct LevelVisitor;

        impl Visitor<'_> for LevelVisitor {
            type Value = Level5;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("an integer 1..=5 or a label such as \"very_low\"")
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Level5, E> {
                u8::try_from(v)
                    .ok()
                    .and_then(Level5::new)
                    .ok_or_else(|| E::custom(format!("level {v} outside 1..=5")))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Level5, E> {
                u64::try_from(v)
                    .map_err(|_| E::custom(format!("level {v} outside 1..=5")))
                    .and_then(|v| self.visit_u64(v))
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Level5, E> {
                if v.fract() == 0.0 && (1.0..=5.0).contains(&v) {
                    Ok(Level5::new(v as u8).unwrap())
                } else {
                    Err(E::custom(format!("level {v} is not an integer in 1..=5")))
                }
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Level5, E> {
                Level5::from_label(v).ok_or_else(|| E::custom(format!("unknown level label {v:?}")))
            }
        }

        deserializer.deserialize_any(LevelVisitor)
    }
}

/// Maps a numeric value onto the ordinal scale using four ascending
/// breakpoints. A value equal to a breakpoint belongs to the lower bucket.
pub fn ordinal_of(value: f64, breakpoints: &[f64; 4]) -> Result<Level5, ConfigError> {
    check_breakpoints(breakpoints)?;
    let bucket = breakpoints.iter().take_while(|&&b| value > b).count();
    Ok(Level5::from_index(bucket).unwrap())
}

pub(crate) fn check_breakpoints(breakpoints: &[f64; 4]) -> Result<(), ConfigError> {
    let ascending = breakpoints.iter().all(|b| b.is_finite())
        && breakpoints.windows(2).all(|w| w[0] < w[1]);
    if ascending {
        Ok(())
    } else {
        Err(ConfigError::Breakpoints(breakpoints.to_vec()))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TaskSpec {
    pub id: String,
    pub size: Level5,
    pub required_knowledge: BTreeMap<String, Level5>,
    pub customer_interaction: Level5,
}

/// Dependency between two tasks. `coupling` is the ordinal amount of
/// communication the dependency demands.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DependencyEdge {
    pub from_task: String,
    pub to_task: String,
    pub coupling: Level5,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SiteSpec {
    pub id: String,
    /// Money per person-hour.
    pub cost_rate: f64,
    pub staff_capability: Level5,
    pub process_maturity: Level5,
    pub proximity_to_customer: Level5,
    pub available_knowledge: BTreeMap<String, Level5>,
}

/// Relation between two distinct sites. The pair is unordered.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SitePairSpec {
    pub site_a: String,
    pub site_b: String,
    /// Hours, 0..=12.
    pub time_zone_shift: f64,
    pub cultural_difference: Level5,
    pub language_difference: Level5,
    pub infrastructure_quality: Level5,
    pub collaboration_history: Level5,
}

impl SitePairSpec {
    pub fn connects(&self, a: &str, b: &str) -> bool {
        (self.site_a == a && self.site_b == b) || (self.site_a == b && self.site_b == a)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GoalWeights {
    pub w_cost: f64,
    pub w_time: f64,
    pub w_quality: f64,
}

impl GoalWeights {
    pub fn new(w_cost: f64, w_time: f64, w_quality: f64) -> Self {
        Self {
            w_cost,
            w_time,
            w_quality,
        }
    }

    /// Rescales the weights to sum to one. Fails for negative, non-finite or
    /// all-zero weights.
    pub fn normalized(&self) -> Result<GoalWeights, ConfigError> {
        let parts = [self.w_cost, self.w_time, self.w_quality];
        if parts.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(ConfigError::Weights(*self));
        }
        let sum: f64 = parts.iter().sum();
        if sum <= 0.0 {
            return Err(ConfigError::Weights(*self));
        }
        Ok(GoalWeights::new(
            self.w_cost / sum,
            self.w_time / sum,
            self.w_quality / sum,
        ))
    }
}

/// Numeric-to-ordinal conversion settings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Breakpoints {
    pub cost_rate: [f64; 4],
    #[serde(default = "default_time_zone_breakpoints")]
    pub time_zone_shift: [f64; 4],
}

pub fn default_time_zone_breakpoints() -> [f64; 4] {
    [2.0, 4.0, 6.0, 9.0]
}

/// Where the two cost networks come from. The string `"default"` selects the
/// shipped networks; an object may override either network with an inline
/// definition or a path relative to the project file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ModelConfigRef {
    Named(String),
    Custom {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        site_cost_network: Option<NetworkSource>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        transmission_network: Option<NetworkSource>,
    },
}

impl Default for ModelConfigRef {
    fn default() -> Self {
        ModelConfigRef::Named("default".to_string())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NetworkSource {
    Path(String),
    Inline(Box<crate::bayes::NetworkFile>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjectSpec {
    pub tasks: Vec<TaskSpec>,
    #[serde(default)]
    pub edges: Vec<DependencyEdge>,
    pub sites: Vec<SiteSpec>,
    #[serde(default)]
    pub site_pairs: Vec<SitePairSpec>,
    pub weights: GoalWeights,
    #[serde(default)]
    pub model_config: ModelConfigRef,
    pub breakpoints: Breakpoints,
}

impl ProjectSpec {
    pub fn task_index(&self, id: &str) -> Option<usize> {
        self.tasks.iter().position(|t| t.id == id)
    }

    pub fn site_index(&self, id: &str) -> Option<usize> {
        self.sites.iter().position(|s| s.id == id)
    }

    /// Symmetric lookup of the relation between two sites.
    pub fn site_pair(&self, a: &str, b: &str) -> Option<&SitePairSpec> {
        self.site_pairs.iter().find(|p| p.connects(a, b))
    }

    pub fn validate(&self) -> ValidationReport {
        validate_project(self)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    /// Location of the offending field, e.g. `edges[2].to_task`.
    pub path: String,
    pub message: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub valid: bool,
    pub violations: Vec<Violation>,
    #[serde(default)]
    pub warnings: Vec<Violation>,
}

impl ValidationReport {
    fn push(&mut self, path: impl Into<String>, message: impl Into<String>) {
        self.violations.push(Violation {
            path: path.into(),
            message: message.into(),
        });
    }

    pub fn warn(&mut self, path: impl Into<String>, message: impl Into<String>) {
        self.warnings.push(Violation {
            path: path.into(),
            message: message.into(),
        });
    }

    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            writeln!(f, "valid")?;
        }
        for v in &self.violations {
            writeln!(f, "error: {}: {}", v.path, v.message)?;
        }
        for w in &self.warnings {
            writeln!(f, "warning: {}: {}", w.path, w.message)?;
        }
        Ok(())
    }
}

/// Checks every structural invariant of a project and reports each violation
/// with the path of the offending field.
pub fn validate_project(p: &ProjectSpec) -> ValidationReport {
    let mut report = ValidationReport::default();

    if p.tasks.is_empty() {
        report.push("tasks", "project needs at least one task");
    }
    if p.sites.is_empty() {
        report.push("sites", "project needs at least one site");
    }

    let mut task_ids = HashMap::new();
    for (i, t) in p.tasks.iter().enumerate() {
        if t.id.is_empty() {
            report.push(format!("tasks[{i}].id"), "task id must not be empty");
        }
        if let Some(first) = task_ids.insert(t.id.as_str(), i) {
            report.push(
                format!("tasks[{i}].id"),
                format!("duplicate task id {:?} (first at tasks[{first}])", t.id),
            );
        }
        if t.required_knowledge.is_empty() {
            report.push(
                format!("tasks[{i}].required_knowledge"),
                "at least one knowledge area is required",
            );
        }
    }

    let mut site_ids = HashMap::new();
    for (i, s) in p.sites.iter().enumerate() {
        if s.id.is_empty() {
            report.push(format!("sites[{i}].id"), "site id must not be empty");
        }
        if let Some(first) = site_ids.insert(s.id.as_str(), i) {
            report.push(
                format!("sites[{i}].id"),
                format!("duplicate site id {:?} (first at sites[{first}])", s.id),
            );
        }
        if !(s.cost_rate.is_finite() && s.cost_rate > 0.0) {
            report.push(format!("sites[{i}].cost_rate"), "cost rate must be positive");
        }
        if s.available_knowledge.is_empty() {
            report.push(
                format!("sites[{i}].available_knowledge"),
                "at least one knowledge area is required",
            );
        }
    }

    let mut seen_edges = HashMap::new();
    for (i, e) in p.edges.iter().enumerate() {
        for (field, id) in [("from_task", &e.from_task), ("to_task", &e.to_task)] {
            if !task_ids.contains_key(id.as_str()) {
                report.push(
                    format!("edges[{i}].{field}"),
                    format!("unknown task {id:?}"),
                );
            }
        }
        if e.from_task == e.to_task {
            report.push(format!("edges[{i}]"), "edge must connect two different tasks");
            continue;
        }
        let key = unordered(&e.from_task, &e.to_task);
        if let Some(first) = seen_edges.insert(key, i) {
            report.push(
                format!("edges[{i}]"),
                format!("duplicate dependency between {:?} and {:?} (first at edges[{first}])", e.from_task, e.to_task),
            );
        }
    }

    let mut seen_pairs = HashMap::new();
    for (i, sp) in p.site_pairs.iter().enumerate() {
        for (field, id) in [("site_a", &sp.site_a), ("site_b", &sp.site_b)] {
            if !site_ids.contains_key(id.as_str()) {
                report.push(
                    format!("site_pairs[{i}].{field}"),
                    format!("unknown site {id:?}"),
                );
            }
        }
        if sp.site_a == sp.site_b {
            report.push(format!("site_pairs[{i}]"), "site pair must connect two different sites");
        }
        if !(sp.time_zone_shift.is_finite() && (0.0..=12.0).contains(&sp.time_zone_shift)) {
            report.push(
                format!("site_pairs[{i}].time_zone_shift"),
                "time zone shift must be within 0..=12 hours",
            );
        }
        let key = unordered(&sp.site_a, &sp.site_b);
        if let Some(first) = seen_pairs.insert(key, i) {
            report.push(
                format!("site_pairs[{i}]"),
                format!("duplicate relation between {:?} and {:?} (first at site_pairs[{first}])", sp.site_a, sp.site_b),
            );
        }
    }
    let distinct_sites: BTreeSet<&str> = p.sites.iter().map(|s| s.id.as_str()).collect();
    let sites: Vec<&str> = distinct_sites.into_iter().collect();
    for (i, a) in sites.iter().enumerate() {
        for b in &sites[i + 1..] {
            if !seen_pairs.contains_key(&unordered(a, b)) {
                report.push("site_pairs", format!("missing relation between sites {a:?} and {b:?}"));
            }
        }
    }

    if p.weights.normalized().is_err() {
        report.push(
            "weights",
            "weights must normalize: non-negative, finite and not all zero",
        );
    }

    for (field, bps) in [
        ("breakpoints.cost_rate", &p.breakpoints.cost_rate),
        ("breakpoints.time_zone_shift", &p.breakpoints.time_zone_shift),
    ] {
        if check_breakpoints(bps).is_err() {
            report.push(field, "breakpoints must be finite and strictly ascending");
        }
    }

    report.valid = report.is_valid();
    report
}

fn unordered(a: &str, b: &str) -> (String, String) {
    if a <= b {
        (a.to_string(), b.to_string())
    } else {
        (b.to_string(), a.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const BPS: [f64; 4] = [30.0, 60.0, 90.0, 120.0];

    #[test]
    fn ordinal_below_on_and_above_breakpoints() {
        assert_eq!(ordinal_of(10.0, &BPS).unwrap(), Level5::VeryLow);
        assert_eq!(ordinal_of(60.0, &BPS).unwrap(), Level5::Low);
        assert_eq!(ordinal_of(60.0001, &BPS).unwrap(), Level5::Medium);
        assert_eq!(ordinal_of(1000.0, &BPS).unwrap(), Level5::VeryHigh);
    }

    #[test]
    fn ordinal_rejects_unsorted_breakpoints() {
        assert!(ordinal_of(1.0, &[1.0, 1.0, 2.0, 3.0]).is_err());
        assert!(ordinal_of(1.0, &[4.0, 3.0, 2.0, 1.0]).is_err());
    }

    #[test]
    fn level_parses_numbers_and_labels() {
        let levels: Vec<Level5> = serde_json::from_str(r#"[1, "high", "Very Low", 5.0]"#).unwrap();
        assert_eq!(
            levels,
            vec![Level5::VeryLow, Level5::High, Level5::VeryLow, Level5::VeryHigh]
        );
        assert!(serde_json::from_str::<Level5>("6").is_err());
        assert!(serde_json::from_str::<Level5>("0").is_err());
        assert!(serde_json::from_str::<Level5>("2.5").is_err());
        assert_eq!(serde_json::to_string(&Level5::High).unwrap(), "4");
    }

    #[test]
    fn zero_weights_do_not_normalize() {
        assert!(GoalWeights::new(0.0, 0.0, 0.0).normalized().is_err());
        assert!(GoalWeights::new(-1.0, 1.0, 1.0).normalized().is_err());
        let w = GoalWeights::new(2.0, 3.0, 5.0).normalized().unwrap();
        assert!((w.w_cost + w.w_time + w.w_quality - 1.0).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn ordinal_is_monotone(
            start in -100.0f64..100.0,
            gaps in prop::array::uniform4(0.01f64..50.0),
            v1 in -200.0f64..400.0,
            dv in 0.0f64..200.0,
        ) {
            let mut bps = [0.0; 4];
            let mut acc = start;
            for (b, g) in bps.iter_mut().zip(gaps) {
                acc += g;
                *b = acc;
            }
            let lo = ordinal_of(v1, &bps).unwrap();
            let hi = ordinal_of(v1 + dv, &bps).unwrap();
            prop_assert!(lo <= hi);
        }
    }
}
