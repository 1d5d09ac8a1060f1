//! Project files: JSON with top-level keys `tasks`, `edges`, `sites`,
//! `site_pairs`, `weights`, `model_config` and `breakpoints`.

use std::path::Path;

use serde_json::Value;

use crate::error::{Error, Result};
use crate::model::{ProjectSpec, ValidationReport, Violation};

const TOP_LEVEL: &[&str] = &[
    "tasks",
    "edges",
    "sites",
    "site_pairs",
    "weights",
    "model_config",
    "breakpoints",
];

const NESTED: &[(&str, &[&str])] = &[
    ("tasks", &["id", "size", "required_knowledge", "customer_interaction"]),
    ("edges", &["from_task", "to_task", "coupling"]),
    (
        "sites",
        &[
            "id",
            "cost_rate",
            "staff_capability",
            "process_maturity",
            "proximity_to_customer",
            "available_knowledge",
        ],
    ),
    (
        "site_pairs",
        &[
            "site_a",
            "site_b",
            "time_zone_shift",
            "cultural_difference",
            "language_difference",
            "infrastructure_quality",
            "collaboration_history",
        ],
    ),
];

/// A parsed project plus warnings about keys the format does not know.
#[derive(Clone, Debug, PartialEq)]
pub struct LoadedProject {
    pub project: ProjectSpec,
    pub warnings: Vec<Violation>,
}

impl LoadedProject {
    /// Validation report including the unknown-key warnings.
    pub fn validate(&self) -> ValidationReport {
        let mut report = self.project.validate();
        report.warnings.extend(self.warnings.iter().cloned());
        report
    }
}

pub fn parse_project_value(value: Value) -> Result<LoadedProject> {
    let warnings = unknown_keys(&value);
    let project = serde_json::from_value(value).map_err(|source| Error::Parse {
        context: "project".into(),
        source,
    })?;
    Ok(LoadedProject { project, warnings })
}

pub fn parse_project(text: &str) -> Result<LoadedProject> {
    let value: Value = serde_json::from_str(text).map_err(|source| Error::Parse {
        context: "project".into(),
        source,
    })?;
    parse_project_value(value)
}

pub fn load_project(path: &Path) -> Result<LoadedProject> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_project(&text).map_err(|e| match e {
        Error::Parse { source, .. } => Error::Parse {
            context: path.display().to_string(),
            source,
        },
        other => other,
    })
}

pub fn to_json(project: &ProjectSpec) -> String {
    serde_json::to_string_pretty(project).expect("project serializes")
}

fn unknown_keys(value: &Value) -> Vec<Violation> {
    let mut warnings = Vec::new();
    let Some(top) = value.as_object() else {
        return warnings;
    };
    for key in top.keys().filter(|k| !TOP_LEVEL.contains(&k.as_str())) {
        warnings.push(Violation {
            path: key.clone(),
            message: "unknown key ignored".into(),
        });
    }
    for (section, known) in NESTED {
        let Some(items) = top.get(*section).and_then(Value::as_array) else {
            continue;
        };
        for (i, item) in items.iter().enumerate() {
            let Some(obj) = item.as_object() else { continue };
            for key in obj.keys().filter(|k| !known.contains(&k.as_str())) {
                warnings.push(Violation {
                    path: format!("{section}[{i}].{key}"),
                    message: "unknown key ignored".into(),
                });
            }
        }
    }
    warnings
}
