use thiserror::Error;

use crate::model::{GoalWeights, ValidationReport};

/// Problems with model configuration: networks, bindings, breakpoints.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("breakpoints must be finite and strictly ascending, got {0:?}")]
    Breakpoints(Vec<f64>),
    #[error("goal weights {0:?} do not normalize")]
    Weights(GoalWeights),
    #[error("node {node:?}: sigma must be positive, got {sigma}")]
    Sigma { node: String, sigma: f64 },
    #[error("node {node:?}: parent {parent:?} must have a positive weight, got {weight}")]
    Weight {
        node: String,
        parent: String,
        weight: f64,
    },
    #[error("node {node:?}: prior mean must lie in [1, 5], got {mean}")]
    PriorMean { node: String, mean: f64 },
    #[error("node {node:?} references unknown parent {parent:?}")]
    UnknownParent { node: String, parent: String },
    #[error("duplicate node {0:?}")]
    DuplicateNode(String),
    #[error("network contains a cycle through {0:?}")]
    Cycle(String),
    #[error("unknown node {0:?}")]
    UnknownNode(String),
    #[error("network {network:?}: {message}")]
    Network { network: String, message: String },
    #[error("network {network:?}: binding for {node:?} cannot be resolved: {message}")]
    Binding {
        network: String,
        node: String,
        message: String,
    },
    #[error("cannot load network {path:?}: {message}")]
    NetworkFile { path: String, message: String },
}

/// Caller-supplied data that does not fit the model.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum InputError {
    #[error("evidence names unknown node {0:?}")]
    UnknownEvidenceNode(String),
    #[error("evidence has probability zero")]
    ImpossibleEvidence,
    #[error("task index {0} is not covered by the cost matrix")]
    MissingTask(usize),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("brute force would enumerate {combinations} assignments, cap is {cap}")]
    SearchSpaceTooLarge { combinations: f64, cap: f64 },
    #[error("assignment: {0}")]
    Assignment(String),
    #[error("run count must be at least 1")]
    NoRuns,
}

/// Top-level error for engine entry points.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid project:\n{0}")]
    Invalid(ValidationReport),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Input(#[from] InputError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{context}: {source}")]
    Parse {
        context: String,
        #[source]
        source: serde_json::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
