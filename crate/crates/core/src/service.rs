//! Stateless HTTP service over the engine.
//!
//! | route               | body                          | response                  |
//! |---------------------|-------------------------------|---------------------------|
//! | `POST /api/validate`| project                       | validation report         |
//! | `POST /api/rank`    | [`RankRequest`]               | ranked assignments        |
//! | `POST /api/evaluate`| [`EvaluateRequest`]           | evaluation report         |
//! | `GET /api/health`   |                               | `{"status":"ok"}`         |
//!
//! Invalid input answers 400 (with the validation report when the project
//! is invalid), configuration errors answer 422.

use std::path::{Path, PathBuf};

use axum::extract::rejection::JsonRejection;
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::Error;
use crate::io::{self, LoadedProject};
use crate::model::{ValidationReport, Violation};
use crate::montecarlo::{Engine, DEFAULT_RUNS};

pub const DEFAULT_SEED: u64 = 0;
pub const DEFAULT_PORT: u16 = 8080;
pub const PORT_ENV: &str = "GSD_ALLOC_PORT";

fn default_runs() -> u64 {
    DEFAULT_RUNS
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

/// Project given inline or as a path readable by the service.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ProjectInput {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub project: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub project_file: Option<String>,
}

impl ProjectInput {
    /// Loads the project; network paths resolve against the directory of
    /// `project_file`, or the working directory for inline projects.
    pub fn load(&self) -> Result<(LoadedProject, Option<PathBuf>), Error> {
        match (&self.project, &self.project_file) {
            (Some(v), None) => Ok((io::parse_project_value(v.clone())?, None)),
            (None, Some(path)) => {
                let path = Path::new(path);
                let loaded = io::load_project(path)?;
                Ok((loaded, path.parent().map(Path::to_path_buf)))
            }
            _ => Err(Error::Input(crate::error::InputError::Dimension(
                "give exactly one of `project` and `project_file`".into(),
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankRequest {
    #[serde(flatten)]
    pub input: ProjectInput,
    #[serde(default = "default_runs")]
    pub runs: u64,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub top_k: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvaluateRequest {
    #[serde(flatten)]
    pub input: ProjectInput,
    /// Task id to site id.
    pub assignment: IndexMap<String, String>,
    #[serde(default = "default_runs")]
    pub runs: u64,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

fn engine_for(loaded: &LoadedProject, base: Option<&Path>) -> Result<Engine, Error> {
    let report = loaded.validate();
    if !report.is_valid() {
        return Err(Error::Invalid(report));
    }
    Engine::for_project(&loaded.project, base)
}

/// Executes a rank request and renders the JSON body. The CLI's
/// `rank --format json` prints exactly this string.
pub fn rank_json(req: &RankRequest) -> Result<String, Error> {
    let (loaded, base) = req.input.load()?;
    rank_loaded_json(&loaded, base.as_deref(), req.runs, req.seed, req.top_k, true)
}

pub fn rank_loaded_json(
    loaded: &LoadedProject,
    base: Option<&Path>,
    runs: u64,
    seed: u64,
    top_k: Option<usize>,
    parallel: bool,
) -> Result<String, Error> {
    let engine = engine_for(loaded, base)?;
    let mut ranked = engine.rank(runs, seed, parallel)?;
    if let Some(k) = top_k {
        ranked.truncate(k);
    }
    Ok(to_json(&ranked.to_document()))
}

pub fn evaluate_json(req: &EvaluateRequest) -> Result<String, Error> {
    let (loaded, base) = req.input.load()?;
    let engine = engine_for(&loaded, base.as_deref())?;
    let assignment = engine.resolve_assignment(&req.assignment)?;
    Ok(to_json(&engine.evaluate(&assignment, req.runs, req.seed)?))
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("response serializes");
    s.push('\n');
    s
}

/// Error body for everything except validation failures.
#[derive(Debug, Serialize, Deserialize)]
pub struct ErrorBody {
    pub error: String,
}

pub struct ApiError(StatusCode, String);

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        match e {
            Error::Invalid(report) => ApiError(StatusCode::BAD_REQUEST, to_json(&report)),
            Error::Config(c) => ApiError(
                StatusCode::UNPROCESSABLE_ENTITY,
                to_json(&ErrorBody { error: c.to_string() }),
            ),
            other => ApiError(
                StatusCode::BAD_REQUEST,
                to_json(&ErrorBody {
                    error: other.to_string(),
                }),
            ),
        }
    }
}

impl From<JsonRejection> for ApiError {
    fn from(r: JsonRejection) -> Self {
        ApiError(
            StatusCode::BAD_REQUEST,
            to_json(&ErrorBody { error: r.body_text() }),
        )
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        json_response(self.0, self.1)
    }
}

fn json_response(status: StatusCode, body: String) -> Response {
    (status, [(header::CONTENT_TYPE, "application/json")], body).into_response()
}

async fn blocking<F>(f: F) -> Result<Response, ApiError>
where
    F: FnOnce() -> Result<String, Error> + Send + 'static,
{
    let body = tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError(StatusCode::INTERNAL_SERVER_ERROR, to_json(&ErrorBody { error: e.to_string() })))??;
    Ok(json_response(StatusCode::OK, body))
}

async fn health() -> Response {
    json_response(StatusCode::OK, to_json(&serde_json::json!({ "status": "ok" })))
}

async fn validate(body: Result<Json<Value>, JsonRejection>) -> Result<Response, ApiError> {
    let Json(value) = body?;
    let report = match io::parse_project_value(value) {
        Ok(loaded) => loaded.validate(),
        Err(e) => ValidationReport {
            valid: false,
            violations: vec![Violation {
                path: String::new(),
                message: e.to_string(),
            }],
            warnings: Vec::new(),
        },
    };
    let status = if report.is_valid() {
        StatusCode::OK
    } else {
        StatusCode::BAD_REQUEST
    };
    Ok(json_response(status, to_json(&report)))
}

async fn rank(body: Result<Json<RankRequest>, JsonRejection>) -> Result<Response, ApiError> {
    let Json(req) = body?;
    blocking(move || rank_json(&req)).await
}

async fn evaluate(body: Result<Json<EvaluateRequest>, JsonRejection>) -> Result<Response, ApiError> {
    let Json(req) = body?;
    blocking(move || evaluate_json(&req)).await
}

pub fn router() -> Router {
    Router::new()
        .route("/api/health", get(health))
        .route("/api/validate", post(validate))
        .route("/api/rank", post(rank))
        .route("/api/evaluate", post(evaluate))
}

pub async fn serve(port: u16) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(("0.0.0.0", port)).await?;
    axum::serve(listener, router()).await
}
