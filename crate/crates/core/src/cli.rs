//! Command line front end. Exit codes: 0 success, 1 invalid project,
//! 2 I/O or parse error, 3 configuration error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use indexmap::IndexMap;
use serde::Serialize;

use crate::error::Error;
use crate::io;
use crate::montecarlo::{Engine, DEFAULT_RUNS};
use crate::service::{self, DEFAULT_PORT, DEFAULT_SEED, PORT_ENV};

#[derive(Debug, Parser)]
#[command(name = "gsd-alloc", version, about = "Rank task-to-site assignments for distributed projects")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a project file; exits 0 iff it is valid.
    Validate { file: PathBuf },
    /// Rank assignments by how often they are optimal.
    Rank {
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_RUNS, value_parser = clap::value_parser!(u64).range(1..))]
        runs: u64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Keep only the K most frequent assignments.
        #[arg(long)]
        top: Option<usize>,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
        /// Run sequentially instead of on all cores (same result).
        #[arg(long)]
        serial: bool,
        /// Write the dynamic-programming table of the first run as JSON to stderr.
        #[arg(long)]
        dump_dp: bool,
    },
    /// Score a fixed assignment (JSON object of task id to site id).
    Evaluate {
        file: PathBuf,
        #[arg(long)]
        assignment: PathBuf,
        #[arg(long, default_value_t = DEFAULT_RUNS, value_parser = clap::value_parser!(u64).range(1..))]
        runs: u64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Serve the JSON API.
    Serve {
        #[arg(long, env = PORT_ENV, default_value_t = DEFAULT_PORT)]
        port: u16,
    },
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Invalid(_) => 1,
        Error::Io { .. } | Error::Parse { .. } | Error::Input(_) => 2,
        Error::Config(_) => 3,
    }
}

/// Runs the CLI with explicit arguments and streams; returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{rendered}");
            } else {
                let _ = write!(err, "{rendered}");
            }
            return code;
        }
    };
    match execute(cli.command, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

pub fn main() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

fn base_dir(file: &Path) -> Option<&Path> {
    file.parent()
}

fn execute(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Error> {
    match command {
        Command::Validate { file } => {
            let report = io::load_project(&file)?.validate();
            write!(out, "{report}").map_err(|e| io_err(&file, e))?;
            Ok(if report.is_valid() { 0 } else { 1 })
        }
        Command::Rank {
            file,
            runs,
            seed,
            top,
            format,
            serial,
            dump_dp,
        } => {
            let loaded = io::load_project(&file)?;
            let report = loaded.validate();
            for w in &report.warnings {
                let _ = writeln!(err, "warning: {}: {}", w.path, w.message);
            }
            if !report.is_valid() {
                return Err(Error::Invalid(report));
            }
            if dump_dp {
                let engine = Engine::for_project(&loaded.project, base_dir(&file))?;
                let _ = write!(err, "{}", service::to_json(&dp_dump(&engine, seed)?));
            }
            let text = match format {
                Format::Json => service::rank_loaded_json(&loaded, base_dir(&file), runs, seed, top, !serial)?,
                Format::Table => {
                    let engine = Engine::for_project(&loaded.project, base_dir(&file))?;
                    let mut ranked = engine.rank(runs, seed, !serial)?;
                    if let Some(k) = top {
                        ranked.truncate(k);
                    }
                    ranked.to_table()
                }
            };
            write!(out, "{text}").map_err(|e| io_err(&file, e))?;
            Ok(0)
        }
        Command::Evaluate {
            file,
            assignment,
            runs,
            seed,
        } => {
            let loaded = io::load_project(&file)?;
            let report = loaded.validate();
            if !report.is_valid() {
                return Err(Error::Invalid(report));
            }
            let named = read_assignment(&assignment)?;
            let engine = Engine::for_project(&loaded.project, base_dir(&file))?;
            let a = engine.resolve_assignment(&named)?;
            let report = engine.evaluate(&a, runs, seed)?;
            write!(out, "{}", service::to_json(&report)).map_err(|e| io_err(&file, e))?;
            Ok(0)
        }
        Command::Serve { port } => {
            let rt = tokio::runtime::Runtime::new().map_err(|e| io_err(Path::new("runtime"), e))?;
            let _ = writeln!(err, "listening on 0.0.0.0:{port}");
            rt.block_on(service::serve(port))
                .map_err(|e| io_err(Path::new(&format!("port {port}")), e))?;
            Ok(0)
        }
    }
}

fn io_err(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Accepts either `{"task": "site", ...}` or `{"assignment": {...}}`.
fn read_assignment(path: &Path) -> Result<IndexMap<String, String>, Error> {
    let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let parse = |source| Error::Parse {
        context: path.display().to_string(),
        source,
    };
    let value: serde_json::Value = serde_json::from_str(&text).map_err(parse)?;
    let inner = match value.get("assignment") {
        Some(v) if v.is_object() => v.clone(),
        _ => value,
    };
    serde_json::from_value(inner).map_err(parse)
}

#[derive(Serialize)]
struct DpDump {
    seed: u64,
    run: u64,
    sites: Vec<String>,
    /// Task id to subtree cost per site.
    cost: IndexMap<String, Vec<f64>>,
    roots: Vec<String>,
    residual_edges: Vec<(String, String)>,
}

fn dp_dump(engine: &Engine, seed: u64) -> Result<DpDump, Error> {
    use crate::assign::{build_forest, tree_dp};
    let mut rng = crate::bayes::run_stream(seed, 0);
    let levels = engine.sample_levels(&mut rng);
    let (e, s) = engine.instance(&levels);
    let forest = build_forest(engine.task_ids(), engine.edges());
    let table = tree_dp(&forest, &e, &s)?;
    let ids = engine.task_ids();
    Ok(DpDump {
        seed,
        run: 0,
        sites: engine.site_ids().to_vec(),
        cost: ids.iter().cloned().zip(table.cost).collect(),
        roots: forest.roots.iter().map(|&r| ids[r].clone()).collect(),
        residual_edges: forest
            .residual_edges
            .iter()
            .map(|e| (ids[e.a].clone(), ids[e.b].clone()))
            .collect(),
    })
}
