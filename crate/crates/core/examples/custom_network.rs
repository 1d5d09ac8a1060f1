//! Replaces the shipped site cost network with a deliberately crude inline
//! one (cost driven only by the cost rate, time only by task size) and
//! compares the top assignment with the default model.
//!
//! ```bash
//! cargo run --release --example custom_network
//! ```

use std::path::Path;

use gsd_alloc::io;
use gsd_alloc::montecarlo::Engine;
use serde_json::json;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/gsd3.json");
    let mut project: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path)?)?;

    let default_top = rank_top(&serde_json::to_string(&project)?, &path)?;

    project["model_config"] = json!({
        "site_cost_network": {
            "name": "rate_only",
            "nodes": [
                {"name": "rate"},
                {"name": "size"},
                {"name": "fit"},
                {"name": "financial", "parents": [{"name": "rate", "weight": "+++"}], "sigma": 0.5},
                {"name": "time", "parents": [{"name": "size", "weight": "++"}]},
                {"name": "quality", "parents": [{"name": "fit", "weight": "++", "sign": "negative"}]}
            ],
            "outputs": ["financial", "time", "quality"],
            "bindings": {"rate": "cost_rate", "size": "task_size", "fit": "knowledge_fit"}
        }
    });
    let custom_top = rank_top(&serde_json::to_string(&project)?, &path)?;

    println!("default model:\n{default_top}");
    println!("rate-only site model:\n{custom_top}");
    Ok(())
}

fn rank_top(text: &str, path: &Path) -> Result<String, Box<dyn std::error::Error>> {
    let project = io::parse_project(text)?.project;
    let mut ranked = Engine::for_project(&project, path.parent())?.rank(500, 3, true)?;
    ranked.truncate(1);
    Ok(ranked.to_table())
}
