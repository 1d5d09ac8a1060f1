//! Breaks the example project in a few ways and prints the validation
//! report, including warnings for unknown keys.
//!
//! ```bash
//! cargo run --example validate_project
//! ```

use std::path::Path;

use gsd_alloc::io;
use serde_json::{json, Value};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/gsd3.json");
    let mut project: Value = serde_json::from_str(&std::fs::read_to_string(&path)?)?;

    println!("as shipped:\n{}", io::parse_project_value(project.clone())?.validate());

    project["edges"][1]["to_task"] = json!("Impl Z");
    project["sites"][2]["cost_rate"] = json!(-4.0);
    project["weights"] = json!({"w_cost": 0, "w_time": 0, "w_quality": 0});
    project["deadline"] = json!("next week");

    let report = io::parse_project_value(project)?.validate();
    println!("broken:\n{report}");
    println!("as json:\n{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}
