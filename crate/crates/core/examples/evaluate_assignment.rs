//! Scores two hand-picked assignments of the example project: everything at
//! the customer site versus designs at the customer and code offshore.
//!
//! ```bash
//! cargo run --release --example evaluate_assignment
//! ```

use std::path::Path;

use gsd_alloc::io;
use gsd_alloc::montecarlo::Engine;
use indexmap::IndexMap;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/gsd3.json");
    let project = io::load_project(&path)?.project;
    let engine = Engine::for_project(&project, path.parent())?;

    let collocated: IndexMap<String, String> =
        project.tasks.iter().map(|t| (t.id.clone(), "Cust".to_string())).collect();
    let split: IndexMap<String, String> = project
        .tasks
        .iter()
        .map(|t| {
            let site = if t.id.starts_with("Impl") || t.id == "Integr" { "Asia" } else { "Cust" };
            (t.id.clone(), site.to_string())
        })
        .collect();

    for (label, named) in [("all at Cust", collocated), ("design/code split", split)] {
        let a = engine.resolve_assignment(&named)?;
        let report = engine.evaluate(&a, 2000, 1)?;
        println!(
            "{label:18} total {:.3} (exact {:.3})  cost {:.3}  time {:.3}  quality {:.3}",
            report.expected_total,
            report.exact_expected_total,
            report.expected_cost,
            report.expected_time,
            report.expected_quality
        );
    }
    Ok(())
}
