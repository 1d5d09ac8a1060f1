//! Prints the expected cost levels the two networks predict for every
//! (task, site) and (dependency, site pair) of a project.
//!
//! ```bash
//! cargo run --example inspect_costs -- [project.json]
//! ```

use std::path::PathBuf;

use gsd_alloc::cost_model::{ModelConfig, ProjectCosts};
use gsd_alloc::io;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/gsd3.json"));
    let project = io::load_project(&path)?.project;
    let cfg = ModelConfig::for_project(&project, path.parent())?;
    let costs = ProjectCosts::compute(&project, &cfg)?;
    let w = project.weights.normalized()?;

    println!("expected levels (financial / time / quality) and weighted scalar");
    for (task, row) in project.tasks.iter().zip(&costs.exec) {
        for (site, triple) in project.sites.iter().zip(row) {
            println!(
                "{:8} @ {:5}  {:.2} / {:.2} / {:.2}  -> {:.3}",
                task.id,
                site.id,
                triple.financial.mean(),
                triple.time.mean(),
                triple.quality.mean(),
                triple.expected_scalar(&w)
            );
        }
    }
    println!();
    for (edge, matrix) in project.edges.iter().zip(&costs.trans) {
        for p in 0..project.sites.len() {
            for q in p + 1..project.sites.len() {
                let triple = &matrix[p][q];
                println!(
                    "{:>6} - {:6} {:>5}-{:5}  {:.2} / {:.2} / {:.2}  -> {:.3}",
                    edge.from_task,
                    edge.to_task,
                    project.sites[p].id,
                    project.sites[q].id,
                    triple.financial.mean(),
                    triple.time.mean(),
                    triple.quality.mean(),
                    triple.expected_scalar(&w)
                );
            }
        }
    }
    Ok(())
}
