//! Ranks the three-site example project under cost-, time- and
//! quality-focused goal weights and prints the top three assignments of each.
//!
//! ```bash
//! cargo run --release --example goal_scenarios
//! ```

use std::path::Path;

use gsd_alloc::io;
use gsd_alloc::model::GoalWeights;
use gsd_alloc::montecarlo::Engine;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/gsd3.json");
    let loaded = io::load_project(&path)?;
    let engine = Engine::for_project(&loaded.project, path.parent())?;

    let scenarios = [
        ("quality focus", GoalWeights::new(0.2, 0.3, 0.5)),
        ("cost focus", GoalWeights::new(0.8, 0.1, 0.1)),
        ("time focus", GoalWeights::new(0.1, 0.8, 0.1)),
    ];
    for (label, weights) in scenarios {
        let mut ranked = engine.clone().with_weights(weights)?.rank(1000, 42, true)?;
        ranked.truncate(3);
        println!("== {label} ==");
        println!("{}", ranked.to_table());
    }
    Ok(())
}
