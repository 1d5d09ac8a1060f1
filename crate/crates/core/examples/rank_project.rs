//! Ranks any project file and prints the table the CLI prints.
//!
//! ```bash
//! cargo run --release --example rank_project -- path/to/project.json [runs] [seed]
//! ```

use std::path::PathBuf;

use gsd_alloc::io;
use gsd_alloc::montecarlo::Engine;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let path = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/gsd3.json"));
    let runs = args.next().map(|s| s.parse()).transpose()?.unwrap_or(1000);
    let seed = args.next().map(|s| s.parse()).transpose()?.unwrap_or(0);

    let loaded = io::load_project(&path)?;
    let report = loaded.validate();
    if !report.is_valid() {
        eprint!("{report}");
        std::process::exit(1);
    }
    let mut ranked = Engine::for_project(&loaded.project, path.parent())?.rank(runs, seed, true)?;
    ranked.truncate(10);
    print!("{}", ranked.to_table());
    Ok(())
}
