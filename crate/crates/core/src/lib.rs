//! Decision support for allocating the tasks of a distributed software
//! project to development sites.
//!
//! The cost of doing a task at a site, and the overhead of a dependency
//! between tasks at two sites, are predicted as distributions over five cost
//! levels by two Bayesian networks ([`cost_model`]). A Monte Carlo loop
//! ([`montecarlo`]) samples those distributions, weighs cost, time and
//! quality by the project's priorities and solves each sampled instance with
//! a tree dynamic program plus local repair ([`assign`]). The output is a
//! list of assignments ranked by how often each was optimal.
//!
//! ```no_run
//! use gsd_alloc::{io, montecarlo::Engine};
//!
//! let loaded = io::load_project("examples/gsd3.json".as_ref()).unwrap();
//! let engine = Engine::for_project(&loaded.project, None).unwrap();
//! let ranked = engine.rank(1000, 42, true).unwrap();
//! print!("{}", ranked.to_table());
//! ```

pub mod assign;
pub mod bayes;
pub mod cli;
pub mod cost_model;
pub mod error;
pub mod io;
pub mod model;
pub mod montecarlo;
pub mod service;

pub use error::{ConfigError, Error, InputError};
pub use model::{GoalWeights, Level5, ProjectSpec};
