//! Artificial electric field optimisation for constrained problems.
//!
//! Two algorithm variants share one engine:
//!
//! * `aefa`: exponentially decaying Coulomb constant and a shrinking set of
//!   attracting agents.
//! * `ai-aefa`: a chaotic log-sigmoid Coulomb constant, bounded velocities,
//!   rounding for integer variables and every agent attracting.
//!
//! Constraints are handled with feasibility rules (see [`constraints`]).
//! Problems live in a name-addressable [`Registry`] that includes the
//! reliability-redundancy allocation suite. [`metrics`] aggregates runs and
//! compares algorithms, [`explain`] turns run traces into Shapley attributions,
//! and [`experiment`] drives multi-run studies from a TOML file.
//!
//! ```
//! use aefa::{run, registry_get, RunConfig};
//!
//! let problem = registry_get("toy-quadratic").unwrap();
//! let result = run(&problem, &RunConfig::ai_aefa().with_seed(1)).unwrap();
//! assert!(result.is_feasible());
//! assert!((result.best_objective - 2.0).abs() < 1e-2);
//! ```

// `!(x > 0.0)` is used on purpose so NaN parameters are rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod agent;
pub mod config;
pub mod constraints;
pub mod engine;
pub mod error;
pub mod experiment;
pub mod explain;
pub mod metrics;
pub mod problems;
pub mod rng;
pub mod schedule;
pub mod space;

pub use agent::{Agent, Fitness};
pub use config::{Algorithm, KBestMode, PositionMode, RunConfig};
pub use constraints::{compare, sort_population, ConstraintSet};
pub use engine::{run, run_observed, RunResult};
pub use error::{Error, Result};
pub use experiment::{run_experiment, ExperimentConfig};
pub use explain::IterationTrace;
pub use problems::{registry_get, ProblemSpec, Registry};
pub use schedule::CoulombSchedule;
pub use space::SearchSpace;
