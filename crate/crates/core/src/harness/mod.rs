//! Config-driven sweeps over budgets and seeded replications, with CSV/JSON
//! tables and log-log slope reports.
//!
//! A config is a flat `key = value` file:
//!
//! ```text
//! experiment = learn-threshold
//! name = adaptive-k2
//! seed = 0
//! problem.threshold = 0.37
//! problem.k = 2
//! problem.mu = 1
//! problem.cap = 0.4
//! learner.kind = adaptive
//! sweep.budgets = 256, 512, 1024
//! sweep.replications = 100
//! ```

mod config;
mod report;
mod run;
mod table;

pub use config::{
    resolve_threads, ExperimentConfig, ExperimentKind, ProblemSpec, ReportFormat, StartPoint, Statistic, THREADS_ENV,
};
pub use report::{slope_report, BudgetAggregate, SlopeReport};
pub use run::{run_experiment, run_experiment_with_threads};
pub use table::{RunRow, RunTable, COLUMNS, ERROR_COLUMNS, SCHEMA_VERSION};
