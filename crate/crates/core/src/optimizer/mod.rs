//! Randomized stochastic-sign coordinate descent.

mod line;
mod rssgd;

pub use line::{line_label_oracle, LineLabelOracle};
pub use rssgd::{optimizer_schedule, rssgd, EpochRule, OptEpoch, OptRunResult, OptimizerConfig};
