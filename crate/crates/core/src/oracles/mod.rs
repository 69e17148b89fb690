//! Stochastic query sources with seeded randomness and budget accounting.

mod budget;
mod label;
mod rng;
mod sign;

pub use budget::{with_budget, with_sign_budget, Budgeted};
pub use label::{label_sample, Label, LabelOracle, LabelSource};
pub use rng::{stream_rng, StreamRole};
pub use sign::{sign_sample, NoiseDist, SignMode, SignOracle, SignSource};
