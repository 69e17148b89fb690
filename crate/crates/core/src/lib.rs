//! Active learning of one-dimensional thresholds and stochastic optimization
//! of uniformly convex functions from noisy gradient signs.
//!
//! The crate is organised bottom-up:
//!
//! - [`problems`]: threshold problems and test functions,
//! - [`oracles`]: seeded label and gradient-sign query sources,
//! - [`learners`]: passive ERM, probabilistic bisection, the adaptive epoch
//!   learner and noiseless bisection,
//! - [`optimizer`]: randomized coordinate descent driven by sign line searches,
//! - [`metrics`]: excess risk, function error and rate fits,
//! - [`harness`]: config-driven sweeps and report emission.

pub mod error;
pub mod harness;
pub mod learners;
pub mod metrics;
pub mod optimizer;
pub mod oracles;
pub mod problems;

pub use error::{Error, Result};
