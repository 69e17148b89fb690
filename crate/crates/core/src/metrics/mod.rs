//! Ground-truth error functionals and log-log rate fits.

mod quadrature;
mod record;
mod risk;
mod slope;
mod stats;

pub use quadrature::{adaptive_simpson, QUADRATURE_MAX_DEPTH, QUADRATURE_TOLERANCE};
pub use record::{error_record, ErrorRecord, RunMeta, Target};
pub use risk::{excess_risk, excess_risk_quadrature};
pub use slope::{fit_rate_slope, least_squares, RateFit};
pub use stats::{mean, median, standard_error};
