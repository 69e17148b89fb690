//! One-dimensional threshold learners.

mod adaptive;
mod bisect;
mod bz;
mod config;
mod passive;

pub use adaptive::{adaptive_learner, epoch_schedule};
pub use bisect::bisect_noiseless;
pub use bz::{auto_grid_size, bz_learner};
pub use config::{EpochRecord, LearnerConfig, LearnerKind, OrientationChoice, ThresholdEstimate};
pub use passive::{erm_threshold, passive_erm, ORIENTATION_PROBE};

use rand::Rng;

use crate::error::Result;
use crate::oracles::LabelSource;
use crate::problems::Interval;

/// Run any learner with the budget in `config`.
pub fn run_learner<S, R>(
    kind: LearnerKind,
    source: &mut S,
    search: Interval,
    config: &LearnerConfig,
    rng: &mut R,
) -> Result<ThresholdEstimate>
where
    S: LabelSource + ?Sized,
    R: Rng + ?Sized,
{
    match kind {
        LearnerKind::Adaptive => adaptive_learner(source, search, config, rng),
        LearnerKind::Bz => bz_learner(source, search, config, rng),
        LearnerKind::Passive => {
            config.validate()?;
            let start = source.queries_used();
            let point = passive_erm(source, search, config.budget, config.orientation, rng)?;
            Ok(ThresholdEstimate {
                point,
                queries_used: source.queries_used() - start,
                epochs: 1,
                trace: Vec::new(),
            })
        }
        LearnerKind::Bisect => {
            let start = source.queries_used();
            let point = bisect_noiseless(source, search, config.budget, config.orientation)?;
            Ok(ThresholdEstimate {
                point,
                queries_used: source.queries_used() - start,
                epochs: config.budget,
                trace: Vec::new(),
            })
        }
    }
}
