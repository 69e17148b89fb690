use rand::Rng;

use super::config::{EpochRecord, LearnerConfig, ThresholdEstimate};
use super::passive::{check_search, passive_erm_resolved};
use crate::error::{invalid, Result};
use crate::oracles::{with_budget, LabelSource};
use crate::problems::Interval;

/// Epoch count `E` and per-epoch budget `N` of the adaptive learner.
///
/// `E = max(1, floor(log2 sqrt(2T / (c_delta^2 log2 T))))` and `N = floor(T / E)`;
/// budgets below 4 run a single epoch.
pub fn epoch_schedule(budget: u64, c_delta: f64) -> (u64, u64) {
    if budget < 4 {
        return (1, budget);
    }
    let t = budget as f64;
    let inner = 2.0 * t / (c_delta * c_delta * t.log2());
    let e = inner.sqrt().log2().floor();
    let epochs = if e.is_finite() && e >= 1.0 { e as u64 } else { 1 };
    (epochs, budget / epochs)
}

/// Epoch-based active learner that needs no noise parameters.
///
/// Epoch `e` runs passive ERM with `N` queries on the ball of radius `R_e`
/// around the previous estimate (clipped to `search`), with `R_1 = |search|`
/// and radii halving every epoch. Queries left over from `T - E N` are unused.
pub fn adaptive_learner<S, R>(
    source: &mut S,
    search: Interval,
    config: &LearnerConfig,
    rng: &mut R,
) -> Result<ThresholdEstimate>
where
    S: LabelSource + ?Sized,
    R: Rng + ?Sized,
{
    config.validate()?;
    check_search(source, search)?;
    if config.budget == 0 {
        return Err(invalid("budget", "adaptive learner needs at least one query"));
    }
    let (epochs, per_epoch) = epoch_schedule(config.budget, config.c_delta);
    let mut source = with_budget(source, config.budget);
    let start = source.queries_used();
    let mut orientation = config.orientation.resolve(&source);

    let mut center = search.midpoint();
    let mut radius = search.length();
    let mut trace = Vec::with_capacity(epochs as usize);
    for _ in 0..epochs {
        let ball = search
            .ball(center, radius)
            .expect("center lies in search and radius is positive");
        let (estimate, used) = passive_erm_resolved(&mut source, ball, per_epoch, orientation, rng)?;
        orientation = Some(used);
        trace.push(EpochRecord {
            center,
            radius,
            estimate,
        });
        center = estimate;
        radius /= 2.0;
    }
    Ok(ThresholdEstimate {
        point: center,
        queries_used: source.queries_used() - start,
        epochs,
        trace,
    })
}
