use rand::Rng;

use super::config::{LearnerConfig, ThresholdEstimate};
use super::passive::{check_search, guess_orientation, ORIENTATION_PROBE};
use crate::error::{invalid, Result};
use crate::oracles::{with_budget, Label, LabelSource};
use crate::problems::{Interval, Orientation};

/// Grid size used when the config leaves it open.
///
/// Resolving one of `M` cells at per-query margin `mu (1/M)^(k-1)` takes about
/// `log M / margin^2` queries, so `M ~ (mu^2 T / ln T)^(1 / (2k - 2))`.
pub fn auto_grid_size(budget: u64, k: f64, mu: f64) -> usize {
    const MAX_CELLS: f64 = (1u64 << 20) as f64;
    let t = (budget.max(3)) as f64;
    let m = if k <= 1.0 {
        // Margin does not shrink with resolution; bisection-like depth.
        (t / t.ln()).min(MAX_CELLS)
    } else {
        (mu * mu * t / t.ln()).powf(1.0 / (2.0 * k - 2.0))
    };
    m.round().clamp(2.0, MAX_CELLS) as usize
}

/// Posterior over `m` equal cells of `search`.
struct Posterior {
    mass: Vec<f64>,
}

impl Posterior {
    fn uniform(m: usize) -> Self {
        Self {
            mass: vec![1.0 / m as f64; m],
        }
    }

    /// Median in cell units (continuous, in `[0, m]`).
    fn median(&self) -> f64 {
        let mut acc = 0.0;
        for (i, &p) in self.mass.iter().enumerate() {
            if acc + p >= 0.5 {
                let frac = if p > 0.0 { (0.5 - acc) / p } else { 0.0 };
                return i as f64 + frac.clamp(0.0, 1.0);
            }
            acc += p;
        }
        self.mass.len() as f64
    }

    /// Multiply cells left of `boundary` by `left` and the rest by `right`.
    fn update(&mut self, boundary: usize, left: f64, right: f64) {
        for (i, p) in self.mass.iter_mut().enumerate() {
            *p *= if i < boundary { left } else { right };
        }
        let total: f64 = self.mass.iter().sum();
        for p in &mut self.mass {
            *p /= total;
        }
    }
}

/// Probabilistic bisection on a uniform grid with known TNC parameters.
///
/// Each query goes to the grid boundary nearest the posterior median; the
/// posterior is reweighted by `1 + gamma` on the side the label points to and
/// `1 - gamma` on the other, with `gamma = min(1/2, mu (|search| / M)^(k-1))`.
pub fn bz_learner<S, R>(
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
    let m = config
        .grid_size
        .unwrap_or_else(|| auto_grid_size(config.budget, config.bz_k, config.bz_mu));
    if m < 2 {
        return Err(invalid("grid_size", "BZ needs at least 2 cells"));
    }
    let mut source = with_budget(source, config.budget);
    let start = source.queries_used();
    if config.budget == 0 {
        return Ok(ThresholdEstimate {
            point: search.midpoint(),
            queries_used: 0,
            epochs: 0,
            trace: Vec::new(),
        });
    }

    let orientation = match config.orientation.resolve(&source) {
        Some(o) => o,
        None => {
            let probe = (config.budget as usize).min(ORIENTATION_PROBE);
            let mut samples = Vec::with_capacity(probe);
            for _ in 0..probe {
                let x = search.clamp(search.lo() + search.length() * rng.random::<f64>());
                samples.push((x, source.label(x)?));
            }
            guess_orientation(&samples, search)
        }
    };

    let cell = search.length() / m as f64;
    let gamma = (config.bz_mu * cell.powf(config.bz_k - 1.0)).min(0.5);
    let mut posterior = Posterior::uniform(m);
    while source.queries_used() - start < config.budget {
        let boundary = (posterior.median().round() as usize).clamp(1, m - 1);
        let x = search.clamp(search.lo() + boundary as f64 * cell);
        let label = source.label(x)?;
        // `+` under positive-right means the threshold is left of x.
        let threshold_left = match orientation {
            Orientation::PositiveRight => label == Label::Plus,
            Orientation::PositiveLeft => label == Label::Minus,
        };
        if threshold_left {
            posterior.update(boundary, 1.0 + gamma, 1.0 - gamma);
        } else {
            posterior.update(boundary, 1.0 - gamma, 1.0 + gamma);
        }
    }
    let median_cell = (posterior.median().floor() as usize).min(m - 1);
    Ok(ThresholdEstimate {
        point: search.lo() + (median_cell as f64 + 0.5) * cell,
        queries_used: source.queries_used() - start,
        epochs: 1,
        trace: Vec::new(),
    })
}
