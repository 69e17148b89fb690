use rand::Rng;
use serde::{Deserialize, Serialize};

use super::line::LineLabelOracle;
use crate::error::{invalid, Error, Result};
use crate::learners::{run_learner, LearnerConfig, LearnerKind};
use crate::oracles::{stream_rng, with_sign_budget, SignSource, StreamRole};
use crate::problems::{FamilyKind, RidgeState, UcFunction};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EpochRule {
    /// `E = ceil(d (ln T)^2)`.
    LogSquared,
    Explicit(u64),
}

/// Number of epochs `E` and per-epoch budget `N` for `d` coordinates and budget `T`.
pub fn optimizer_schedule(rule: EpochRule, dim: usize, budget: u64) -> Result<(u64, u64)> {
    let epochs = match rule {
        EpochRule::LogSquared => {
            let ln_t = (budget.max(1) as f64).ln();
            ((dim as f64) * ln_t * ln_t).ceil().max(1.0) as u64
        }
        EpochRule::Explicit(0) => return Err(invalid("epochs", "explicit epoch count must be >= 1")),
        EpochRule::Explicit(e) => e,
    };
    if budget < epochs {
        return Err(Error::BudgetBelowEpochs { budget, epochs });
    }
    Ok((epochs, budget / epochs))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub budget: u64,
    pub epoch_rule: EpochRule,
    pub line_search: LearnerKind,
    /// Template for every line search; its budget is replaced by `N`.
    pub learner: LearnerConfig,
    pub seed: u64,
    /// Replication index selecting the random streams under `seed`.
    pub stream: u64,
}

impl OptimizerConfig {
    pub fn new(budget: u64, line_search: LearnerKind) -> Self {
        Self {
            budget,
            epoch_rule: EpochRule::LogSquared,
            line_search,
            learner: LearnerConfig::default(),
            seed: 0,
            stream: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptEpoch {
    pub coordinate: usize,
    /// Step returned by the line search.
    pub step: f64,
    pub f_value: f64,
    pub f_error: f64,
    /// Cumulative sign queries after this epoch.
    pub queries_used: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptRunResult {
    pub x_final: Vec<f64>,
    pub f_error: f64,
    pub queries_used: u64,
    pub epochs: u64,
    pub per_epoch_budget: u64,
    pub trace: Vec<OptEpoch>,
}

/// Randomized coordinate descent where every line search is a 1-D threshold
/// learner run on gradient signs.
///
/// Each epoch picks a coordinate uniformly at random, learns the sign change
/// of the partial derivative along it with `N = floor(T / E)` queries, and
/// moves there. The last iterate is returned.
pub fn rssgd<S: SignSource>(
    f: &UcFunction,
    sign_oracle: &mut S,
    config: &OptimizerConfig,
    x0: &[f64],
) -> Result<OptRunResult> {
    f.domain().check(x0)?;
    config.learner.validate()?;
    let d = f.dim();
    if config.budget < d as u64 {
        return Err(invalid(
            "budget",
            format!("budget {} is below the dimension {d}", config.budget),
        ));
    }
    let (epochs, per_epoch) = optimizer_schedule(config.epoch_rule, d, config.budget)?;
    let mut coord_rng = stream_rng(config.seed, config.stream, StreamRole::Optimizer);
    let mut learner_rng = stream_rng(config.seed, config.stream, StreamRole::Learner);
    let learner = LearnerConfig {
        budget: per_epoch,
        ..config.learner
    };

    let mut oracle = with_sign_budget(sign_oracle, config.budget);
    let start = oracle.queries_used();
    let mut x = x0.to_vec();
    let mut ridge = match f.family() {
        FamilyKind::Ridge => Some(RidgeState::new(f, &x)?),
        _ => None,
    };
    let mut trace = Vec::with_capacity(epochs as usize);
    for _ in 0..epochs {
        let j = coord_rng.random_range(0..d);
        let line = match &ridge {
            Some(state) => state.coord_line(f, j)?,
            None => f.coord_line(&x, j)?,
        };
        let segment = f.domain().segment(&x, j)?;
        let mut labels = LineLabelOracle::from_line(&mut oracle, line, segment);
        let step = run_learner(config.line_search, &mut labels, segment, &learner, &mut learner_rng)?.point;

        let side = f.domain().side(j);
        let moved = side.clamp(x[j] + step);
        if let Some(state) = ridge.as_mut() {
            state.update_coord(f, j, moved - x[j])?;
        }
        x[j] = moved;
        trace.push(OptEpoch {
            coordinate: j,
            step,
            f_value: f.f_eval(&x)?,
            f_error: f.f_error(&x)?,
            queries_used: oracle.queries_used() - start,
        });
    }
    Ok(OptRunResult {
        f_error: f.f_error(&x)?,
        x_final: x,
        queries_used: oracle.queries_used() - start,
        epochs,
        per_epoch_budget: per_epoch,
        trace,
    })
}
