use serde::{Deserialize, Serialize};

use super::risk::excess_risk;
use crate::error::{Error, Result};
use crate::problems::{TncProblem, UcFunction};

/// What an estimate is measured against.
#[derive(Debug, Clone, Copy)]
pub enum Target<'a> {
    Threshold(&'a TncProblem),
    Function(&'a UcFunction),
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RunMeta {
    pub queries_used: u64,
    pub seed: u64,
    pub budget: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorRecord {
    /// `|x - t|` for thresholds, `|x - x*|_2` for functions.
    pub point_error: f64,
    pub excess_risk: Option<f64>,
    pub f_error: Option<f64>,
    pub queries_used: u64,
    pub seed: u64,
    pub budget: u64,
}

pub fn error_record(target: Target<'_>, estimate: &[f64], meta: RunMeta) -> Result<ErrorRecord> {
    let (point_error, excess, f_error) = match target {
        Target::Threshold(p) => {
            let [x] = estimate else {
                return Err(Error::Mismatch(format!(
                    "threshold problems take a scalar estimate, got {} values",
                    estimate.len()
                )));
            };
            ((x - p.threshold()).abs(), Some(excess_risk(p, *x)?), None)
        }
        Target::Function(f) => {
            let fe = f.f_error(estimate)?;
            let dist = estimate
                .iter()
                .zip(f.minimizer())
                .map(|(a, b)| (a - b).powi(2))
                .sum::<f64>()
                .sqrt();
            (dist, None, Some(fe))
        }
    };
    Ok(ErrorRecord {
        point_error,
        excess_risk: excess,
        f_error,
        queries_used: meta.queries_used,
        seed: meta.seed,
        budget: meta.budget,
    })
}
