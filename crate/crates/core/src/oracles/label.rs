use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problems::{Interval, Orientation, TncProblem};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Label {
    Plus,
    Minus,
}

impl Label {
    pub fn from_positive(positive: bool) -> Self {
        if positive {
            Label::Plus
        } else {
            Label::Minus
        }
    }

    pub fn is_plus(self) -> bool {
        self == Label::Plus
    }

    /// `+1.0` or `-1.0`.
    pub fn sign(self) -> f64 {
        match self {
            Label::Plus => 1.0,
            Label::Minus => -1.0,
        }
    }
}

/// A source of binary labels on a one-dimensional domain.
pub trait LabelSource {
    fn domain(&self) -> Interval;

    fn label(&mut self, x: f64) -> Result<Label>;

    fn queries_used(&self) -> u64;

    /// Orientation known from the structure of the source, if any.
    fn orientation_hint(&self) -> Option<Orientation> {
        None
    }
}

impl<S: LabelSource + ?Sized> LabelSource for &mut S {
    fn domain(&self) -> Interval {
        (**self).domain()
    }

    fn label(&mut self, x: f64) -> Result<Label> {
        (**self).label(x)
    }

    fn queries_used(&self) -> u64 {
        (**self).queries_used()
    }

    fn orientation_hint(&self) -> Option<Orientation> {
        (**self).orientation_hint()
    }
}

pub(crate) fn check_budget(used: u64, budget: Option<u64>) -> Result<()> {
    match budget {
        Some(b) if used >= b => Err(Error::BudgetExhausted { budget: b }),
        _ => Ok(()),
    }
}

/// Draws labels `+` with probability `eta(x)` for a threshold problem.
#[derive(Debug, Clone)]
pub struct LabelOracle {
    problem: TncProblem,
    rng: ChaCha8Rng,
    queries_used: u64,
    budget: Option<u64>,
}

impl LabelOracle {
    pub fn new(problem: TncProblem, rng: ChaCha8Rng) -> Self {
        Self {
            problem,
            rng,
            queries_used: 0,
            budget: None,
        }
    }

    pub fn with_budget_limit(mut self, budget: u64) -> Self {
        self.budget = Some(budget);
        self
    }

    pub fn problem(&self) -> &TncProblem {
        &self.problem
    }

    pub fn budget(&self) -> Option<u64> {
        self.budget
    }

    pub fn label_sample(&mut self, x: f64) -> Result<Label> {
        check_budget(self.queries_used, self.budget)?;
        let eta = self.problem.eta_at(x)?;
        self.queries_used += 1;
        Ok(Label::from_positive(self.rng.random::<f64>() < eta))
    }
}

impl LabelSource for LabelOracle {
    fn domain(&self) -> Interval {
        self.problem.interval()
    }

    fn label(&mut self, x: f64) -> Result<Label> {
        self.label_sample(x)
    }

    fn queries_used(&self) -> u64 {
        self.queries_used
    }
}

pub fn label_sample(oracle: &mut LabelOracle, x: f64) -> Result<Label> {
    oracle.label_sample(x)
}
