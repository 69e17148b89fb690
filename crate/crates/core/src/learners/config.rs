use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::oracles::LabelSource;
use crate::problems::Orientation;

/// Orientation a learner assumes for the label source.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrientationChoice {
    PositiveRight,
    PositiveLeft,
    /// Use the source's structural hint if it has one, otherwise estimate it
    /// from the first labels.
    #[default]
    Auto,
}

impl OrientationChoice {
    pub(crate) fn resolve<S: LabelSource + ?Sized>(self, source: &S) -> Option<Orientation> {
        match self {
            OrientationChoice::PositiveRight => Some(Orientation::PositiveRight),
            OrientationChoice::PositiveLeft => Some(Orientation::PositiveLeft),
            OrientationChoice::Auto => source.orientation_hint(),
        }
    }
}

impl From<Orientation> for OrientationChoice {
    fn from(o: Orientation) -> Self {
        match o {
            Orientation::PositiveRight => OrientationChoice::PositiveRight,
            Orientation::PositiveLeft => OrientationChoice::PositiveLeft,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LearnerKind {
    Passive,
    Bz,
    Adaptive,
    Bisect,
}

impl std::str::FromStr for LearnerKind {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "passive" => Ok(LearnerKind::Passive),
            "bz" => Ok(LearnerKind::Bz),
            "adaptive" => Ok(LearnerKind::Adaptive),
            "bisect" => Ok(LearnerKind::Bisect),
            other => Err(invalid("learner", format!("unknown learner `{other}`"))),
        }
    }
}

/// Parameters of one learner run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LearnerConfig {
    /// Label query budget `T`.
    pub budget: u64,
    /// Confidence level `delta` that `c_delta` is meant to correspond to.
    pub confidence: f64,
    /// Epoch-count constant of the adaptive learner; must satisfy `c_delta^2 > 2`.
    pub c_delta: f64,
    pub orientation: OrientationChoice,
    /// BZ grid size; `None` picks `M` from the budget and the known TNC parameters.
    pub grid_size: Option<usize>,
    /// Known TNC exponent for BZ.
    pub bz_k: f64,
    /// Known TNC coefficient for BZ.
    pub bz_mu: f64,
}

impl Default for LearnerConfig {
    fn default() -> Self {
        Self {
            budget: 1,
            confidence: 0.05,
            c_delta: 2.0,
            orientation: OrientationChoice::Auto,
            grid_size: None,
            bz_k: 2.0,
            bz_mu: 1.0,
        }
    }
}

impl LearnerConfig {
    pub fn with_budget(budget: u64) -> Self {
        Self {
            budget,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.confidence > 0.0 && self.confidence < 1.0) {
            return Err(invalid("confidence", format!("{} not in (0, 1)", self.confidence)));
        }
        if !(self.c_delta * self.c_delta > 2.0 && self.c_delta.is_finite()) {
            return Err(invalid("c_delta", format!("{} must exceed sqrt(2)", self.c_delta)));
        }
        if matches!(self.grid_size, Some(m) if m < 2) {
            return Err(invalid("grid_size", "BZ needs at least 2 cells"));
        }
        if !(self.bz_k >= 1.0 && self.bz_k.is_finite()) {
            return Err(invalid("bz_k", format!("{} must be >= 1", self.bz_k)));
        }
        if !(self.bz_mu > 0.0 && self.bz_mu.is_finite()) {
            return Err(invalid("bz_mu", format!("{} must be positive", self.bz_mu)));
        }
        Ok(())
    }
}

/// One epoch of an epoch-based learner.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub center: f64,
    pub radius: f64,
    pub estimate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdEstimate {
    pub point: f64,
    pub queries_used: u64,
    pub epochs: u64,
    pub trace: Vec<EpochRecord>,
}
