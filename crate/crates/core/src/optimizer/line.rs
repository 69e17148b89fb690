use crate::error::Result;
use crate::oracles::{Label, LabelSource, SignSource};
use crate::problems::{CoordLine, Interval, Orientation};

/// Gradient signs along one coordinate line, seen as threshold labels in the
/// step `alpha`.
///
/// The label at `alpha` is the sign oracle's answer at `x + alpha e_j`.
/// Convexity makes the directional derivative increasing in `alpha`, so `+`
/// lies to the right of the directional minimum.
#[derive(Debug)]
pub struct LineLabelOracle<S> {
    oracle: S,
    line: CoordLine,
    segment: Interval,
}

impl<S: SignSource> LineLabelOracle<S> {
    /// Adapter for an already computed line (e.g. from a cached residual).
    pub fn from_line(oracle: S, line: CoordLine, segment: Interval) -> Self {
        Self { oracle, line, segment }
    }

    pub fn segment(&self) -> Interval {
        self.segment
    }

    pub fn into_inner(self) -> S {
        self.oracle
    }
}

/// Line adapter through `x` along coordinate `j`; the feasible steps are
/// those keeping `x + alpha e_j` in the domain box.
pub fn line_label_oracle<S: SignSource>(oracle: S, x: &[f64], j: usize) -> Result<LineLabelOracle<S>> {
    let f = oracle.function();
    let line = f.coord_line(x, j)?;
    let segment = f.domain().segment(x, j)?;
    Ok(LineLabelOracle::from_line(oracle, line, segment))
}

impl<S: SignSource> LabelSource for LineLabelOracle<S> {
    fn domain(&self) -> Interval {
        self.segment
    }

    fn label(&mut self, alpha: f64) -> Result<Label> {
        self.segment.check(alpha)?;
        self.oracle.sign_of_derivative(self.line.derivative(alpha))
    }

    fn queries_used(&self) -> u64 {
        self.oracle.queries_used()
    }

    fn orientation_hint(&self) -> Option<Orientation> {
        Some(Orientation::PositiveRight)
    }
}
