use super::config::OrientationChoice;
use super::passive::check_search;
use crate::error::{invalid, Result};
use crate::oracles::{with_budget, Label, LabelSource};
use crate::problems::{Interval, Orientation};

/// Classic bisection with `budget` queries for a noiseless, single-crossing
/// label source; returns the midpoint of the final bracket.
pub fn bisect_noiseless<S>(source: &mut S, search: Interval, budget: u64, orientation: OrientationChoice) -> Result<f64>
where
    S: LabelSource + ?Sized,
{
    check_search(source, search)?;
    let orientation = orientation
        .resolve(source)
        .ok_or_else(|| invalid("orientation", "bisection needs a known orientation"))?;
    let mut source = with_budget(source, budget);
    let (mut lo, mut hi) = (search.lo(), search.hi());
    for _ in 0..budget {
        let mid = 0.5 * (lo + hi);
        let label = source.label(mid)?;
        let threshold_left = match orientation {
            Orientation::PositiveRight => label == Label::Plus,
            Orientation::PositiveLeft => label == Label::Minus,
        };
        if threshold_left {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
