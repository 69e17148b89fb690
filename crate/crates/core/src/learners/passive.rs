use rand::Rng;

use super::config::OrientationChoice;
use crate::error::{invalid, Error, Result};
use crate::oracles::{Label, LabelSource};
use crate::problems::{Interval, Orientation};

/// Number of leading samples used to guess an unknown orientation.
pub const ORIENTATION_PROBE: usize = 20;

/// Empirical risk minimizing cut for labelled samples on `search`.
///
/// Candidates are the endpoints of `search` and the midpoints between
/// consecutive distinct sample positions. Ties go to the leftmost candidate.
pub fn erm_threshold(samples: &[(f64, Label)], search: Interval, orientation: Orientation) -> f64 {
    let mut sorted: Vec<(f64, bool)> = samples
        .iter()
        .map(|&(x, l)| {
            let plus = match orientation {
                Orientation::PositiveRight => l.is_plus(),
                Orientation::PositiveLeft => !l.is_plus(),
            };
            (x, plus)
        })
        .collect();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));

    // Cut at search.lo: every sample is to its right, so each `-` is an error.
    let mut err: i64 = sorted.iter().filter(|s| !s.1).count() as i64;
    let mut best = (err, search.lo());
    let mut i = 0;
    while i < sorted.len() {
        // Move the cut past every sample sharing this position.
        let x = sorted[i].0;
        while i < sorted.len() && sorted[i].0 == x {
            err += if sorted[i].1 { 1 } else { -1 };
            i += 1;
        }
        let cut = if i < sorted.len() {
            0.5 * (x + sorted[i].0)
        } else {
            search.hi()
        };
        if err < best.0 {
            best = (err, cut);
        }
    }
    best.1
}

/// Majority vote on which half of `search` carries more `+` labels.
pub(crate) fn guess_orientation(samples: &[(f64, Label)], search: Interval) -> Orientation {
    let mid = search.midpoint();
    let frac = |left: bool| {
        let (plus, total) = samples
            .iter()
            .filter(|(x, _)| (*x < mid) == left)
            .fold((0usize, 0usize), |(p, n), (_, l)| (p + l.is_plus() as usize, n + 1));
        if total == 0 {
            0.5
        } else {
            plus as f64 / total as f64
        }
    };
    if frac(false) >= frac(true) {
        Orientation::PositiveRight
    } else {
        Orientation::PositiveLeft
    }
}

pub(crate) fn check_search<S: LabelSource + ?Sized>(source: &S, search: Interval) -> Result<()> {
    let domain = source.domain();
    if !search.is_subset_of(&domain) {
        return Err(Error::OutOfDomain {
            x: if search.lo() < domain.lo() {
                search.lo()
            } else {
                search.hi()
            },
            lo: domain.lo(),
            hi: domain.hi(),
        });
    }
    Ok(())
}

/// Passive ERM with an orientation that may be decided from its own samples.
pub(crate) fn passive_erm_resolved<S, R>(
    source: &mut S,
    search: Interval,
    n: u64,
    orientation: Option<Orientation>,
    rng: &mut R,
) -> Result<(f64, Orientation)>
where
    S: LabelSource + ?Sized,
    R: Rng + ?Sized,
{
    if n == 0 {
        return Err(invalid("N", "passive learning needs at least one query"));
    }
    check_search(source, search)?;
    let mut samples = Vec::with_capacity(n as usize);
    for _ in 0..n {
        let x = search.lo() + search.length() * rng.random::<f64>();
        let x = search.clamp(x);
        samples.push((x, source.label(x)?));
    }
    let orientation = orientation.unwrap_or_else(|| {
        let probe = samples.len().min(ORIENTATION_PROBE);
        guess_orientation(&samples[..probe], search)
    });
    Ok((erm_threshold(&samples, search, orientation), orientation))
}

/// Query `n` uniform points of `search` and return the ERM threshold.
pub fn passive_erm<S, R>(
    source: &mut S,
    search: Interval,
    n: u64,
    orientation: OrientationChoice,
    rng: &mut R,
) -> Result<f64>
where
    S: LabelSource + ?Sized,
    R: Rng + ?Sized,
{
    let resolved = orientation.resolve(source);
    passive_erm_resolved(source, search, n, resolved, rng).map(|(x, _)| x)
}
