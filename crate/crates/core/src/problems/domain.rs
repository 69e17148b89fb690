use serde::{Deserialize, Serialize};

use super::Interval;
use crate::error::{Error, Result};

/// Axis-aligned box, one interval per coordinate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainBox {
    sides: Vec<Interval>,
}

impl DomainBox {
    pub fn new(sides: Vec<Interval>) -> Result<Self> {
        if sides.is_empty() {
            return Err(Error::DimensionMismatch { expected: 1, got: 0 });
        }
        Ok(Self { sides })
    }

    /// The cube `[lo, hi]^dim`.
    pub fn cube(dim: usize, lo: f64, hi: f64) -> Result<Self> {
        let side = Interval::new(lo, hi)?;
        Self::new(vec![side; dim])
    }

    pub fn dim(&self) -> usize {
        self.sides.len()
    }

    pub fn side(&self, j: usize) -> Interval {
        self.sides[j]
    }

    pub fn sides(&self) -> &[Interval] {
        &self.sides
    }

    pub fn center(&self) -> Vec<f64> {
        self.sides.iter().map(Interval::midpoint).collect()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim() && self.sides.iter().zip(x).all(|(s, &v)| s.contains(v))
    }

    pub fn check(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        for (s, &v) in self.sides.iter().zip(x) {
            s.check(v)?;
        }
        Ok(())
    }

    pub fn clamp_in_place(&self, x: &mut [f64]) {
        for (s, v) in self.sides.iter().zip(x.iter_mut()) {
            *v = s.clamp(*v);
        }
    }

    /// Feasible steps `alpha` with `x + alpha * e_j` inside the box.
    pub fn segment(&self, x: &[f64], j: usize) -> Result<Interval> {
        let s = self.sides[j];
        Interval::new(s.lo() - x[j], s.hi() - x[j])
    }

    /// Euclidean distance from `p` to the farthest corner of the box.
    pub fn max_distance_from(&self, p: &[f64]) -> f64 {
        self.sides
            .iter()
            .zip(p)
            .map(|(s, &v)| {
                let d = (v - s.lo()).abs().max((s.hi() - v).abs());
                d * d
            })
            .sum::<f64>()
            .sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn segment_is_box_arithmetic() {
        let b = DomainBox::cube(2, -1.0, 1.0).unwrap();
        let seg = b.segment(&[0.9, 0.0], 0).unwrap();
        assert!((seg.lo() + 1.9).abs() < 1e-15);
        assert!((seg.hi() - 0.1).abs() < 1e-15);
    }

    #[test]
    fn check_reports_dimension() {
        let b = DomainBox::cube(3, 0.0, 1.0).unwrap();
        assert_eq!(
            b.check(&[0.5, 0.5]),
            Err(Error::DimensionMismatch { expected: 3, got: 2 })
        );
        assert!(b.check(&[0.5, 1.5, 0.0]).is_err());
        assert!(b.check(&[0.5, 1.0, 0.0]).is_ok());
    }
}
