use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::DomainBox;
use crate::error::{invalid, Error, Result};

/// Largest uniform-convexity exponent accepted.
pub const MAX_UC_EXPONENT: f64 = 8.0;

/// Relative residual required of the ridge normal-equation solve.
const RIDGE_SOLVE_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyKind {
    SeparablePower,
    Quadratic,
    Ridge,
}

#[derive(Debug, Clone, PartialEq)]
enum Family {
    /// `sum_j c_j |x_j - x*_j|^k`
    SeparablePower { coeffs: Vec<f64>, k: f64 },
    /// `1/2 (x - x*)^T A (x - x*)`
    Quadratic { a: DMatrix<f64> },
    /// `1/2 |Ax - b|^2 + 1/2 |x|^2`; `hessian = A^T A + I`.
    Ridge {
        a: DMatrix<f64>,
        b: DVector<f64>,
        hessian: DMatrix<f64>,
        col_sq_norms: Vec<f64>,
    },
}

/// A d-dimensional uniformly convex test function with analytic gradient,
/// closed-form directional minima and declared convexity constants.
///
/// `lambda` is the uniform-convexity modulus in
/// `f(y) >= f(x) + <grad f(x), y - x> + lambda/2 |y - x|^k`, and
/// `lkss` the local k-strong-smoothness constant bounding
/// `|[grad f(x)]_j| <= lkss * |x - x*_j|^(k-1)` around each directional minimum.
#[derive(Debug, Clone, PartialEq)]
pub struct UcFunction {
    family: Family,
    domain: DomainBox,
    minimizer: Vec<f64>,
    k: f64,
    lambda: f64,
    lkss: f64,
    lipschitz: Option<f64>,
    smoothness: Option<f64>,
}

/// The derivative of `alpha -> f(x + alpha e_j)`, frozen at a base point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CoordLine {
    /// `coeff * k * |u0 + alpha|^(k-1) * sign(u0 + alpha)`
    Power { coeff: f64, k: f64, offset: f64 },
    /// `slope0 + curvature * alpha`
    Affine { slope0: f64, curvature: f64 },
}

impl CoordLine {
    pub fn derivative(&self, alpha: f64) -> f64 {
        match *self {
            CoordLine::Power { coeff, k, offset } => power_derivative(coeff, k, offset + alpha),
            CoordLine::Affine { slope0, curvature } => slope0 + curvature * alpha,
        }
    }

    /// Unconstrained minimizer of the line.
    pub fn stationary_step(&self) -> f64 {
        match *self {
            CoordLine::Power { offset, .. } => -offset,
            CoordLine::Affine { slope0, curvature } => -slope0 / curvature,
        }
    }
}

fn power_derivative(coeff: f64, k: f64, u: f64) -> f64 {
    if u == 0.0 {
        return 0.0;
    }
    coeff * k * u.abs().powf(k - 1.0) * u.signum()
}

fn symmetric_eigen_range(m: &DMatrix<f64>) -> (f64, f64) {
    let eig = m.clone().symmetric_eigen();
    let min = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = eig.eigenvalues.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    (min, max)
}

impl UcFunction {
    /// `sum_j c_j |x_j - x*_j|^k` with `k` in `[2, 8]`.
    ///
    /// Declared constants: `lambda = 2^(3-k) min c d^(1-k/2)` (the
    /// one-dimensional modulus of `|u|^k` is at least `2^(2-k)`, and the
    /// power-mean inequality transfers it to the Euclidean norm) and
    /// `lkss = k max c`.
    pub fn separable_power(coeffs: Vec<f64>, k: f64, minimizer: Vec<f64>, domain: DomainBox) -> Result<Self> {
        let d = domain.dim();
        if coeffs.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: coeffs.len(),
            });
        }
        if coeffs.iter().any(|&c| !(c > 0.0 && c.is_finite())) {
            return Err(invalid("coeffs", "all coefficients must be positive"));
        }
        if !(2.0..=MAX_UC_EXPONENT).contains(&k) {
            return Err(invalid("k", format!("{k} not in [2, {MAX_UC_EXPONENT}]")));
        }
        domain.check(&minimizer)?;
        let c_min = coeffs.iter().cloned().fold(f64::INFINITY, f64::min);
        let c_max = coeffs.iter().cloned().fold(0.0, f64::max);
        let lambda = 2f64.powf(3.0 - k) * c_min * (d as f64).powf(1.0 - k / 2.0);
        let lkss = k * c_max;
        let far = domain.max_distance_from(&minimizer);
        // Per-coordinate gradient is at most k c_max |u|^(k-1).
        let lipschitz = k * c_max * far.powf(k - 1.0) * (d as f64).sqrt();
        let smoothness = (k == 2.0).then_some(2.0 * c_max);
        Ok(Self {
            family: Family::SeparablePower { coeffs, k },
            domain,
            minimizer,
            k,
            lambda,
            lkss,
            lipschitz: Some(lipschitz),
            smoothness,
        })
    }

    /// `1/2 (x - x*)^T A (x - x*)` for a symmetric positive-definite `A`.
    pub fn quadratic(a: DMatrix<f64>, minimizer: Vec<f64>, domain: DomainBox) -> Result<Self> {
        let d = domain.dim();
        if a.nrows() != d || a.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: a.nrows(),
            });
        }
        let scale = a.amax().max(1.0);
        if (&a - a.transpose()).amax() > 1e-12 * scale {
            return Err(invalid("A", "matrix must be symmetric"));
        }
        if a.clone().cholesky().is_none() {
            return Err(invalid("A", "matrix must be positive definite"));
        }
        domain.check(&minimizer)?;
        let (eig_min, eig_max) = symmetric_eigen_range(&a);
        let lkss = (0..d).map(|j| a[(j, j)]).fold(0.0, f64::max);
        let far = domain.max_distance_from(&minimizer);
        Ok(Self {
            family: Family::Quadratic { a },
            domain,
            minimizer,
            k: 2.0,
            lambda: eig_min,
            lkss,
            lipschitz: Some(eig_max * far),
            smoothness: Some(eig_max),
        })
    }

    pub fn quadratic_diagonal(diag: &[f64], minimizer: Vec<f64>, domain: DomainBox) -> Result<Self> {
        Self::quadratic(
            DMatrix::from_diagonal(&DVector::from_column_slice(diag)),
            minimizer,
            domain,
        )
    }

    /// `1/2 |Ax - b|^2 + 1/2 |x|^2` for an `n x d` matrix `A`.
    ///
    /// The global minimizer solves `(A^T A + I) x = A^T b`; it is computed once
    /// here and must lie inside `domain`.
    pub fn ridge(a: DMatrix<f64>, b: DVector<f64>, domain: DomainBox) -> Result<Self> {
        let d = domain.dim();
        if a.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: a.ncols(),
            });
        }
        if b.len() != a.nrows() {
            return Err(Error::DimensionMismatch {
                expected: a.nrows(),
                got: b.len(),
            });
        }
        let hessian = a.transpose() * &a + DMatrix::identity(d, d);
        let rhs = a.transpose() * &b;
        let chol = hessian
            .clone()
            .cholesky()
            .ok_or_else(|| invalid("A", "normal equations are not positive definite"))?;
        let x_star = chol.solve(&rhs);
        let residual = (&hessian * &x_star - &rhs).norm();
        if residual > RIDGE_SOLVE_TOLERANCE * rhs.norm().max(1.0) {
            return Err(invalid("A", format!("normal-equation residual {residual:e}")));
        }
        let minimizer: Vec<f64> = x_star.iter().cloned().collect();
        if !domain.contains(&minimizer) {
            return Err(invalid("domain", "ridge minimizer lies outside the domain box"));
        }
        let (eig_min, eig_max) = symmetric_eigen_range(&hessian);
        let col_sq_norms: Vec<f64> = (0..d).map(|j| a.column(j).norm_squared()).collect();
        let lkss = (0..d).map(|j| hessian[(j, j)]).fold(0.0, f64::max);
        let far = domain.max_distance_from(&minimizer);
        Ok(Self {
            family: Family::Ridge {
                a,
                b,
                hessian,
                col_sq_norms,
            },
            domain,
            minimizer,
            k: 2.0,
            lambda: eig_min,
            lkss,
            lipschitz: Some(eig_max * far),
            smoothness: Some(eig_max),
        })
    }

    pub fn family(&self) -> FamilyKind {
        match self.family {
            Family::SeparablePower { .. } => FamilyKind::SeparablePower,
            Family::Quadratic { .. } => FamilyKind::Quadratic,
            Family::Ridge { .. } => FamilyKind::Ridge,
        }
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn domain(&self) -> &DomainBox {
        &self.domain
    }

    pub fn minimizer(&self) -> &[f64] {
        &self.minimizer
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn lkss(&self) -> f64 {
        self.lkss
    }

    pub fn lipschitz(&self) -> Option<f64> {
        self.lipschitz
    }

    pub fn smoothness(&self) -> Option<f64> {
        self.smoothness
    }

    fn check_index(&self, j: usize) -> Result<()> {
        if j >= self.dim() {
            return Err(Error::IndexOutOfRange {
                index: j,
                dim: self.dim(),
            });
        }
        Ok(())
    }

    pub fn f_eval(&self, x: &[f64]) -> Result<f64> {
        self.domain.check(x)?;
        Ok(self.value(x))
    }

    pub(crate) fn value(&self, x: &[f64]) -> f64 {
        match &self.family {
            Family::SeparablePower { coeffs, k } => coeffs
                .iter()
                .zip(x.iter().zip(&self.minimizer))
                .map(|(c, (xi, mi))| c * (xi - mi).abs().powf(*k))
                .sum(),
            Family::Quadratic { a } => {
                let u = self.offset(x);
                0.5 * u.dot(&(a * &u))
            }
            Family::Ridge { a, b, .. } => {
                let xv = DVector::from_column_slice(x);
                let r = a * &xv - b;
                0.5 * r.norm_squared() + 0.5 * xv.norm_squared()
            }
        }
    }

    fn offset(&self, x: &[f64]) -> DVector<f64> {
        DVector::from_iterator(x.len(), x.iter().zip(&self.minimizer).map(|(a, b)| a - b))
    }

    /// `f(x) - f(x*)`, evaluated in a form that cannot go negative from rounding.
    pub fn f_error(&self, x: &[f64]) -> Result<f64> {
        self.domain.check(x)?;
        Ok(match &self.family {
            Family::SeparablePower { .. } | Family::Quadratic { .. } => self.value(x),
            Family::Ridge { hessian, .. } => {
                let u = self.offset(x);
                0.5 * u.dot(&(hessian * &u))
            }
        }
        .max(0.0))
    }

    pub fn grad_coord(&self, x: &[f64], j: usize) -> Result<f64> {
        self.domain.check(x)?;
        self.check_index(j)?;
        Ok(self.coord_line_unchecked(x, j).derivative(0.0))
    }

    pub fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.domain.check(x)?;
        Ok((0..self.dim())
            .map(|j| self.coord_line_unchecked(x, j).derivative(0.0))
            .collect())
    }

    /// Derivative of `f` along coordinate `j` through `x`.
    pub fn coord_line(&self, x: &[f64], j: usize) -> Result<CoordLine> {
        self.domain.check(x)?;
        self.check_index(j)?;
        Ok(self.coord_line_unchecked(x, j))
    }

    fn coord_line_unchecked(&self, x: &[f64], j: usize) -> CoordLine {
        match &self.family {
            Family::SeparablePower { coeffs, k } => CoordLine::Power {
                coeff: coeffs[j],
                k: *k,
                offset: x[j] - self.minimizer[j],
            },
            Family::Quadratic { a } => {
                let slope0 = a
                    .row(j)
                    .iter()
                    .zip(x.iter().zip(&self.minimizer))
                    .map(|(aij, (xi, mi))| aij * (xi - mi))
                    .sum();
                CoordLine::Affine {
                    slope0,
                    curvature: a[(j, j)],
                }
            }
            Family::Ridge { a, b, .. } => {
                let xv = DVector::from_column_slice(x);
                let r = a * &xv - b;
                self.ridge_line(&r, x, j)
            }
        }
    }

    fn ridge_line(&self, residual: &DVector<f64>, x: &[f64], j: usize) -> CoordLine {
        match &self.family {
            Family::Ridge { a, col_sq_norms, .. } => CoordLine::Affine {
                slope0: a.column(j).dot(residual) + x[j],
                curvature: col_sq_norms[j] + 1.0,
            },
            _ => unreachable!("ridge_line on a non-ridge family"),
        }
    }

    /// Optimal step along coordinate `j` from `x`, clipped to the box.
    pub fn directional_min(&self, x: &[f64], j: usize) -> Result<f64> {
        let line = self.coord_line(x, j)?;
        let seg = self.domain.segment(x, j)?;
        Ok(seg.clamp(line.stationary_step()))
    }
}

/// Cached residual `r = Ax - b` for coordinate-wise work on a ridge function.
///
/// Single-coordinate moves update `r` in `O(n)` using column `A^j`.
#[derive(Debug, Clone)]
pub struct RidgeState {
    x: Vec<f64>,
    residual: DVector<f64>,
}

impl RidgeState {
    pub fn new(f: &UcFunction, x: &[f64]) -> Result<Self> {
        f.domain.check(x)?;
        match &f.family {
            Family::Ridge { a, b, .. } => {
                let residual = a * DVector::from_column_slice(x) - b;
                Ok(Self {
                    x: x.to_vec(),
                    residual,
                })
            }
            _ => Err(Error::Mismatch("RidgeState requires a ridge function".into())),
        }
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn residual(&self) -> &DVector<f64> {
        &self.residual
    }

    /// Set `x_j <- x_j + delta` and refresh the residual.
    pub fn update_coord(&mut self, f: &UcFunction, j: usize, delta: f64) -> Result<()> {
        f.check_index(j)?;
        let Family::Ridge { a, .. } = &f.family else {
            return Err(Error::Mismatch("RidgeState requires a ridge function".into()));
        };
        self.x[j] += delta;
        self.residual.axpy(delta, &a.column(j), 1.0);
        Ok(())
    }

    pub fn grad_coord(&self, f: &UcFunction, j: usize) -> Result<f64> {
        Ok(self.coord_line(f, j)?.derivative(0.0))
    }

    pub fn coord_line(&self, f: &UcFunction, j: usize) -> Result<CoordLine> {
        f.check_index(j)?;
        Ok(f.ridge_line(&self.residual, &self.x, j))
    }
}

pub fn f_eval(f: &UcFunction, x: &[f64]) -> Result<f64> {
    f.f_eval(x)
}

pub fn grad_coord(f: &UcFunction, x: &[f64], j: usize) -> Result<f64> {
    f.grad_coord(x, j)
}

pub fn directional_min(f: &UcFunction, x: &[f64], j: usize) -> Result<f64> {
    f.directional_min(x, j)
}

/// Parse a ridge problem: a line `n d`, then `n` rows of `d` numbers (A), then
/// one row of `n` numbers (b).
pub fn parse_ridge_text(text: &str) -> Result<(DMatrix<f64>, DVector<f64>)> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    let header = lines.next().ok_or_else(|| Error::Parse("empty ridge file".into()))?;
    let dims: Vec<usize> = header
        .split_whitespace()
        .map(|s| s.parse::<usize>().map_err(|e| Error::Parse(format!("header: {e}"))))
        .collect::<Result<_>>()?;
    let [n, d] = dims[..] else {
        return Err(Error::Parse(format!("header must be `n d`, got `{header}`")));
    };
    let parse_row = |line: Option<&str>, len: usize, what: &str| -> Result<Vec<f64>> {
        let line = line.ok_or_else(|| Error::Parse(format!("missing {what}")))?;
        let row: Vec<f64> = line
            .split_whitespace()
            .map(|s| s.parse::<f64>().map_err(|e| Error::Parse(format!("{what}: {e}"))))
            .collect::<Result<_>>()?;
        if row.len() != len {
            return Err(Error::Parse(format!(
                "{what}: expected {len} values, got {}",
                row.len()
            )));
        }
        Ok(row)
    };
    let mut entries = Vec::with_capacity(n * d);
    for i in 0..n {
        entries.extend(parse_row(lines.next(), d, &format!("row {}", i + 1))?);
    }
    let b = parse_row(lines.next(), n, "b")?;
    if lines.next().is_some() {
        return Err(Error::Parse("trailing data after b".into()));
    }
    Ok((DMatrix::from_row_slice(n, d, &entries), DVector::from_vec(b)))
}
