//! Synthetic problems: one-dimensional threshold problems under a two-sided
//! Tsybakov noise condition and d-dimensional uniformly convex test functions.

mod domain;
mod interval;
mod tnc;
mod uc;

pub use domain::DomainBox;
pub use interval::Interval;
pub use tnc::{eta_at, make_tnc_problem, Orientation, TncProblem, MAX_TNC_EXPONENT};
pub use uc::{
    directional_min, f_eval, grad_coord, parse_ridge_text, CoordLine, FamilyKind, RidgeState, UcFunction,
    MAX_UC_EXPONENT,
};
