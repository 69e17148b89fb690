use super::label::{Label, LabelSource};
use super::sign::SignSource;
use crate::error::{Error, Result};
use crate::problems::{Interval, Orientation, UcFunction};

/// A view of an oracle that allows at most `limit` further queries.
///
/// The view shares the wrapped oracle's random stream and query counter.
#[derive(Debug)]
pub struct Budgeted<O> {
    inner: O,
    limit: u64,
    start: u64,
}

impl<O> Budgeted<O> {
    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn into_inner(self) -> O {
        self.inner
    }
}

impl<O: LabelSource> Budgeted<O> {
    pub fn labels(inner: O, limit: u64) -> Self {
        let start = inner.queries_used();
        Self { inner, limit, start }
    }

    /// Queries spent through this view.
    pub fn spent(&self) -> u64 {
        self.inner.queries_used() - self.start
    }
}

impl<O: SignSource> Budgeted<O> {
    pub fn signs(inner: O, limit: u64) -> Self {
        let start = inner.queries_used();
        Self { inner, limit, start }
    }
}

fn check(spent: u64, limit: u64) -> Result<()> {
    if spent >= limit {
        Err(Error::BudgetExhausted { budget: limit })
    } else {
        Ok(())
    }
}

impl<O: LabelSource> LabelSource for Budgeted<O> {
    fn domain(&self) -> Interval {
        self.inner.domain()
    }

    fn label(&mut self, x: f64) -> Result<Label> {
        check(self.inner.queries_used() - self.start, self.limit)?;
        self.inner.label(x)
    }

    fn queries_used(&self) -> u64 {
        self.inner.queries_used()
    }

    fn orientation_hint(&self) -> Option<Orientation> {
        self.inner.orientation_hint()
    }
}

impl<O: SignSource> SignSource for Budgeted<O> {
    fn function(&self) -> &UcFunction {
        self.inner.function()
    }

    fn queries_used(&self) -> u64 {
        self.inner.queries_used()
    }

    fn sign_of_derivative(&mut self, g: f64) -> Result<Label> {
        check(self.inner.queries_used() - self.start, self.limit)?;
        self.inner.sign_of_derivative(g)
    }
}

/// Budgeted view over a label source.
pub fn with_budget<O: LabelSource>(oracle: O, limit: u64) -> Budgeted<O> {
    Budgeted::labels(oracle, limit)
}

/// Budgeted view over a sign source.
pub fn with_sign_budget<O: SignSource>(oracle: O, limit: u64) -> Budgeted<O> {
    Budgeted::signs(oracle, limit)
}
