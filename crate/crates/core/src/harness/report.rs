use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::config::Statistic;
use super::table::{check_error_column, RunTable};
use crate::error::{invalid, Result};
use crate::metrics::{fit_rate_slope, mean, median, RateFit};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BudgetAggregate {
    pub budget: u64,
    pub value: f64,
    /// Successful cells that entered the statistic.
    pub count: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeReport {
    pub column: String,
    pub statistic: Statistic,
    pub fit: RateFit,
    pub aggregates: Vec<BudgetAggregate>,
    pub warnings: Vec<String>,
}

/// Aggregate `column` per budget and fit its log-log slope against the budget.
///
/// Budgets whose aggregate is zero are excluded from the fit and reported in
/// `warnings`; failed cells are skipped and counted.
pub fn slope_report(table: &RunTable, statistic: Statistic, column: &str) -> Result<SlopeReport> {
    check_error_column(column).map_err(|e| invalid("column", e))?;
    if table.rows.is_empty() {
        return Err(invalid("table", "no rows"));
    }
    let mut by_budget: BTreeMap<u64, (Vec<f64>, usize)> = BTreeMap::new();
    for row in &table.rows {
        let entry = by_budget.entry(row.budget).or_default();
        if row.error.is_some() {
            entry.1 += 1;
        } else if let Some(v) = row.column(column) {
            entry.0.push(v);
        }
    }
    if by_budget.values().all(|(v, _)| v.is_empty()) {
        return Err(invalid("column", format!("`{column}` has no values in this table")));
    }

    let mut aggregates = Vec::new();
    let mut warnings = Vec::new();
    for (budget, (values, failed)) in by_budget {
        if failed > 0 {
            warnings.push(format!("budget {budget}: {failed} failed cells skipped"));
        }
        let value = match statistic {
            Statistic::Median => median(&values),
            Statistic::Mean => mean(&values),
        };
        let Some(value) = value else {
            warnings.push(format!("budget {budget}: no successful cells"));
            continue;
        };
        if value == 0.0 {
            warnings.push(format!(
                "budget {budget}: aggregate {column} is zero; excluded from the fit"
            ));
        }
        aggregates.push(BudgetAggregate {
            budget,
            value,
            count: values.len(),
            failed,
        });
    }
    let points: Vec<(f64, f64)> = aggregates.iter().map(|a| (a.budget as f64, a.value)).collect();
    let fit = fit_rate_slope(&points)?;
    Ok(SlopeReport {
        column: column.to_string(),
        statistic,
        fit,
        aggregates,
        warnings,
    })
}

impl fmt::Display for SlopeReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let stat = match self.statistic {
            Statistic::Median => "median",
            Statistic::Mean => "mean",
        };
        writeln!(f, "budget,{stat}_{},count,failed", self.column)?;
        for a in &self.aggregates {
            writeln!(f, "{},{:.16e},{},{}", a.budget, a.value, a.count, a.failed)?;
        }
        writeln!(
            f,
            "slope {:.6} intercept {:.6} max_residual {:.6} (points used {}, zero excluded {})",
            self.fit.slope, self.fit.intercept, self.fit.max_residual, self.fit.used, self.fit.excluded
        )?;
        for w in &self.warnings {
            writeln!(f, "warning: {w}")?;
        }
        Ok(())
    }
}
