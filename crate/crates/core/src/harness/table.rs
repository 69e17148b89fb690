use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

pub const COLUMNS: [&str; 12] = [
    "schema_version",
    "experiment",
    "budget",
    "replication",
    "seed",
    "estimate",
    "point_error",
    "excess_risk",
    "f_error",
    "queries_used",
    "wall_time_ms",
    "error",
];

/// Columns a slope report may summarise.
pub const ERROR_COLUMNS: [&str; 3] = ["point_error", "excess_risk", "f_error"];

pub(crate) fn check_error_column(column: &str) -> std::result::Result<(), String> {
    if ERROR_COLUMNS.contains(&column) {
        Ok(())
    } else {
        Err(format!("`{column}` is not one of {}", ERROR_COLUMNS.join(", ")))
    }
}

/// One (budget, replication) cell. Failed cells keep their key and carry the
/// error message instead of measurements.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRow {
    pub experiment: String,
    pub budget: u64,
    pub replication: u64,
    pub seed: u64,
    pub estimate: Vec<f64>,
    pub point_error: Option<f64>,
    pub excess_risk: Option<f64>,
    pub f_error: Option<f64>,
    pub queries_used: Option<u64>,
    pub wall_time_ms: f64,
    pub error: Option<String>,
}

impl RunRow {
    pub fn column(&self, name: &str) -> Option<f64> {
        match name {
            "point_error" => self.point_error,
            "excess_risk" => self.excess_risk,
            "f_error" => self.f_error,
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RunTable {
    pub rows: Vec<RunRow>,
}

fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

fn parse_field<T: std::str::FromStr>(line: usize, name: &str, raw: &str) -> Result<T> {
    raw.parse()
        .map_err(|_| Error::Parse(format!("row {line}, column {name}: cannot parse `{raw}`")))
}

fn parse_opt<T: std::str::FromStr>(line: usize, name: &str, raw: &str) -> Result<Option<T>> {
    if raw.is_empty() {
        Ok(None)
    } else {
        parse_field(line, name, raw).map(Some)
    }
}

impl RunTable {
    pub fn failures(&self) -> impl Iterator<Item = &RunRow> {
        self.rows.iter().filter(|r| r.error.is_some())
    }

    /// CSV with a fixed header; floats carry 17 significant digits.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let csv_err = |e: csv::Error| Error::Io(e.to_string());
        w.write_record(COLUMNS).map_err(csv_err)?;
        for r in &self.rows {
            let estimate = r.estimate.iter().map(|&v| fmt_f64(v)).collect::<Vec<_>>().join(";");
            w.write_record([
                SCHEMA_VERSION.to_string(),
                r.experiment.clone(),
                r.budget.to_string(),
                r.replication.to_string(),
                r.seed.to_string(),
                estimate,
                fmt_opt(r.point_error),
                fmt_opt(r.excess_risk),
                fmt_opt(r.f_error),
                r.queries_used.map(|q| q.to_string()).unwrap_or_default(),
                format!("{:.3}", r.wall_time_ms),
                r.error.clone().unwrap_or_default(),
            ])
            .map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory cannot fail");
        String::from_utf8(buf).expect("csv output is utf-8")
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(input);
        let header = rdr.headers().map_err(|e| Error::Parse(e.to_string()))?.clone();
        if header.iter().ne(COLUMNS.iter().copied()) {
            return Err(Error::Parse(format!(
                "unexpected header; expected {}",
                COLUMNS.join(",")
            )));
        }
        let mut rows = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| Error::Parse(e.to_string()))?;
            let line = i + 1;
            let f = |c: usize| rec.get(c).unwrap_or("");
            let version: u32 = parse_field(line, COLUMNS[0], f(0))?;
            if version != SCHEMA_VERSION {
                return Err(Error::Parse(format!(
                    "row {line}: schema version {version} is not supported"
                )));
            }
            let estimate = f(5)
                .split(';')
                .filter(|s| !s.is_empty())
                .map(|s| parse_field(line, COLUMNS[5], s))
                .collect::<Result<Vec<f64>>>()?;
            rows.push(RunRow {
                experiment: f(1).to_string(),
                budget: parse_field(line, COLUMNS[2], f(2))?,
                replication: parse_field(line, COLUMNS[3], f(3))?,
                seed: parse_field(line, COLUMNS[4], f(4))?,
                estimate,
                point_error: parse_opt(line, COLUMNS[6], f(6))?,
                excess_risk: parse_opt(line, COLUMNS[7], f(7))?,
                f_error: parse_opt(line, COLUMNS[8], f(8))?,
                queries_used: parse_opt(line, COLUMNS[9], f(9))?,
                wall_time_ms: parse_field(line, COLUMNS[10], f(10))?,
                error: Some(f(11).to_string()).filter(|s| !s.is_empty()),
            });
        }
        Ok(Self { rows })
    }

    /// JSON array of row objects, mirroring the CSV columns.
    pub fn to_json(&self) -> String {
        let rows: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|r| {
                let mut v = serde_json::to_value(r).expect("rows serialize");
                v["schema_version"] = SCHEMA_VERSION.into();
                v
            })
            .collect();
        serde_json::to_string_pretty(&rows).expect("rows serialize")
    }
}
