use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::learners::{LearnerConfig, LearnerKind, OrientationChoice};
use crate::optimizer::EpochRule;
use crate::oracles::{NoiseDist, SignMode};
use crate::problems::{parse_ridge_text, DomainBox, Interval, Orientation, TncProblem, UcFunction};

/// Name of the environment variable holding the default worker count.
pub const THREADS_ENV: &str = "SIGNDESCENT_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    LearnThreshold,
    Optimize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReportFormat {
    Csv,
    Json,
    SlopeSummary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Statistic {
    Median,
    Mean,
}

impl FromStr for Statistic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "median" => Ok(Statistic::Median),
            "mean" => Ok(Statistic::Mean),
            other => Err(Error::Parse(format!("unknown statistic `{other}` (median | mean)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum StartPoint {
    Center,
    Point(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProblemSpec {
    Threshold {
        problem: TncProblem,
        learner: LearnerKind,
    },
    Function {
        function: Box<UcFunction>,
        oracle: SignMode,
        epoch_rule: EpochRule,
        line_search: LearnerKind,
        x0: StartPoint,
    },
}

/// A complete, validated sweep description.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub name: String,
    pub kind: ExperimentKind,
    pub problem: ProblemSpec,
    /// Template for every learner run; the budget is set per cell.
    pub learner: LearnerConfig,
    pub budgets: Vec<u64>,
    pub replications: u64,
    pub base_seed: u64,
    pub output: Option<PathBuf>,
    pub report: ReportFormat,
    pub statistic: Statistic,
    /// Error column summarised by slope reports.
    pub column: String,
    pub threads: Option<usize>,
}

fn config_err(key: &str, reason: impl ToString) -> Error {
    Error::Config {
        key: key.to_string(),
        reason: reason.to_string(),
    }
}

/// `key = value` lines with `#` comments; every key may appear once.
struct KeyValues {
    entries: BTreeMap<String, String>,
    used: BTreeSet<String>,
}

impl KeyValues {
    fn from_text(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Parse(format!("line {}: expected `key = value`", n + 1)));
            };
            let key = key.trim();
            if key.is_empty() || key.contains(char::is_whitespace) {
                return Err(Error::Parse(format!("line {}: malformed key `{key}`", n + 1)));
            }
            if entries.insert(key.to_string(), value.trim().to_string()).is_some() {
                return Err(config_err(key, format!("duplicate key on line {}", n + 1)));
            }
        }
        Ok(Self {
            entries,
            used: BTreeSet::new(),
        })
    }

    fn get(&mut self, key: &str) -> Option<String> {
        let v = self.entries.get(key).cloned();
        if v.is_some() {
            self.used.insert(key.to_string());
        }
        v
    }

    fn has(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    fn require(&mut self, key: &str) -> Result<String> {
        self.get(key).ok_or_else(|| config_err(key, "missing"))
    }

    fn parse<T: FromStr>(&mut self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        self.get(key)
            .map(|v| v.parse::<T>().map_err(|e| config_err(key, format!("`{v}`: {e}"))))
            .transpose()
    }

    fn parse_or<T: FromStr>(&mut self, key: &str, default: T) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        Ok(self.parse(key)?.unwrap_or(default))
    }

    fn list<T: FromStr>(&mut self, key: &str) -> Result<Option<Vec<T>>>
    where
        T::Err: std::fmt::Display,
    {
        let Some(v) = self.get(key) else { return Ok(None) };
        split_list(&v)
            .map(|item| item.parse::<T>().map_err(|e| config_err(key, format!("`{item}`: {e}"))))
            .collect::<Result<Vec<T>>>()
            .map(Some)
    }

    fn finish(self) -> Result<()> {
        match self.entries.keys().find(|k| !self.used.contains(*k)) {
            Some(k) => Err(config_err(k, "unknown or unused key")),
            None => Ok(()),
        }
    }
}

fn split_list(v: &str) -> impl Iterator<Item = &str> {
    v.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
}

/// Attach a key path to errors raised while building a section.
fn at<T>(key: &str, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Config { .. } => e,
        other => config_err(key, other),
    })
}

fn parse_kebab<T: for<'de> Deserialize<'de>>(key: &str, v: &str) -> Result<T> {
    serde_json::from_value(serde_json::Value::String(v.to_string()))
        .map_err(|_| config_err(key, format!("unrecognised value `{v}`")))
}

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| config_err("<file>", format!("{}: {e}", path.display())))?;
        Self::parse(&text, path.parent())
    }

    /// Parse a config; relative data paths resolve against `base_dir`.
    pub fn parse(text: &str, base_dir: Option<&Path>) -> Result<Self> {
        let mut kv = KeyValues::from_text(text)?;
        let kind: ExperimentKind = parse_kebab("experiment", &kv.require("experiment")?)?;
        let name = kv.get("name").unwrap_or_else(|| "experiment".to_string());
        if name.is_empty() || name.contains(['/', '\\', ',', '"']) {
            return Err(config_err(
                "name",
                "must be non-empty without path separators, commas or quotes",
            ));
        }
        let base_seed = kv.parse_or("seed", 0u64)?;
        let report = match kv.get("report") {
            Some(v) => parse_kebab("report", &v)?,
            None => ReportFormat::Csv,
        };
        let output = kv.get("output").map(PathBuf::from);

        let learner = learner_section(&mut kv)?;
        let problem = match kind {
            ExperimentKind::LearnThreshold => {
                let learner_kind = kv.parse_or("learner.kind", LearnerKind::Adaptive)?;
                ProblemSpec::Threshold {
                    problem: threshold_section(&mut kv)?,
                    learner: learner_kind,
                }
            }
            ExperimentKind::Optimize => function_section(&mut kv, base_dir)?,
        };

        let single = match kind {
            ExperimentKind::LearnThreshold => "learner.budget",
            ExperimentKind::Optimize => "optimizer.budget",
        };
        let budgets = match (kv.list::<u64>("sweep.budgets")?, kv.parse::<u64>(single)?) {
            (Some(_), Some(_)) => {
                return Err(config_err(
                    single,
                    "give either sweep.budgets or a single budget, not both",
                ))
            }
            (Some(b), None) => b,
            (None, Some(b)) => vec![b],
            (None, None) => return Err(config_err("sweep.budgets", "missing")),
        };
        if budgets.is_empty() {
            return Err(config_err("sweep.budgets", "empty"));
        }
        if budgets.windows(2).any(|w| w[1] <= w[0]) {
            return Err(config_err("sweep.budgets", "budgets must be strictly increasing"));
        }
        let replications = kv.parse_or("sweep.replications", 1u64)?;
        if replications == 0 {
            return Err(config_err("sweep.replications", "must be >= 1"));
        }
        let statistic = kv.parse_or("sweep.statistic", Statistic::Median)?;
        let default_column = match kind {
            ExperimentKind::LearnThreshold => "excess_risk",
            ExperimentKind::Optimize => "f_error",
        };
        let column = kv.get("sweep.column").unwrap_or_else(|| default_column.to_string());
        super::table::check_error_column(&column).map_err(|e| config_err("sweep.column", e))?;
        let threads = kv.parse::<usize>("sweep.threads")?;
        if threads == Some(0) {
            return Err(config_err("sweep.threads", "must be >= 1"));
        }
        kv.finish()?;
        Ok(Self {
            name,
            kind,
            problem,
            learner,
            budgets,
            replications,
            base_seed,
            output,
            report,
            statistic,
            column,
            threads,
        })
    }
}

fn learner_section(kv: &mut KeyValues) -> Result<LearnerConfig> {
    let d = LearnerConfig::default();
    let orientation = match kv.get("learner.orientation") {
        Some(v) => parse_kebab::<OrientationChoice>("learner.orientation", &v)?,
        None => d.orientation,
    };
    let config = LearnerConfig {
        budget: d.budget,
        confidence: kv.parse_or("learner.confidence", d.confidence)?,
        c_delta: kv.parse_or("learner.c_delta", d.c_delta)?,
        orientation,
        grid_size: kv.parse("learner.grid_size")?,
        bz_k: kv.parse_or("learner.bz_k", d.bz_k)?,
        bz_mu: kv.parse_or("learner.bz_mu", d.bz_mu)?,
    };
    at("learner", config.validate())?;
    Ok(config)
}

fn threshold_section(kv: &mut KeyValues) -> Result<TncProblem> {
    let lo = kv.parse_or("problem.lo", 0.0)?;
    let hi = kv.parse_or("problem.hi", 1.0)?;
    let interval = at("problem.lo", Interval::new(lo, hi))?;
    let t = kv.parse_or("problem.threshold", interval.midpoint())?;
    let k = kv.parse_or("problem.k", 2.0)?;
    let mu = kv.parse_or("problem.mu", 1.0)?;
    let cap = kv.parse_or("problem.cap", 0.5)?;
    let orientation = match kv.get("problem.orientation") {
        Some(v) => parse_kebab::<Orientation>("problem.orientation", &v)?,
        None => Orientation::PositiveRight,
    };
    at("problem", TncProblem::new(interval, t, k, mu, cap, orientation))
}

fn oracle_section(kv: &mut KeyValues) -> Result<SignMode> {
    let mode = kv.get("oracle.mode").unwrap_or_else(|| "gaussian".to_string());
    let mode = match mode.as_str() {
        "gaussian" => SignMode::AdditiveNoise(NoiseDist::Gaussian {
            sigma: kv.parse_or("oracle.sigma", 1.0)?,
        }),
        "uniform" => SignMode::AdditiveNoise(NoiseDist::Uniform {
            halfwidth: kv.parse_or("oracle.halfwidth", 1.0)?,
        }),
        "direct-bernoulli" => SignMode::DirectBernoulli {
            slope: kv.parse_or("oracle.slope", 1.0)?,
            cap: kv.parse_or("oracle.cap", 0.5)?,
        },
        "exact" => SignMode::Exact,
        "quantized" => SignMode::Quantized {
            decimals: kv.parse_or("oracle.decimals", 3u32)?,
        },
        other => return Err(config_err("oracle.mode", format!("unknown mode `{other}`"))),
    };
    at("oracle", mode.validate())?;
    Ok(mode)
}

fn parse_matrix(key: &str, v: &str) -> Result<DMatrix<f64>> {
    let rows: Vec<Vec<f64>> = v
        .split(';')
        .map(|row| {
            split_list(row)
                .map(|x| x.parse::<f64>().map_err(|e| config_err(key, format!("`{x}`: {e}"))))
                .collect()
        })
        .collect::<Result<_>>()?;
    let n = rows.len();
    if rows.iter().any(|r| r.len() != rows[0].len()) || rows[0].is_empty() {
        return Err(config_err(key, "rows must be non-empty and of equal length"));
    }
    Ok(DMatrix::from_row_iterator(n, rows[0].len(), rows.into_iter().flatten()))
}

fn function_section(kv: &mut KeyValues, base_dir: Option<&Path>) -> Result<ProblemSpec> {
    let family = kv.require("function.family")?;
    let lo = kv.parse_or("function.lo", -1.0)?;
    let hi = kv.parse_or("function.hi", 1.0)?;
    let cube = |dim: usize| at("function.lo", DomainBox::cube(dim, lo, hi));
    let function = match family.as_str() {
        "separable-power" => {
            let coeffs = kv
                .list::<f64>("function.coeffs")?
                .ok_or_else(|| config_err("function.coeffs", "missing"))?;
            let k = kv.parse_or("function.k", 2.0)?;
            let minimizer = kv
                .list("function.minimizer")?
                .unwrap_or_else(|| vec![0.0; coeffs.len()]);
            let domain = cube(coeffs.len())?;
            at("function", UcFunction::separable_power(coeffs, k, minimizer, domain))?
        }
        "quadratic" => {
            let a = match (kv.get("function.matrix"), kv.list::<f64>("function.diagonal")?) {
                (Some(m), None) => parse_matrix("function.matrix", &m)?,
                (None, Some(d)) => DMatrix::from_diagonal(&nalgebra::DVector::from_vec(d)),
                _ => {
                    return Err(config_err(
                        "function.matrix",
                        "give exactly one of function.matrix or function.diagonal",
                    ))
                }
            };
            let minimizer = kv.list("function.minimizer")?.unwrap_or_else(|| vec![0.0; a.ncols()]);
            let domain = cube(a.ncols())?;
            at("function", UcFunction::quadratic(a, minimizer, domain))?
        }
        "ridge" => {
            let data = PathBuf::from(kv.require("function.data")?);
            let path = match base_dir {
                Some(dir) if data.is_relative() => dir.join(&data),
                _ => data,
            };
            let text = std::fs::read_to_string(&path)
                .map_err(|e| config_err("function.data", format!("{}: {e}", path.display())))?;
            let (a, b) = at("function.data", parse_ridge_text(&text))?;
            let domain = cube(a.ncols())?;
            at("function", UcFunction::ridge(a, b, domain))?
        }
        other => return Err(config_err("function.family", format!("unknown family `{other}`"))),
    };
    let oracle = oracle_section(kv)?;
    let epoch_rule = match kv.get("optimizer.epoch_rule").as_deref() {
        None | Some("log-squared") => EpochRule::LogSquared,
        Some(v) => EpochRule::Explicit(v.parse().map_err(|_| {
            config_err(
                "optimizer.epoch_rule",
                format!("`{v}`: expected `log-squared` or an epoch count"),
            )
        })?),
    };
    let line_search = kv.parse_or("optimizer.line_search", LearnerKind::Adaptive)?;
    let x0 = match kv.get("optimizer.x0").as_deref() {
        None | Some("center") => StartPoint::Center,
        Some(v) => {
            let p = split_list(v)
                .map(|x| {
                    x.parse::<f64>()
                        .map_err(|e| config_err("optimizer.x0", format!("`{x}`: {e}")))
                })
                .collect::<Result<Vec<_>>>()?;
            at("optimizer.x0", function.domain().check(&p))?;
            StartPoint::Point(p)
        }
    };
    if kv.has("learner.kind") {
        return Err(config_err(
            "learner.kind",
            "optimize experiments select the learner with optimizer.line_search",
        ));
    }
    Ok(ProblemSpec::Function {
        function: Box::new(function),
        oracle,
        epoch_rule,
        line_search,
        x0,
    })
}

impl ProblemSpec {
    pub fn start_point(&self) -> Option<Vec<f64>> {
        match self {
            ProblemSpec::Function { function, x0, .. } => Some(match x0 {
                StartPoint::Center => function.domain().center(),
                StartPoint::Point(p) => p.clone(),
            }),
            ProblemSpec::Threshold { .. } => None,
        }
    }
}

/// Worker count: explicit setting, then the environment, then the pool default.
pub fn resolve_threads(explicit: Option<usize>) -> Option<usize> {
    explicit.or_else(|| {
        std::env::var(THREADS_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
            .filter(|&n| n > 0)
    })
}
