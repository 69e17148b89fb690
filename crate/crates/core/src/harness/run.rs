use std::time::Instant;

use rayon::prelude::*;

use super::config::{resolve_threads, ExperimentConfig, ProblemSpec};
use super::table::{RunRow, RunTable};
use crate::error::{Error, Result};
use crate::learners::{run_learner, LearnerConfig};
use crate::metrics::{error_record, ErrorRecord, RunMeta, Target};
use crate::optimizer::{rssgd, OptimizerConfig};
use crate::oracles::{stream_rng, LabelOracle, SignOracle, StreamRole};

/// Run every (budget, replication) cell on the configured worker pool.
pub fn run_experiment(config: &ExperimentConfig) -> Result<RunTable> {
    run_experiment_with_threads(config, resolve_threads(config.threads))
}

/// Like [`run_experiment`] with an explicit worker count (`None` = pool default).
pub fn run_experiment_with_threads(config: &ExperimentConfig, threads: Option<usize>) -> Result<RunTable> {
    let cells: Vec<(u64, u64)> = config
        .budgets
        .iter()
        .flat_map(|&b| (0..config.replications).map(move |r| (b, r)))
        .collect();
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| Error::Io(e.to_string()))?;
    let rows = pool.install(|| {
        cells
            .par_iter()
            .map(|&(budget, replication)| run_cell(config, budget, replication))
            .collect()
    });
    Ok(RunTable { rows })
}

fn run_cell(config: &ExperimentConfig, budget: u64, replication: u64) -> RunRow {
    let start = Instant::now();
    let outcome = measure(config, budget, replication);
    let mut row = RunRow {
        experiment: config.name.clone(),
        budget,
        replication,
        seed: config.base_seed,
        estimate: Vec::new(),
        point_error: None,
        excess_risk: None,
        f_error: None,
        queries_used: None,
        wall_time_ms: 0.0,
        error: None,
    };
    match outcome {
        Ok((estimate, rec)) => {
            row.estimate = estimate;
            row.point_error = Some(rec.point_error);
            row.excess_risk = rec.excess_risk;
            row.f_error = rec.f_error;
            row.queries_used = Some(rec.queries_used);
        }
        Err(e) => row.error = Some(e.to_string()),
    }
    row.wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
    row
}

fn measure(config: &ExperimentConfig, budget: u64, replication: u64) -> Result<(Vec<f64>, ErrorRecord)> {
    let seed = config.base_seed;
    let meta = |queries_used| RunMeta {
        queries_used,
        seed,
        budget,
    };
    match &config.problem {
        ProblemSpec::Threshold { problem, learner } => {
            let mut oracle = LabelOracle::new(*problem, stream_rng(seed, replication, StreamRole::LabelOracle));
            let mut rng = stream_rng(seed, replication, StreamRole::Learner);
            let learner_config = LearnerConfig {
                budget,
                ..config.learner
            };
            let est = run_learner(*learner, &mut oracle, problem.interval(), &learner_config, &mut rng)?;
            let rec = error_record(Target::Threshold(problem), &[est.point], meta(est.queries_used))?;
            Ok((vec![est.point], rec))
        }
        ProblemSpec::Function {
            function,
            oracle,
            epoch_rule,
            line_search,
            ..
        } => {
            let x0 = config
                .problem
                .start_point()
                .expect("function problems have a start point");
            let mut sign = SignOracle::new(function, *oracle, stream_rng(seed, replication, StreamRole::SignOracle))?;
            let opt = OptimizerConfig {
                budget,
                epoch_rule: *epoch_rule,
                line_search: *line_search,
                learner: config.learner,
                seed,
                stream: replication,
            };
            let res = rssgd(function, &mut sign, &opt, &x0)?;
            let rec = error_record(Target::Function(function), &res.x_final, meta(res.queries_used))?;
            Ok((res.x_final, rec))
        }
    }
}
