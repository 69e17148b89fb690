//! Property checks shared by the property tests and the acceptance report.
//!
//! Every check returns `Ok(summary)` or `Err(first violation)`.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use signdescent::harness::{run_experiment_with_threads, ExperimentConfig};
use signdescent::learners::{epoch_schedule, run_learner, LearnerConfig, LearnerKind, OrientationChoice};
use signdescent::metrics::{adaptive_simpson, excess_risk};
use signdescent::oracles::{
    stream_rng, Label, LabelOracle, LabelSource, NoiseDist, SignMode, SignOracle, SignSource, StreamRole,
};
use signdescent::problems::{make_tnc_problem, DomainBox, Interval, Orientation, RidgeState, TncProblem, UcFunction};

pub type Check = Result<String, String>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn point_in(rng: &mut ChaCha8Rng, domain: &DomainBox, margin: f64) -> Vec<f64> {
    domain
        .sides()
        .iter()
        .map(|s| rng.random_range(s.lo() + margin..s.hi() - margin))
        .collect()
}

pub fn random_tnc(rng: &mut ChaCha8Rng) -> TncProblem {
    let lo = rng.random_range(-2.0..1.0);
    let hi = lo + rng.random_range(0.5..3.0);
    let t = rng.random_range(lo..hi);
    let k = rng.random_range(1.0..4.0);
    let mu = rng.random_range(0.1..5.0);
    let cap = rng.random_range(0.05..0.5);
    let o = if rng.random::<bool>() {
        Orientation::PositiveRight
    } else {
        Orientation::PositiveLeft
    };
    make_tnc_problem(Interval::new(lo, hi).unwrap(), t, k, mu, cap, o).unwrap()
}

/// Ridge data with its `(A, b)` so callers can recompute residuals.
pub fn random_ridge(rng: &mut ChaCha8Rng, n: usize, d: usize) -> (UcFunction, DMatrix<f64>, DVector<f64>) {
    let a = DMatrix::from_fn(n, d, |_, _| rng.random_range(-1.0..1.0));
    let b = DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
    let f = UcFunction::ridge(a.clone(), b.clone(), DomainBox::cube(d, -5.0, 5.0).unwrap()).unwrap();
    (f, a, b)
}

/// A spread of test functions covering every family and several exponents.
pub fn function_zoo(rng: &mut ChaCha8Rng) -> Vec<UcFunction> {
    let mut zoo = Vec::new();
    for &(k, d) in &[(2.0, 3), (3.0, 3), (4.0, 2), (2.5, 4)] {
        let dom = DomainBox::cube(d, -1.0, 1.0).unwrap();
        let coeffs = (0..d).map(|_| rng.random_range(0.5..3.0)).collect();
        let xs = point_in(rng, &dom, 0.1);
        zoo.push(UcFunction::separable_power(coeffs, k, xs, dom).unwrap());
    }
    for d in [2, 4] {
        let b = DMatrix::from_fn(d, d, |_, _| rng.random_range(-1.0..1.0));
        let a = b.transpose() * &b + DMatrix::identity(d, d) * 0.5;
        let dom = DomainBox::cube(d, -2.0, 2.0).unwrap();
        let xs = point_in(rng, &dom, 0.5);
        zoo.push(UcFunction::quadratic(a, xs, dom).unwrap());
    }
    zoo.push(random_ridge(rng, 6, 3).0);
    zoo
}

pub fn tnc_sandwich_grid() -> Check {
    let mut r = rng(11);
    let mut checked = 0;
    for _ in 0..20 {
        let p = random_tnc(&mut r);
        let iv = p.interval();
        let t = p.threshold();
        let mut prev: Option<(f64, f64)> = None;
        for i in 0..=10_000 {
            let x = iv.lo() + iv.length() * i as f64 / 10_000.0;
            let eta = p.eta_at(x).map_err(|e| e.to_string())?;
            let dev = (eta - 0.5).abs();
            let power = p.mu() * (x - t).abs().powf(p.k() - 1.0);
            if x != t && power <= p.cap() && (dev - power).abs() > 1e-12 * (1.0 + power) {
                return Err(format!(
                    "sandwich broken at x = {x}: |eta - 1/2| = {dev}, mu|x-t|^(k-1) = {power}"
                ));
            }
            if dev > p.cap() + 1e-15 {
                return Err(format!("margin above cap at x = {x}"));
            }
            let right = match p.orientation() {
                Orientation::PositiveRight => 1.0,
                Orientation::PositiveLeft => -1.0,
            };
            let expected = right * (x - t).signum();
            if x != t && eta != 0.5 && (eta - 0.5).signum() != expected {
                return Err(format!("orientation wrong at x = {x}"));
            }
            if let Some((px, pe)) = prev {
                // Moving away from t on either side never shrinks the margin.
                let away = (x - t).abs() > (px - t).abs() && (x - t).signum() == (px - t).signum();
                if away && dev + 1e-15 < (pe - 0.5).abs() {
                    return Err(format!("margin not monotone between {px} and {x}"));
                }
            }
            prev = Some((x, eta));
            checked += 1;
        }
    }
    Ok(format!("{checked} grid points on 20 problems"))
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

pub fn uc_inequality(pairs: usize) -> Check {
    let mut r = rng(12);
    for f in function_zoo(&mut r) {
        for _ in 0..pairs {
            let x = point_in(&mut r, f.domain(), 0.0);
            let y = point_in(&mut r, f.domain(), 0.0);
            let fx = f.f_eval(&x).unwrap();
            let fy = f.f_eval(&y).unwrap();
            let g = f.gradient(&x).unwrap();
            let diff: Vec<f64> = y.iter().zip(&x).map(|(a, b)| a - b).collect();
            let lin: f64 = g.iter().zip(&diff).map(|(a, b)| a * b).sum();
            let gap = fy - fx - lin;
            let bound = 0.5 * f.lambda() * norm(&diff).powf(f.k());
            if gap < bound - 1e-10 * (1.0 + fx.abs() + fy.abs()) {
                return Err(format!("{:?}: gap {gap} below lambda bound {bound}", f.family()));
            }
        }
    }
    Ok(format!("{pairs} pairs on each of 7 functions"))
}

pub fn lkss_inequality(points: usize) -> Check {
    let mut r = rng(13);
    for f in function_zoo(&mut r) {
        for _ in 0..points {
            let x = point_in(&mut r, f.domain(), 0.0);
            let j = r.random_range(0..f.dim());
            let g = f.grad_coord(&x, j).unwrap();
            let step = f.coord_line(&x, j).unwrap().stationary_step();
            let bound = f.lkss() * step.abs().powf(f.k() - 1.0);
            if g.abs() > bound * (1.0 + 1e-12) + 1e-14 {
                return Err(format!(
                    "{:?}: |g_{j}| = {} exceeds Lambda bound {bound}",
                    f.family(),
                    g.abs()
                ));
            }
        }
    }
    Ok(format!("{points} points on each of 7 functions"))
}

pub fn gradient_finite_differences(points: usize) -> Check {
    let h = 1e-6;
    let mut r = rng(14);
    let mut worst: f64 = 0.0;
    for f in function_zoo(&mut r) {
        for _ in 0..points {
            let mut x = point_in(&mut r, f.domain(), 1e-3);
            let j = r.random_range(0..f.dim());
            let g = f.grad_coord(&x, j).unwrap();
            let x0 = x[j];
            x[j] = x0 + h;
            let up = f.f_eval(&x).unwrap();
            x[j] = x0 - h;
            let down = f.f_eval(&x).unwrap();
            let fd = (up - down) / (2.0 * h);
            let rel = (fd - g).abs() / g.abs().max(1e-3);
            worst = worst.max(rel);
            if rel > 1e-4 {
                return Err(format!("{:?}: analytic {g} vs finite difference {fd}", f.family()));
            }
        }
    }
    Ok(format!("worst relative error {worst:.2e}"))
}

pub fn ridge_cache_consistency() -> Check {
    let mut r = rng(15);
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let (f, a, b) = random_ridge(&mut r, 8, 4);
        let x0 = point_in(&mut r, f.domain(), 1.0);
        let mut state = RidgeState::new(&f, &x0).unwrap();
        for _ in 0..100 {
            let j = r.random_range(0..4);
            let target = (state.x()[j] + r.random_range(-0.5..0.5)).clamp(-5.0, 5.0);
            state.update_coord(&f, j, target - state.x()[j]).unwrap();
        }
        let fresh = &a * DVector::from_column_slice(state.x()) - &b;
        let rel = (state.residual() - &fresh).norm() / fresh.norm().max(1.0);
        worst = worst.max(rel);
        if rel > 1e-10 {
            return Err(format!("cached residual drifted by {rel:e}"));
        }
        for j in 0..4 {
            let cached = state.grad_coord(&f, j).unwrap();
            let direct = f.grad_coord(state.x(), j).unwrap();
            if (cached - direct).abs() > 1e-10 * (1.0 + direct.abs()) {
                return Err(format!("cached gradient {cached} vs direct {direct}"));
            }
        }
    }
    Ok(format!("worst relative drift {worst:.2e} after 100 updates"))
}

pub fn directional_min_stationary(points: usize) -> Check {
    let mut r = rng(16);
    let mut interior = 0;
    for f in function_zoo(&mut r) {
        for _ in 0..points {
            let x = point_in(&mut r, f.domain(), 0.0);
            let j = r.random_range(0..f.dim());
            let step = f.directional_min(&x, j).unwrap();
            let seg = f.domain().segment(&x, j).unwrap();
            if !seg.contains(step) {
                return Err(format!("step {step} leaves the box"));
            }
            if step <= seg.lo() || step >= seg.hi() {
                continue;
            }
            let mut y = x.clone();
            y[j] += step;
            let g = f.grad_coord(&y, j).unwrap();
            if g.abs() > 1e-8 {
                return Err(format!("{:?}: derivative {g} at the directional minimum", f.family()));
            }
            interior += 1;
        }
    }
    Ok(format!("{interior} interior minima stationary"))
}

fn band(n: usize) -> f64 {
    3.0 * (0.25 / n as f64).sqrt()
}

pub fn oracle_calibration() -> Check {
    const N: usize = 100_000;
    let p = make_tnc_problem(Interval::unit(), 0.4, 2.0, 1.0, 0.4, Orientation::PositiveRight).unwrap();
    for &x in &[0.1, 0.38, 0.4, 0.55, 0.95] {
        let mut o = LabelOracle::new(p, stream_rng(1, 0, StreamRole::LabelOracle));
        let plus = (0..N).filter(|_| o.label(x).unwrap() == Label::Plus).count();
        let eta = p.eta_at(x).unwrap();
        let freq = plus as f64 / N as f64;
        if (freq - eta).abs() > band(N) {
            return Err(format!("label oracle at {x}: frequency {freq} vs eta {eta}"));
        }
    }
    let f =
        UcFunction::quadratic_diagonal(&[1.0, 2.0], vec![0.1, -0.2], DomainBox::cube(2, -1.0, 1.0).unwrap()).unwrap();
    let modes = [
        SignMode::gaussian(1.0),
        SignMode::AdditiveNoise(NoiseDist::Uniform { halfwidth: 2.0 }),
        SignMode::DirectBernoulli { slope: 0.7, cap: 0.45 },
        SignMode::Exact,
        SignMode::Quantized { decimals: 3 },
    ];
    for mode in modes {
        for x in [[0.1, -0.2], [0.3, 0.5], [-0.6, -0.2], [0.10004, 0.0]] {
            let mut o = SignOracle::new(&f, mode, stream_rng(2, 0, StreamRole::SignOracle)).unwrap();
            let g = f.grad_coord(&x, 0).unwrap();
            let plus = (0..N).filter(|_| o.sign(&x, 0).unwrap() == Label::Plus).count();
            let freq = plus as f64 / N as f64;
            let expected = mode.prob_positive(g);
            if (freq - expected).abs() > band(N) {
                return Err(format!("{mode:?} at g = {g}: frequency {freq} vs {expected}"));
            }
        }
    }
    Ok(format!("label oracle and 5 sign modes within 3 sigma at {N} draws"))
}

pub fn quantized_sign_preserving() -> Check {
    let mut r = rng(17);
    let f = UcFunction::quadratic_diagonal(
        &[1.0, 3.0, 0.5],
        vec![0.2, -0.1, 0.0],
        DomainBox::cube(3, -1.0, 1.0).unwrap(),
    )
    .unwrap();
    let mut o = SignOracle::new(
        &f,
        SignMode::Quantized { decimals: 3 },
        stream_rng(3, 0, StreamRole::SignOracle),
    )
    .unwrap();
    let mut tested = 0;
    while tested < 100_000 {
        // Half the points sit within rounding distance of a directional minimum.
        let mut x = point_in(&mut r, f.domain(), 0.0);
        let j = r.random_range(0..3);
        if tested % 2 == 0 {
            x[j] = f.minimizer()[j] + r.random_range(-1e-3..1e-3);
        }
        let g = f.grad_coord(&x, j).unwrap();
        if g == 0.0 {
            continue;
        }
        if o.sign(&x, j).unwrap().sign() != g.signum() {
            return Err(format!("sign flipped at {x:?}, coordinate {j}, g = {g}"));
        }
        tested += 1;
    }
    Ok(format!("{tested} nonzero gradients kept their sign"))
}

pub fn budget_exactness() -> Check {
    let p = make_tnc_problem(Interval::unit(), 0.37, 2.0, 1.0, 0.4, Orientation::PositiveRight).unwrap();
    for kind in [
        LearnerKind::Passive,
        LearnerKind::Bz,
        LearnerKind::Adaptive,
        LearnerKind::Bisect,
    ] {
        for t in [1u64, 3, 4, 17, 100, 1000, 4096] {
            let mut o = LabelOracle::new(p, stream_rng(4, t, StreamRole::LabelOracle));
            let cfg = LearnerConfig {
                orientation: OrientationChoice::PositiveRight,
                ..LearnerConfig::with_budget(t)
            };
            let est = run_learner(
                kind,
                &mut o,
                Interval::unit(),
                &cfg,
                &mut stream_rng(4, t, StreamRole::Learner),
            )
            .map_err(|e| format!("{kind:?} at T = {t}: {e}"))?;
            if est.queries_used != o.queries_used() || est.queries_used > t {
                return Err(format!(
                    "{kind:?} at T = {t}: reported {} queries, oracle saw {}",
                    est.queries_used,
                    o.queries_used()
                ));
            }
            let expected = match kind {
                LearnerKind::Adaptive => {
                    let (e, n) = epoch_schedule(t, cfg.c_delta);
                    e * n
                }
                _ => t,
            };
            if est.queries_used != expected {
                return Err(format!(
                    "{kind:?} at T = {t}: used {} queries, expected {expected}",
                    est.queries_used
                ));
            }
        }
    }
    Ok("4 learners x 7 budgets".into())
}

const DETERMINISM_CONFIG: &str = "
experiment = learn-threshold
problem.threshold = 0.37
problem.k = 2
problem.cap = 0.4
learner.kind = adaptive
sweep.budgets = 64, 256, 1024
sweep.replications = 12
seed = 5
";

const DETERMINISM_OPT_CONFIG: &str = "
experiment = optimize
function.family = quadratic
function.diagonal = 1, 2
function.minimizer = 0.3, -0.1
oracle.mode = gaussian
oracle.sigma = 0.5
optimizer.line_search = adaptive
sweep.budgets = 500, 2000
sweep.replications = 6
seed = 9
";

fn without_timing(csv: String) -> String {
    csv.lines()
        .map(|l| {
            let mut cells: Vec<&str> = l.split(',').collect();
            cells[10] = "";
            cells.join(",")
        })
        .collect::<Vec<_>>()
        .join("\n")
}

pub fn determinism_parallel_serial() -> Check {
    for text in [DETERMINISM_CONFIG, DETERMINISM_OPT_CONFIG] {
        let config = ExperimentConfig::parse(text, None).map_err(|e| e.to_string())?;
        let serial = run_experiment_with_threads(&config, Some(1)).map_err(|e| e.to_string())?;
        let parallel = run_experiment_with_threads(&config, Some(8)).map_err(|e| e.to_string())?;
        let again = run_experiment_with_threads(&config, Some(3)).map_err(|e| e.to_string())?;
        let a = without_timing(serial.to_csv_string());
        if a != without_timing(parallel.to_csv_string()) || a != without_timing(again.to_csv_string()) {
            return Err(format!("{:?} tables differ between worker counts", config.kind));
        }
        if serial.failures().count() > 0 {
            return Err("determinism sweep had failing cells".into());
        }
    }
    Ok("identical tables with 1, 3 and 8 workers".into())
}

pub fn quadrature_agreement(pairs: usize) -> Check {
    let mut r = rng(18);
    let mut worst: f64 = 0.0;
    for _ in 0..pairs {
        let p = random_tnc(&mut r);
        let iv = p.interval();
        let x = r.random_range(iv.lo()..=iv.hi());
        let closed = excess_risk(&p, x).unwrap();
        let (a, b) = (x.min(p.threshold()), x.max(p.threshold()));
        let numeric = adaptive_simpson(|u| (2.0 * p.eta_at(u).unwrap() - 1.0).abs(), a, b, 1e-10, 50);
        worst = worst.max((closed - numeric).abs());
        if (closed - numeric).abs() > 1e-8 {
            return Err(format!("closed form {closed} vs quadrature {numeric} at {x}"));
        }
    }
    Ok(format!("{pairs} pairs, worst gap {worst:.2e}"))
}
