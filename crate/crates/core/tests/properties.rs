mod common;

use proptest::prelude::*;

use signdescent::learners::{run_learner, LearnerConfig, LearnerKind};
use signdescent::metrics::{adaptive_simpson, excess_risk, excess_risk_quadrature, fit_rate_slope};
use signdescent::optimizer::{rssgd, EpochRule, OptimizerConfig};
use signdescent::oracles::{stream_rng, LabelOracle, SignMode, SignOracle, StreamRole};
use signdescent::problems::{make_tnc_problem, DomainBox, Interval, Orientation, UcFunction};

fn pass(check: common::Check) {
    if let Err(e) = check {
        panic!("{e}");
    }
}

#[test]
fn tnc_sandwich_on_grid() {
    pass(common::tnc_sandwich_grid());
}

#[test]
fn uc_inequality_holds() {
    pass(common::uc_inequality(1000));
}

#[test]
fn lkss_inequality_holds() {
    pass(common::lkss_inequality(1000));
}

#[test]
fn gradients_match_finite_differences() {
    pass(common::gradient_finite_differences(1000));
}

#[test]
fn ridge_residual_cache_is_consistent() {
    pass(common::ridge_cache_consistency());
}

#[test]
fn directional_minima_are_stationary() {
    pass(common::directional_min_stationary(200));
}

#[test]
fn oracles_are_calibrated() {
    pass(common::oracle_calibration());
}

#[test]
fn quantized_oracle_preserves_signs() {
    pass(common::quantized_sign_preserving());
}

#[test]
fn learners_spend_exactly_their_budget() {
    pass(common::budget_exactness());
}

#[test]
fn quadrature_matches_closed_form_risk() {
    pass(common::quadrature_agreement(1000));
}

#[test]
fn sweeps_are_deterministic_across_worker_counts() {
    pass(common::determinism_parallel_serial());
}

/// On `f(x) = c |x - x*|^k` with sign noise `sign(g + N(0, sigma^2))`, the label
/// margin is `|Phi(g / sigma) - 1/2|`. Since `2 Phi(y) - 1` is concave on
/// `y >= 0` with slope `2 phi(0)` at zero and at least `2 phi(G) y` on `[0, G]`,
/// risk / f_error lies in `[2 phi(G/sigma) / sigma, 2 phi(0) / sigma]`.
#[test]
fn risk_and_function_error_bridge() {
    let phi = |y: f64| (-0.5 * y * y).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let mut r = common::rng(21);
    for &(c, k, sigma) in &[(1.0, 2.0, 1.0), (0.5, 3.0, 0.3), (2.0, 2.5, 2.0)] {
        let f = UcFunction::separable_power(vec![c], k, vec![0.1], DomainBox::cube(1, -1.0, 1.0).unwrap()).unwrap();
        let mode = SignMode::gaussian(sigma);
        for _ in 0..100 {
            let x = rand::Rng::random_range(&mut r, -1.0..1.0);
            let fe = f.f_error(&[x]).unwrap();
            let deriv = |u: f64| f.grad_coord(&[u], 0).unwrap();
            let (a, b) = (x.min(0.1), x.max(0.1));
            let risk = adaptive_simpson(|u| 2.0 * mode.margin(deriv(u)), a, b, 1e-12, 50);
            let g_max = deriv(x).abs();
            let upper = 2.0 * phi(0.0) / sigma * fe;
            let lower = 2.0 * phi(g_max / sigma) / sigma * fe;
            assert!(
                risk <= upper * (1.0 + 1e-9) + 1e-13 && risk >= lower * (1.0 - 1e-9) - 1e-13,
                "c={c} k={k} sigma={sigma} x={x}: risk {risk} outside [{lower}, {upper}]"
            );
        }
    }
}

#[test]
fn exact_bisect_descent_never_goes_uphill() {
    let a = nalgebra::DMatrix::from_row_slice(3, 3, &[2.0, 0.6, 0.3, 0.6, 1.5, 0.5, 0.3, 0.5, 1.0]);
    let f = UcFunction::quadratic(a, vec![0.35, -0.2, 0.1], DomainBox::cube(3, -1.0, 1.0).unwrap()).unwrap();
    let mut cfg = OptimizerConfig::new(3000, LearnerKind::Bisect);
    cfg.epoch_rule = EpochRule::Explicit(100);
    for seed in 0..5 {
        cfg.seed = seed;
        let mut o = SignOracle::new(&f, SignMode::Exact, stream_rng(seed, 0, StreamRole::SignOracle)).unwrap();
        let res = rssgd(&f, &mut o, &cfg, &f.domain().center()).unwrap();
        // Bisection resolution 2 * 2^-(N+1) on a segment of length at most 2.
        let slack = f.lkss() * (2.0 * 0.5f64.powi(31)).powi(2);
        let mut prev = f.f_eval(&f.domain().center()).unwrap();
        for e in &res.trace {
            assert!(e.f_value <= prev + slack, "f rose from {prev} to {}", e.f_value);
            prev = e.f_value;
        }
    }
}

#[test]
fn noisy_descent_makes_progress_on_average() {
    let f =
        UcFunction::quadratic_diagonal(&[1.0, 2.0], vec![0.4, -0.3], DomainBox::cube(2, -1.0, 1.0).unwrap()).unwrap();
    let reps = 50;
    let epochs = 12usize;
    let mut cfg = OptimizerConfig::new(epochs as u64 * 400, LearnerKind::Adaptive);
    cfg.epoch_rule = EpochRule::Explicit(epochs as u64);
    let mut errs = vec![Vec::new(); epochs];
    for rep in 0..reps {
        cfg.stream = rep;
        let mut o = SignOracle::new(&f, SignMode::gaussian(1.0), stream_rng(0, rep, StreamRole::SignOracle)).unwrap();
        let res = rssgd(&f, &mut o, &cfg, &[-0.9, 0.9]).unwrap();
        for (e, rec) in res.trace.iter().enumerate() {
            errs[e].push(rec.f_error);
        }
    }
    let stats: Vec<(f64, f64)> = errs
        .iter()
        .map(|v| {
            (
                signdescent::metrics::mean(v).unwrap(),
                signdescent::metrics::standard_error(v).unwrap(),
            )
        })
        .collect();
    for e in 3..epochs {
        let (m, se) = stats[e];
        assert!(
            m <= stats[e - 1].0 + se.max(stats[e - 1].1),
            "mean f_error rose at epoch {e}: {:?}",
            stats
        );
    }
    assert!(stats[epochs - 1].0 < 0.25 * stats[0].0, "{stats:?}");
}

#[test]
fn optimizer_stays_feasible_and_within_budget() {
    let f = UcFunction::separable_power(
        vec![1.0, 2.0, 0.5],
        3.0,
        vec![0.9, -0.95, 0.0],
        DomainBox::cube(3, -1.0, 1.0).unwrap(),
    )
    .unwrap();
    for (rep, mode) in [SignMode::gaussian(0.5), SignMode::Exact].into_iter().enumerate() {
        let mut o = SignOracle::new(&f, mode, stream_rng(1, rep as u64, StreamRole::SignOracle)).unwrap();
        let mut cfg = OptimizerConfig::new(20_000, LearnerKind::Adaptive);
        cfg.stream = rep as u64;
        let res = rssgd(&f, &mut o, &cfg, &[-1.0, 1.0, 0.3]).unwrap();
        assert!(res.queries_used <= 20_000);
        assert!(f.domain().contains(&res.x_final));
    }
}

#[test]
fn adaptive_learner_keeps_estimates_inside_search() {
    let p = make_tnc_problem(
        Interval::new(-1.0, 2.0).unwrap(),
        1.95,
        2.0,
        1.0,
        0.3,
        Orientation::PositiveLeft,
    )
    .unwrap();
    for rep in 0..20 {
        let mut o = LabelOracle::new(p, stream_rng(3, rep, StreamRole::LabelOracle));
        let search = Interval::new(-0.5, 2.0).unwrap();
        let est = run_learner(
            LearnerKind::Adaptive,
            &mut o,
            search,
            &LearnerConfig::with_budget(3000),
            &mut stream_rng(3, rep, StreamRole::Learner),
        )
        .unwrap();
        assert!(search.contains(est.point));
        let mut radius = search.length();
        for rec in &est.trace {
            assert_eq!(rec.radius, radius);
            assert!(search.contains(rec.estimate));
            radius /= 2.0;
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn slope_is_scale_invariant(
        errors in prop::collection::vec(1e-6f64..10.0, 2..8),
        scale in 1e-3f64..1e3,
    ) {
        let pts: Vec<(f64, f64)> = errors.iter().enumerate().map(|(i, &e)| (2f64.powi(i as i32 + 4), e)).collect();
        let scaled: Vec<(f64, f64)> = pts.iter().map(|&(t, e)| (t, e * scale)).collect();
        let a = fit_rate_slope(&pts).unwrap();
        let b = fit_rate_slope(&scaled).unwrap();
        prop_assert!((a.slope - b.slope).abs() < 1e-9);
        prop_assert!((b.intercept - a.intercept - scale.ln()).abs() < 1e-9);
    }

    #[test]
    fn zero_errors_are_reported_not_dropped(
        errors in prop::collection::vec(prop_oneof![Just(0.0), 1e-3f64..1.0], 1..10),
    ) {
        let pts: Vec<(f64, f64)> = errors.iter().enumerate().map(|(i, &e)| (10.0 * (i + 1) as f64, e)).collect();
        let zeros = errors.iter().filter(|&&e| e == 0.0).count();
        match fit_rate_slope(&pts) {
            Ok(fit) => prop_assert_eq!((fit.used, fit.excluded), (errors.len() - zeros, zeros)),
            Err(signdescent::Error::InsufficientPoints { usable, excluded }) => {
                prop_assert!(usable < 2);
                prop_assert_eq!(excluded, zeros);
            }
            Err(e) => prop_assert!(false, "unexpected error {}", e),
        }
    }

    #[test]
    fn risk_closed_form_matches_quadrature(
        t in 0.0f64..1.0,
        x in 0.0f64..1.0,
        k in 1.0f64..5.0,
        mu in 0.05f64..20.0,
        cap in 0.01f64..0.5,
    ) {
        let p = make_tnc_problem(Interval::unit(), t, k, mu, cap, Orientation::PositiveRight).unwrap();
        let closed = excess_risk(&p, x).unwrap();
        let numeric = excess_risk_quadrature(&p, x).unwrap();
        prop_assert!((closed - numeric).abs() <= 1e-8, "closed {} numeric {}", closed, numeric);
        prop_assert!(closed >= 0.0);
    }

    #[test]
    fn risk_grows_away_from_threshold(t in 0.05f64..0.95, d1 in 0.0f64..0.5, d2 in 0.0f64..0.5) {
        let p = make_tnc_problem(Interval::unit(), t, 2.0, 1.0, 0.4, Orientation::PositiveRight).unwrap();
        let (near, far) = if d1 < d2 { (d1, d2) } else { (d2, d1) };
        let a = (t + near).min(1.0);
        let b = (t + far).min(1.0);
        prop_assert!(excess_risk(&p, a).unwrap() <= excess_risk(&p, b).unwrap());
    }

    #[test]
    fn interval_ball_is_contained(lo in -5.0f64..5.0, len in 0.01f64..5.0, c in -6.0f64..11.0, r in 0.0f64..4.0) {
        let iv = Interval::new(lo, lo + len).unwrap();
        if let Some(b) = iv.ball(c, r) {
            prop_assert!(b.is_subset_of(&iv));
            prop_assert!(b.length() <= 2.0 * r + 1e-12);
        }
    }
}
