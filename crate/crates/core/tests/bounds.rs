use proptest::prelude::*;

use lpcb::erasure::{bounded_fraction_bounds, erasure_bounds, MarkovErasure};
use lpcb::exponent::{optimize_ratio_minus_linear, optimize_ratio_plus_linear};
use lpcb::fading::{
    ar_log_term, ct_fading_bounds, dt_fading_bounds, dt_log_integral, ou_lower_objective, ou_optimal_bounds, ou_upper_objective,
    FadingScene, SpectralModel,
};
use lpcb::gaussian::{interference_upper, zero_rate_optimum, ChannelScene, ReferenceExponent};
use lpcb::grid::linspace;
use lpcb::source::{gaussian_rate_distortion, gaussian_rd_band, phi, RdScene};
use lpcb::verify::{mc_finite_n_lpcb, McConfig, McScene};
use lpcb::{AlphaGrid, DivergenceOrder, Execution};

/// Dense scan, geometric in `α − 1` over `(1, hi)`, followed by a local
/// ternary refinement.
fn brute_force(f: impl Fn(f64) -> f64, hi: f64, minimize: bool) -> (f64, f64) {
    let sign = if minimize { 1.0 } else { -1.0 };
    let n = 20_000;
    let (lo_e, hi_e) = (1e-6f64.ln(), (hi - 1.0).ln());
    let xs: Vec<f64> = (0..n).map(|k| 1.0 + (lo_e + (hi_e - lo_e) * k as f64 / n as f64).exp()).collect();
    let mut best = (f64::NAN, f64::INFINITY);
    for &x in &xs {
        let v = sign * f(x);
        if v < best.1 {
            best = (x, v);
        }
    }
    let (mut lo, mut up) = ((best.0 - 1.0) / 1.01 + 1.0, ((best.0 - 1.0) * 1.01 + 1.0).min(hi));
    for _ in 0..200 {
        let m1 = lo + (up - lo) / 3.0;
        let m2 = up - (up - lo) / 3.0;
        if sign * f(m1) < sign * f(m2) {
            up = m2;
        } else {
            lo = m1;
        }
    }
    let x = 0.5 * (lo + up);
    (x, f(x))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ratio_plus_matches_scan(u in 0.01f64..10.0, v in 0.01f64..10.0) {
        let opt = optimize_ratio_plus_linear(u, v).unwrap();
        let (x, val) = brute_force(|a| a / (a - 1.0) * u + a * v, 1e4, true);
        prop_assert!((opt.value - val).abs() <= 1e-9 * val);
        prop_assert!((opt.alpha_star - x).abs() <= 1e-5 * x);
    }

    #[test]
    fn ratio_minus_matches_scan(u in 0.01f64..10.0, v in 0.01f64..10.0) {
        let opt = optimize_ratio_minus_linear(u, v).unwrap();
        let (_, val) = brute_force(|a| (a - 1.0) / a * u - (a - 1.0) * v, 1e4, false);
        prop_assert!((opt.value - val.max(0.0)).abs() <= 1e-9 * u);
    }

    #[test]
    fn ou_optimizers_match_scan(a in 0.2f64..5.0, frac in 0.05f64..0.9, p in 0.01f64..1.0, e in 0.1f64..5.0) {
        let b = frac * a / (2.0 * p.sqrt());
        let Ok(opt) = ou_optimal_bounds(a, b, p, e) else { return Ok(()) };
        let limit = a / (2.0 * b * p.sqrt());
        let (_, up) = brute_force(|x| ou_upper_objective(a, b, p, e, x), limit, true);
        let (_, lo) = brute_force(|x| ou_lower_objective(a, b, p, e, x), limit, false);
        prop_assert!((opt.e_upper - up).abs() <= 1e-8 * up);
        prop_assert!((opt.e_lower - lo.max(0.0)).abs() <= 1e-8 * e);
    }

    #[test]
    fn ar_closed_log_term_matches_numeric_integral(a in -0.9f64..0.9, b in 0.01f64..2.0, frac in 0.0f64..0.95) {
        let c = frac * (1.0 - a.abs()).powi(2) / (2.0 * b * b);
        let closed = ar_log_term(a, b, c).unwrap();
        let numeric = -dt_log_integral(&SpectralModel::Ar { a, b }, c).unwrap();
        prop_assert!((closed - numeric).abs() <= 1e-8 * closed.abs().max(1e-12));
    }

    #[test]
    fn fading_bounds_bracket_the_reference(a in -0.9f64..0.9, b in 0.01f64..0.5, p in 0.01f64..1.0, e in 0.1f64..5.0) {
        let grid = AlphaGrid::default();
        let ar = FadingScene::from_snr(p, e, SpectralModel::Ar { a, b }).unwrap();
        let t = dt_fading_bounds(&ar, &grid).unwrap();
        prop_assert!(t.upper.value >= e && t.lower.value <= e && t.lower.value >= 0.0);
        let ou = FadingScene::from_snr(p, e, SpectralModel::Ou { a: a.abs() + 0.1, b }).unwrap();
        if let Ok(t) = ct_fading_bounds(&ou, &grid) {
            if t.upper.feasible {
                prop_assert!(t.upper.value >= e && t.lower.value <= e);
            }
        }
    }

    #[test]
    fn erasure_bounds_bracket_the_reference(z in 0.0f64..1.0, p in 0.01f64..0.5, e in 0.1f64..5.0) {
        let t = bounded_fraction_bounds(z, p, e, &AlphaGrid::default()).unwrap();
        prop_assert!(t.upper.value >= e - 1e-12 && t.lower.value <= e + 1e-12);
    }

    #[test]
    fn rd_band_contains_the_reference(rate in 0.0f64..3.0, d in 0.05f64..1.0, amp in 0.0f64..1.0) {
        let scene = RdScene::new(rate, d, 1.0, amp).unwrap();
        let band = gaussian_rd_band(&scene);
        let u = rate - gaussian_rate_distortion(d, 1.0);
        let f = if u > 0.0 { phi(u) } else { 0.0 };
        prop_assert!(band.lower <= f + 1e-15 && f <= band.upper + 1e-15);
    }
}

#[test]
fn zero_rate_interference_optimum_is_reached_by_the_joint_scan() {
    for (power, noise, gamma) in [(1.0, 1.0, 0.1), (4.0, 0.5, 0.3), (0.5, 2.0, 0.05)] {
        let c_q = power / (2.0 * noise);
        let scene = ChannelScene::new(0.0, power, noise, gamma, ReferenceExponent::VeryNoisy { c_q }).unwrap();
        let up = interference_upper(&scene, &AlphaGrid::default(), &linspace(0.02, 4.0, 200));
        let expected = zero_rate_optimum(power, noise, gamma);
        assert!((up.value - expected).abs() <= 1e-6 * expected, "{} vs {expected}", up.value);
    }
}

#[test]
fn hidden_markov_bounds_are_ordered() {
    let me = MarkovErasure::new(&[vec![0.9, 0.1], vec![0.3, 0.7]], vec![1, 0], 0.05).unwrap();
    let t = erasure_bounds(&me, 1.0, &AlphaGrid::default()).unwrap();
    assert!(t.upper.value >= 1.0 && t.lower.value <= 1.0 && t.lower.value > 0.0);
}

#[test]
fn execution_modes_agree_bit_for_bit() {
    let scene = FadingScene::from_snr(0.1, 2.0, SpectralModel::Ar { a: 0.2, b: 0.08 }).unwrap();
    let seq = dt_fading_bounds(&scene, &AlphaGrid::default().with_execution(Execution::Sequential)).unwrap();
    let par = dt_fading_bounds(&scene, &AlphaGrid::default().with_execution(Execution::Parallel)).unwrap();
    assert_eq!(seq, par);

    let mc = McScene::new(1.0, 1.0, 0.1).unwrap();
    let order = DivergenceOrder::new(2.0).unwrap();
    let cfg = McConfig::new(20, 100_000, 9, 0.99).unwrap();
    let a = mc_finite_n_lpcb(&mc, &cfg.with_execution(Execution::Sequential), order).unwrap();
    let b = mc_finite_n_lpcb(&mc, &cfg.with_execution(Execution::Parallel), order).unwrap();
    assert_eq!(a.p_error, b.p_error);
    assert_eq!(a.q_error, b.q_error);
}

#[test]
fn finite_block_comparison_holds_in_simulation() {
    let scene = McScene::new(1.0, 1.0, 0.2).unwrap();
    let cfg = McConfig::new(10, 200_000, 3, 0.99).unwrap();
    for alpha in [1.5, 2.0, 4.0] {
        let r = mc_finite_n_lpcb(&scene, &cfg, DivergenceOrder::new(alpha).unwrap()).unwrap();
        assert!(r.passed && !r.inconclusive, "α = {alpha}: {r:?}");
        assert!((r.divergence_rate - 0.04 / 2.0).abs() <= 1e-15);
    }
}

#[test]
fn results_round_trip_through_json() {
    let model = SpectralModel::Tabulated { omega: vec![0.0, 1.0, 2.0], sigma: vec![0.3, 0.2, 0.0] };
    let text = serde_json::to_string(&model).unwrap();
    assert!(text.contains(r#""kind":"tabulated""#));
    assert_eq!(serde_json::from_str::<SpectralModel>(&text).unwrap(), model);

    let scene = FadingScene::from_snr(0.1, 2.0, SpectralModel::Ar { a: 0.2, b: 0.08 }).unwrap();
    let t = dt_fading_bounds(&scene, &AlphaGrid::default()).unwrap();
    let back: lpcb::TwoSided = serde_json::from_str(&serde_json::to_string(&t).unwrap()).unwrap();
    assert_eq!(back, t);
}
