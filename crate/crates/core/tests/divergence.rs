use approx::assert_relative_eq;
use proptest::prelude::*;

use lpcb::divergence::{
    duality_maximizer, duality_objective, duality_value, equality_achiever_event, gaussian_product_integral, lpcb_event,
    lpcb_event_reversed, lpcb_functional, lpcb_weighted, renyi_discrete, renyi_gaussian_scaled_shift,
};
use lpcb::{DiscreteDist, DivergenceOrder};

fn dist(n: usize) -> impl Strategy<Value = DiscreteDist> {
    prop::collection::vec(0.01f64..1.0, n).prop_map(|w| DiscreteDist::from_weights(&w).unwrap())
}

fn pair() -> impl Strategy<Value = (DiscreteDist, DiscreteDist)> {
    (2usize..8).prop_flat_map(|n| (dist(n), dist(n)))
}

fn order() -> impl Strategy<Value = DivergenceOrder> {
    prop_oneof![1.0001f64..1.5, 1.5f64..10.0, 10.0f64..200.0].prop_map(|a| DivergenceOrder::new(a).unwrap())
}

/// Trapezoid rule on a wide symmetric window; exponentially accurate for
/// Gaussian integrands.
fn trapezoid(f: impl Fn(f64) -> f64, center: f64, half_width: f64, steps: usize) -> f64 {
    let h = 2.0 * half_width / steps as f64;
    (0..=steps)
        .map(|k| {
            let w = if k == 0 || k == steps { 0.5 } else { 1.0 };
            w * f(center - half_width + k as f64 * h)
        })
        .sum::<f64>()
        * h
}

fn normal_log_pdf(x: f64, mean: f64, var: f64) -> f64 {
    -(x - mean).powi(2) / (2.0 * var) - 0.5 * (2.0 * std::f64::consts::PI * var).ln()
}

proptest! {
    #[test]
    fn divergence_is_nonnegative_and_vanishes_on_the_diagonal((p, q) in pair(), o in order()) {
        prop_assert!(renyi_discrete(&p, &q, o).unwrap() >= -1e-15);
        prop_assert!(renyi_discrete(&p, &p, o).unwrap().abs() <= 1e-13);
    }

    #[test]
    fn scaled_divergence_is_nondecreasing_in_order((p, q) in pair(), a in 1.001f64..50.0, step in 0.0f64..20.0) {
        let lo = DivergenceOrder::new(a).unwrap();
        let hi = DivergenceOrder::new(a + step).unwrap();
        let d_lo = a * renyi_discrete(&p, &q, lo).unwrap();
        let d_hi = (a + step) * renyi_discrete(&p, &q, hi).unwrap();
        prop_assert!(d_hi >= d_lo - 1e-12 * d_lo.abs().max(1.0));
    }

    #[test]
    fn divergence_tends_to_kl_at_order_one((p, q) in pair()) {
        let kl: f64 = p.probs().iter().zip(q.probs()).map(|(a, b)| a * (a / b).ln()).sum();
        let d = renyi_discrete(&p, &q, DivergenceOrder::new(1.0 + 1e-7).unwrap()).unwrap();
        prop_assert!((d - kl).abs() <= 1e-5 * kl.max(1e-3));
    }

    #[test]
    fn comparison_holds_on_every_event((p, q) in pair(), mask in prop::collection::vec(any::<bool>(), 8), o in order()) {
        let event: Vec<bool> = mask[..p.len()].to_vec();
        let (pa, qa) = (p.mass(&event).unwrap(), q.mass(&event).unwrap());
        let d = renyi_discrete(&p, &q, o).unwrap();
        let c = lpcb_event(pa, qa, d, o).unwrap();
        prop_assert!(c.holds && c.violation() <= 1e-12, "{c:?}");
        let r = lpcb_event_reversed(pa, qa, renyi_discrete(&q, &p, o).unwrap(), o).unwrap();
        prop_assert!(r.holds && r.violation() <= 1e-12, "{r:?}");
    }

    #[test]
    fn functional_comparison_holds((p, q) in pair(), g in prop::collection::vec(-3.0f64..3.0, 8), o in order()) {
        let c = lpcb_functional(&g[..p.len()], &p, &q, o).unwrap();
        prop_assert!(c.violation() <= 1e-12, "{c:?}");
    }

    #[test]
    fn maximizer_attains_the_variational_value((p, q) in pair(), g in prop::collection::vec(-3.0f64..3.0, 8), o in order()) {
        let g = &g[..q.len()];
        let v = duality_value(g, &q, o).unwrap();
        let star = duality_maximizer(g, &q, o).unwrap();
        let at_star = duality_objective(g, &star, &q, o).unwrap();
        prop_assert!((at_star - v).abs() <= 1e-10 * v.abs().max(1.0));
        prop_assert!(duality_objective(g, &p, &q, o).unwrap() <= v + 1e-12);
    }

    #[test]
    fn weighted_comparison_is_tight_at_the_achiever(p in (2usize..8).prop_flat_map(dist), w in prop::collection::vec(0.05f64..5.0, 8), o in order()) {
        let w = &w[..p.len()];
        let q = equality_achiever_event(&p, w, o).unwrap();
        let c = lpcb_weighted(w, &p, &q, o).unwrap();
        prop_assert!(c.gap() <= 1e-10 * c.rhs.abs().max(1.0), "{c:?}");
    }

    #[test]
    fn second_order_expansion_under_small_perturbation(q in (3usize..8).prop_flat_map(dist), eps in prop::collection::vec(-1.0f64..1.0, 8), a in 1.1f64..20.0) {
        // p = q(1 + tε) with Σ qε = 0 has D_α ≈ t² Σ qε² / 2 for every α.
        let n = q.len();
        let mean: f64 = q.probs().iter().zip(&eps).map(|(qi, e)| qi * e).sum();
        let eps: Vec<f64> = eps[..n].iter().map(|e| e - mean).collect();
        let eps2: f64 = q.probs().iter().zip(&eps).map(|(qi, e)| qi * e * e).sum();
        prop_assume!(eps2 > 1e-3);
        let t = 1e-3;
        let p = DiscreteDist::from_weights(&q.probs().iter().zip(&eps).map(|(qi, e)| qi * (1.0 + t * e)).collect::<Vec<_>>()).unwrap();
        let d = renyi_discrete(&p, &q, DivergenceOrder::new(a).unwrap()).unwrap();
        // The third-order remainder is O(αt) relative.
        prop_assert!((d / (t * t * eps2 / 2.0) - 1.0).abs() <= 0.5 * a * t);
    }

    #[test]
    fn gaussian_divergence_matches_quadrature(xi in -2.0f64..2.0, sigma2 in 0.2f64..3.0, a in 1.05f64..6.0, ds in 0.05f64..2.0) {
        let s = (1.0 - 1.0 / a) + ds;
        let o = DivergenceOrder::new(a).unwrap();
        let closed = renyi_gaussian_scaled_shift(xi, sigma2, s, o).unwrap();
        // The integrand is Gaussian with precision k/σ² and mode (1−α)ξ/k.
        let k = 1.0 + a * (s - 1.0);
        let integrand = |y: f64| (a * normal_log_pdf(y, 0.0, sigma2 / s) + (1.0 - a) * normal_log_pdf(y, xi, sigma2)).exp();
        let integral = trapezoid(integrand, (1.0 - a) * xi / k, 14.0 * (sigma2 / k).sqrt(), 4_000);
        let numeric = integral.ln() / (a * (a - 1.0));
        prop_assert!((closed - numeric).abs() <= 1e-8 * closed.abs().max(1e-3), "{closed} vs {numeric}");
    }

    #[test]
    fn gaussian_product_integral_matches_quadrature(u in -2.0f64..2.0, v in -2.0f64..2.0, a in 0.1f64..3.0, b in 0.1f64..3.0) {
        let closed = gaussian_product_integral(u, v, a, b).unwrap();
        let numeric = trapezoid(|y| (-a * (y - u).powi(2) - b * (y - v).powi(2)).exp(), 0.0, 20.0, 20_000);
        assert_relative_eq!(closed, numeric, max_relative = 1e-10);
    }
}

#[test]
fn infinite_divergence_without_absolute_continuity() {
    let p = DiscreteDist::new(vec![0.5, 0.5]).unwrap();
    let q = DiscreteDist::new(vec![1.0, 0.0]).unwrap();
    let o = DivergenceOrder::new(2.0).unwrap();
    assert!(renyi_discrete(&p, &q, o).unwrap().is_infinite());
    assert!(lpcb_event(0.5, 0.0, f64::INFINITY, o).unwrap().holds);
}

#[test]
fn orders_at_or_below_one_are_rejected() {
    for a in [1.0, 0.5, -2.0, f64::NAN, f64::INFINITY] {
        assert!(DivergenceOrder::new(a).is_err(), "{a}");
    }
}
