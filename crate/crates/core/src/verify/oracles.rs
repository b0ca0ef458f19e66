//! Registry pairing each closed form with an independent numerical oracle:
//! quadrature, grid scans with golden-section refinement, bisection, grid
//! Legendre transforms and direct summation.

use std::f64::consts::PI;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{random_dist, random_order, rng};
use crate::divergence::{gaussian_product_integral, renyi_discrete, renyi_gaussian_scaled_shift, DiscreteDist, DivergenceOrder};
use crate::erasure::{iid_erasure_penalty, log_tilt_factor, rate_function, MarkovErasure};
use crate::error::{Error, Result};
use crate::exponent::{optimize_ratio_minus_linear, optimize_ratio_plus_linear, perturbation_upper_bound, truncation_delta};
use crate::fading::{
    ar_closed_form, ar_log_term, ct_alpha_limit, ct_divergence_rate, dt_alpha_limit, flat_divergence_rate, ou_divergence_rate,
    ou_lower_objective, ou_optimal_bounds, ou_upper_objective, FadingScene, SpectralModel,
};
use crate::gaussian::{
    interference_lower, interference_objective, interference_s1_closed_form, isi_objective, isi_zero_rate_band,
    zero_rate_optimum, IsiScene,
};
use crate::grid::linspace;
use crate::numerics::optimize::{bisect, golden_section_max, golden_section_min, optimize_on_grid, Goal};
use crate::numerics::quadrature::default_rule;
use crate::par::{self, Execution};
use crate::source::{gaussian_rd_band, phi, RdScene};

/// Every closed form with a registered oracle.
pub const CLOSED_FORMS: &[&str] = &[
    "renyi_gaussian_scaled_shift",
    "gaussian_product_integral",
    "optimize_ratio_plus_linear",
    "optimize_ratio_minus_linear",
    "perturbation_upper_bound",
    "truncation_delta",
    "interference_s1_closed_form",
    "zero_rate_optimum",
    "interference_lower",
    "isi_zero_rate_band",
    "ar_log_term",
    "ar_closed_form",
    "dt_alpha_limit",
    "ct_alpha_limit",
    "ou_divergence_rate",
    "flat_divergence_rate",
    "ou_optimal_bounds",
    "log_tilt_factor",
    "iid_erasure_penalty",
    "varadhan_sup",
    "gaussian_rd_band",
];

/// Scenes per pair in the default suite.
pub const DEFAULT_SCENES: usize = 100;
/// Draws allowed per accepted scene before a pair gives up.
const MAX_REJECT_RATIO: usize = 100;

/// Relative errors of one scene, for the value and (where the closed form
/// is an optimum) its optimizer.
#[derive(Debug, Clone, Copy, PartialEq)]
struct SceneError {
    value: f64,
    argopt: f64,
}

fn value_only(value: f64) -> Option<SceneError> {
    Some(SceneError { value, argopt: 0.0 })
}

fn with_argopt(value: f64, argopt: f64) -> Option<SceneError> {
    Some(SceneError { value, argopt })
}

/// One scene's outcome: `None` rejects an infeasible draw.
type SceneFn = fn(&mut ChaCha8Rng) -> Result<Option<SceneError>>;

/// A closed form with its oracle and tolerances on the relative error
/// `|closed − oracle| / max(|oracle|, floor)` of the value and of the
/// optimizer.
#[derive(Clone, Copy)]
pub struct OraclePair {
    pub closed_form: &'static str,
    pub oracle: &'static str,
    pub tolerance: f64,
    /// `None` when the closed form is not an optimum.
    pub argopt_tolerance: Option<f64>,
    scene: SceneFn,
}

impl std::fmt::Debug for OraclePair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("OraclePair")
            .field("closed_form", &self.closed_form)
            .field("oracle", &self.oracle)
            .field("tolerance", &self.tolerance)
            .field("argopt_tolerance", &self.argopt_tolerance)
            .finish()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairReport {
    pub closed_form: String,
    pub oracle: String,
    pub tolerance: f64,
    pub argopt_tolerance: Option<f64>,
    pub scenes: usize,
    pub rejected: usize,
    pub max_rel_error: f64,
    /// Largest relative error of the optimizer (`α*`, `τ*`, ...).
    pub max_argopt_error: f64,
    pub passed: bool,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub seed: u64,
    pub pairs: Vec<PairReport>,
    /// Each entry of [`CLOSED_FORMS`] has exactly one pair.
    pub complete: bool,
    pub passed: bool,
}

impl OracleReport {
    pub fn pair(&self, closed_form: &str) -> Option<&PairReport> {
        self.pairs.iter().find(|p| p.closed_form == closed_form)
    }
}

fn rel(x: f64, reference: f64, floor: f64) -> f64 {
    if x == reference {
        return 0.0;
    }
    (x - reference).abs() / reference.abs().max(floor)
}

fn uniform(r: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * r.random::<f64>()
}

/// Optimum of `f` over `α ∈ [lo, hi]`: a 2000-point grid geometric in
/// `α − 1`, then golden section in `ln(α − 1)` between the neighbours of
/// the best point.
fn alpha_search(f: impl Fn(f64) -> f64 + Sync + Send, goal: Goal, lo: f64, hi: f64) -> (f64, f64) {
    let (tlo, thi) = ((lo - 1.0).ln(), (hi - 1.0).ln());
    let g = |t: f64| f(1.0 + t.exp());
    let ts = linspace(tlo, thi, 2000);
    let best = optimize_on_grid(g, &ts, goal, false, Execution::Sequential).expect("objective finite somewhere");
    let a = ts[best.index.saturating_sub(1)];
    let b = ts[(best.index + 1).min(ts.len() - 1)];
    let (t, v) = match goal {
        Goal::Minimize => golden_section_min(g, a, b, 1e-15),
        Goal::Maximize => golden_section_max(g, a, b, 1e-15),
    };
    (1.0 + t.exp(), v)
}

/// `∫ exp(h(y)) dy` for a log-concave integrand centred at `m` with scale
/// `w`, over `m ± 40w`.
fn gaussian_like_integral(h: impl Fn(f64) -> f64, m: f64, w: f64) -> f64 {
    default_rule().composite(|y| h(y).exp(), m - 40.0 * w, m + 40.0 * w, 400)
}

fn scaled_shift(r: &mut ChaCha8Rng) -> Result<Option<SceneError>> {
    let xi = uniform(r, -2.0, 2.0);
    let s2 = uniform(r, 0.2, 3.0);
    let alpha = random_order(r, 1.01, 10.0);
    let s = uniform(r, 1.0 - 1.0 / alpha + 0.05, 3.0);
    let o = DivergenceOrder::new(alpha)?;
    let closed = renyi_gaussian_scaled_shift(xi, s2, s, o)?;
    // ln of N(0, σ²/s)^α N(ξ, σ²)^{1−α}.
    let lp = |y: f64| 0.5 * (s / (2.0 * PI * s2)).ln() - s * y * y / (2.0 * s2);
    let lq = |y: f64| -0.5 * (2.0 * PI * s2).ln() - (y - xi).powi(2) / (2.0 * s2);
    let k = 1.0 + alpha * (s - 1.0);
    let m = (1.0 - alpha) * xi / k;
    let integral = gaussian_like_integral(|y| alpha * lp(y) + (1.0 - alpha) * lq(y), m, (s2 / k).sqrt());
    Ok(value_only(rel(closed, integral.ln() / (alpha * (alpha - 1.0)), 1e-6)))
}

fn product_integral(r: &mut ChaCha8Rng) -> Result<Option<SceneError>> {
    let (u, v) = (uniform(r, -2.0, 2.0), uniform(r, -2.0, 2.0));
    let (a, b) = (uniform(r, 0.1, 3.0), uniform(r, 0.1, 3.0));
    let closed = gaussian_product_integral(u, v, a, b)?;
    let m = (a * u + b * v) / (a + b);
    let q = gaussian_like_integral(|y| -a * (y - u).powi(2) - b * (y - v).powi(2), m, (a + b).sqrt().recip());
    Ok(value_only(rel(closed, q, 1e-300)))
}

fn ratio_plus(r: &mut ChaCha8Rng) -> Result<Option<SceneError>> {
    let u = uniform(r, 0.0, 100.0);
    let v = uniform(r, 0.0, 100.0);
    if v == 0.0 || u == 0.0 {
        return Ok(None);
    }
    let c = optimize_ratio_plus_linear(u, v)?;
    let (a, val) = alpha_search(|a| a / (a - 1.0) * u + a * v, Goal::Minimize, 1.0 + 1e-8, 1.0 + 1e8);
    Ok(with_argopt(rel(c.value, val, 1e-12), rel(c.alpha_star, a, 1e-12)))
}

fn ratio_minus(r: &mut ChaCha8Rng) -> Result<Option<SceneError>> {
    let u = uniform(r, 0.0, 100.0);
    let v = uniform(r, 0.0, 100.0);
    if !(u > 1.01 * v && v > 0.0) {
        return Ok(None);
    }
    let c = optimize_ratio_minus_linear(u, v)?;
    let (a, val) = alpha_search(|a| (a - 1.0) * (u / a - v), Goal::Maximize, 1.0 + 1e-8, 1.0 + 1e8);
    Ok(with_argopt(rel(c.value, val, 1e-12), rel(c.alpha_star, a, 1e-12)))
}

fn perturbation(r: &mut ChaCha8Rng) -> Result<Option<SceneError>> {
    let e = uniform(r, 0.01, 5.0);
    let n = r.random_range(2..=8);
    let q = random_dist(r, n, 0.0);
    let eps: Vec<f64> = (0..n).map(|_| uniform(r, -1.0, 1.0)).collect();
    let mean: f64 = q.probs().iter().zip(&eps).map(|(qi, ei)| qi * ei).sum();
    let eps2: f64 = q.probs().iter().zip(&eps).map(|(qi, ei)| qi * (ei - mean).powi(2)).sum();
    let closed = perturbation_upper_bound(e, eps2);
    let (_, val) = alpha_search(|a| a / (a - 1.0) * e + a * eps2 / 2.0, Goal::Minimize, 1.0 + 1e-8, 1.0 + 1e8);
    Ok(value_only(rel(closed, val, 1e-12)))
}

fn truncation(r: &mut ChaCha8Rng) -> Result<Option<SceneError>> {
    let n = r.random_range(2..=10);
    let q = random_dist(r, n, 0.0);
    let a: Vec<bool> = (0..n).map(|_| r.random::<bool>()).collect();
    if !a.iter().any(|x| *x) || a.iter().all(|x| *x) {
        return Ok(None);
    }
    let z = q.mass(&a)?;
    let beta = random_order(r, 1.01, 10.0);
    let closed = truncation_delta(z)?(beta);
    let direct = renyi_discrete(&q.conditional(&a)?, &q, DivergenceOrder::new(beta)?)?;
    Ok(value_only(rel(closed, direct, 1e-12)))
}

fn s1_closed(r: &mut ChaCha8Rng) -> Result<Option<SceneError>> {
    let e = uniform(r, 0.01, 5.0);
    let g = uniform(r, 0.05, 3.0);
    let s2 = uniform(r, 0.2, 3.0);
    let c = interference_s1_closed_form(e, g, s2)?;
    let (a, val) = alpha_search(|a| interference_objective(e, a, 1.0, g, s2), Goal::Minimize, 1.0 + 1e-8, 1.0 + 1e8);
    Ok(with_argopt(rel(c.value, val, 1e-12), rel(c.alpha_star, a, 1e-12)))
}

fn zero_rate(r: &mut ChaCha8Rng) -> Result<Option<SceneError>> {
    let s = uniform(r, 0.2, 5.0);
    let s2 = uniform(r, 0.2, 3.0);
    let g = uniform(r, 0.0, 2.0);
    let closed = zero_rate_optimum(s, s2, g);
    let c_q = s / (2.0 * s2);
    let obj = |a: f64, sc: f64| if sc > 1.0 - 1.0 / a { interference_objective(sc * c_q / 2.0, a, sc, g, s2) } else { f64::NAN };
    let profile = |a: f64| golden_section_min(|sc| obj(a, sc), 1.0 - 1.0 / a, 50.0, 1e-15).1;
    let (_, v) = alpha_search(profile, Goal::Minimize, 1.0 + 1e-8, 1.0 + 1e8);
    Ok(value_only(rel(closed, v, 1e-12)))
}

fn lower_interference(r: &mut ChaCha8Rng) -> Result<Option<SceneError>> {
    let g = uniform(r, 0.05, 2.0);
    let s2 = uniform(r, 0.2, 3.0);
    let t = g * g / (2.0 * s2);
    let e = t * uniform(r, 1.05, 20.0);
    let closed = interference_lower(e, g, s2);
    let lpcb = |a: f64| match DivergenceOrder::new(a).and_then(|o| renyi_gaussian_scaled_shift(g, s2, 1.0, o)) {
        Ok(d) => (a - 1.0) / a * e - (a - 1.0) * d,
        Err(_) => f64::NAN,
    };
    let (_, val) = alpha_search(lpcb, Goal::Maximize, 1.0 + 1e-8, 1.0 + 1e8);
    Ok(value_only(rel(closed, val, 1e-12)))
}

/// Profile `τ ↦ max_α` of the ISI objective (golden section in
/// `ln(α − 1)`) on a 200-point `τ` grid, refined by golden section.
fn isi_oracle(scene: &IsiScene) -> (f64, f64, f64) {
    let inner = |tau: f64| golden_section_max(|t| isi_objective(scene, 1.0 + t.exp(), tau), (1e-5f64).ln(), (1e6f64).ln(), 1e-15);
    let taus = linspace(0.0025, 0.9975, 200);
    let best = optimize_on_grid(|tau| inner(tau).1, &taus, Goal::Maximize, false, Execution::Sequential).expect("finite profile");
    let (tlo, thi) = (taus[best.index.saturating_sub(1)], taus[(best.index + 1).min(taus.len() - 1)]);
    let (tau, v) = golden_section_max(|tau| inner(tau).1, tlo, thi, 1e-15);
    (tau, 1.0 + inner(tau).0.exp(), v)
}

fn isi(r: &mut ChaCha8Rng) -> Result<Option<SceneError>> {
    let s = uniform(r, 0.2, 5.0);
    let s2 = uniform(r, 0.2, 3.0);
    let r1 = uniform(r, -0.5, 0.5);
    let b = (1.0 + r1).powi(2);
    let a = b * uniform(r, 0.001, 0.8);
    let scene = IsiScene::new(s, s2, r1, r1 * r1 + a)?;
    let band = isi_zero_rate_band(&scene);
    if band.vacuous {
        return Ok(None);
    }
    let (tau, alpha, v) = isi_oracle(&scene);
    Ok(with_argopt(rel(band.lower, v, 1e-12), rel(band.tau_star, tau, 1e-12).max(rel(band.alpha_star, alpha, 1e-12))))
}

/// `(1/2π) ∫₀^{2π} ln[1 − 2cΣ(ω)] dω` with 128 Gauss–Legendre panels.
pub fn ar_log_quadrature(a: f64, b: f64, c: f64) -> f64 {
    let model = SpectralModel::Ar { a, b };
    // The spectral peak has width of order 1 − |a|.
    let panels = (32.0 / (1.0 - a.abs())).ceil().max(128.0) as usize;
    default_rule().composite(|w| (-2.0 * c * model.density(w)).ln_1p(), 0.0, 2.0 * PI, panels) / (2.0 * PI)
}

fn ar_draw(r: &mut ChaCha8Rng) -> (f64, f64, f64) {
    let a = uniform(r, -0.9, 0.9);
    let b = uniform(r, 0.01, 1.0);
    let c = (1.0 - a.abs()).powi(2) / (2.0 * b * b) * uniform(r, 0.0, 0.95);
    (a, b, c)
}

fn ar_log(r: &mut ChaCha8Rng) -> Result<Option<SceneError>> {
    let (a, b, c) = ar_draw(r);
    if c == 0.0 {
        return Ok(None);
    }
    Ok(value_only(rel(ar_log_term(a, b, c)?, -ar_log_quadrature(a, b, c), 1e-300)))
}

fn ar_bounds(r: &mut ChaCha8Rng) -> Result<Option<SceneError>> {
    let a = uniform(r, -0.9, 0.9);
    let b = uniform(r, 0.01, 0.5);
    let p = uniform(r, 0.01, 1.0);
    let e = uniform(r, 0.1, 5.0);
    let scene = FadingScene::from_snr(p, e, SpectralModel::Ar { a, b })?;
    let limit = dt_alpha_limit(p, scene.spectral.sup());
    let alpha = 1.0 + (limit - 1.0) * uniform(r, 0.02, 0.98);
    let cf = ar_closed_form(&scene, DivergenceOrder::new(alpha)?)?;
    let (Some(up), Some(lo)) = (cf.upper, cf.lower) else { return Ok(None) };
    let l = ar_log_quadrature(a, b, scene.c(alpha));
    let up_q = alpha / (alpha - 1.0) * e - l / (2.0 * (alpha - 1.0));
    let lo_q = (alpha - 1.0) / alpha * e + l / (2.0 * alpha);
    Ok(value_only(rel(up, up_q, 1e-12).max(rel(lo, lo_q, 1e-6))))
}

fn dt_limit(r: &mut ChaCha8Rng) -> Result<Option<SceneError>> {
    let p = uniform(r, 0.001, 2.0);
    let sup = uniform(r, 0.001, 10.0);
    let k = |a: f64| 2.0 * a * (a - 1.0) * p * sup - 1.0;
    let hi = std::iter::successors(Some(2.0f64), |x| Some(x * 2.0)).find(|&x| k(x) > 0.0).expect("grows without bound");
    let root = bisect(k, 1.0, hi, 1e-15).expect("sign change");
    Ok(value_only(rel(dt_alpha_limit(p, sup), root, 1e-12)))
}

fn ct_limit(r: &mut ChaCha8Rng) -> Result<Option<SceneError>> {
    let p = uniform(r, 0.001, 2.0);
    let sup = uniform(r, 0.001, 10.0);
    let k = |a: f64| 4.0 * PI * a * (a - 1.0) * p * sup - 1.0;
    let hi = std::iter::successors(Some(2.0f64), |x| Some(x * 2.0)).find(|&x| k(x) > 0.0).expect("grows without bound");
    let root = bisect(k, 1.0, hi, 1e-15).expect("sign change");
    Ok(value_only(rel(ct_alpha_limit(p, sup), root, 1e-12)))
}

/// A feasible OU draw `(a, b, c)` with `4b²c < a²`.
pub fn ou_draw(r: &mut ChaCha8Rng) -> (f64, f64, f64) {
    let a = uniform(r, 0.05, 5.0);
    let b = uniform(r, 0.01, 2.0);
    let c = a * a / (4.0 * b * b) * uniform(r, 0.0, 0.98);
    (a, b, c)
}

fn ou_rate(r: &mut ChaCha8Rng) -> Result<Option<SceneError>> {
    let (a, b, c) = ou_draw(r);
    if c == 0.0 {
        return Ok(None);
    }
    let closed = ou_divergence_rate(a, b, c)?;
    let quad = ct_divergence_rate(&SpectralModel::Ou { a, b }, c)?;
    Ok(value_only(rel(closed, quad, 1e-300)))
}

fn flat_rate(r: &mut ChaCha8Rng) -> Result<Option<SceneError>> {
    let sigma0 = uniform(r, 0.01, 2.0);
    let bw = uniform(r, 0.1, 10.0);
    let c = uniform(r, 0.0, 0.99) / (4.0 * PI * sigma0);
    let closed = flat_divergence_rate(sigma0, bw, c)?;
    let model = SpectralModel::Flat { sigma0, bandwidth: bw };
    let q = -default_rule().integrate(|w| (-4.0 * PI * c * model.density(w)).ln_1p(), -bw, bw) / (4.0 * PI);
    Ok(value_only(rel(closed, q, 1e-300)))
}

fn ou_optimal(r: &mut ChaCha8Rng) -> Result<Option<SceneError>> {
    let a = uniform(r, 0.1, 5.0);
    let b = uniform(r, 0.01, 2.0);
    let p = uniform(r, 0.01, 2.0);
    let e = uniform(r, 0.05, 5.0);
    let opt = match ou_optimal_bounds(a, b, p, e) {
        Ok(o) => o,
        Err(Error::Infeasible(_)) => return Ok(None),
        Err(err) => return Err(err),
    };
    let top = a / (2.0 * b * p.sqrt());
    if opt.alpha_hat <= 1.0 || opt.alpha_hat >= top {
        return Ok(None);
    }
    let (au, vu) = alpha_search(|x| ou_upper_objective(a, b, p, e, x), Goal::Minimize, 1.0 + 1e-9, top);
    let (al, vl) = alpha_search(|x| ou_lower_objective(a, b, p, e, x), Goal::Maximize, 1.0 + 1e-9, top);
    Ok(with_argopt(
        rel(opt.e_upper, vu, 1e-12).max(rel(opt.e_lower, vl.max(0.0), 1e-6)),
        rel(opt.alpha_star, au, 1e-12).max(rel(opt.alpha_hat, al, 1e-12)),
    ))
}

fn tilt(r: &mut ChaCha8Rng) -> Result<Option<SceneError>> {
    let p = uniform(r, 0.001, 0.999);
    let alpha = random_order(r, 1.01, 10.0);
    let pq = DiscreteDist::new(vec![p, 1.0 - p])?;
    let qp = DiscreteDist::new(vec![1.0 - p, p])?;
    let d = renyi_discrete(&pq, &qp, DivergenceOrder::new(alpha)?)?;
    Ok(value_only(rel(log_tilt_factor(p, alpha)?, alpha * (alpha - 1.0) * d, 1e-12)))
}

fn iid_penalty(r: &mut ChaCha8Rng) -> Result<Option<SceneError>> {
    let d = r.random_range(2..=6);
    let row = random_dist(r, d, 0.0);
    let f: Vec<u8> = (0..d).map(|_| u8::from(r.random::<bool>())).collect();
    let p = uniform(r, 0.01, 0.5);
    let o = DivergenceOrder::new(random_order(r, 1.01, 10.0))?;
    let me = MarkovErasure::new(&vec![row.probs().to_vec(); d], f, p)?;
    let q: f64 = row.probs().iter().zip(me.fbar()).map(|(w, b)| w * f64::from(b)).sum::<f64>().min(1.0);
    let closed = iid_erasure_penalty(q, p, o)?;
    let perron = crate::erasure::varadhan_sup(&me, o)?;
    Ok(value_only((closed - perron).abs()))
}

/// A random irreducible chain on `2..=6` states with both labels present.
pub fn random_chain(r: &mut ChaCha8Rng) -> Option<MarkovErasure> {
    let d = r.random_range(2..=6);
    let rows: Vec<Vec<f64>> = (0..d).map(|_| random_dist(r, d, 0.3).probs().to_vec()).collect();
    let f: Vec<u8> = (0..d).map(|_| u8::from(r.random::<bool>())).collect();
    if f.iter().all(|&v| v == f[0]) {
        return None;
    }
    let p = uniform(r, 0.01, 0.5);
    MarkovErasure::new(&rows, f, p).ok()
}

/// `sup_x [xλ − I(x)]` from a 400-point grid on `[0, 1]` refined by
/// golden section. Cycle means `k/L`, `L ≤ 6`, are added so chains whose
/// frequency is pinned to a single value are still resolved.
pub fn grid_legendre(me: &MarkovErasure, lambda: f64) -> f64 {
    let mut xs = linspace(0.0, 1.0, 400);
    xs.extend((1..=6).flat_map(|l| (0..=l).map(move |k| f64::from(k) / f64::from(l))));
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    let f = |x: f64| x * lambda - rate_function(me, x);
    optimize_on_grid(f, &xs, Goal::Maximize, true, Execution::Sequential).map_or(f64::NAN, |o| o.value)
}

fn varadhan(r: &mut ChaCha8Rng) -> Result<Option<SceneError>> {
    let Some(me) = random_chain(r) else { return Ok(None) };
    let lambda = uniform(r, 0.0, 5.0);
    Ok(value_only((me.log_perron_root(lambda)? - grid_legendre(&me, lambda)).abs()))
}

fn rd_band(r: &mut ChaCha8Rng) -> Result<Option<SceneError>> {
    let var = uniform(r, 0.2, 3.0);
    let d = var * uniform(r, 0.05, 0.95);
    let rate = 0.5 * (var / d).ln() + uniform(r, 0.01, 2.0);
    let amp = uniform(r, 0.01, 1.0);
    let band = gaussian_rd_band(&RdScene::new(rate, d, var, amp)?);
    let u = phi(rate - 0.5 * (var / d).ln());
    let v = amp * amp / (2.0 * var);
    if u <= 1.01 * v {
        return Ok(None);
    }
    let (_, up) = alpha_search(|a| a / (a - 1.0) * u + a * v, Goal::Minimize, 1.0 + 1e-8, 1.0 + 1e8);
    let (_, lo) = alpha_search(|a| (a - 1.0) / a * u - (a - 1.0) * v, Goal::Maximize, 1.0 + 1e-8, 1.0 + 1e8);
    Ok(value_only(rel(band.upper, up, 1e-12).max(rel(band.lower, lo, 1e-12))))
}

/// All registered pairs in [`CLOSED_FORMS`] order.
pub fn registry() -> Vec<OraclePair> {
    let p = |closed_form, oracle, tolerance, scene: SceneFn| OraclePair { closed_form, oracle, tolerance, argopt_tolerance: None, scene };
    let q = |closed_form, oracle, tolerance, argopt: f64, scene: SceneFn| OraclePair {
        closed_form,
        oracle,
        tolerance,
        argopt_tolerance: Some(argopt),
        scene,
    };
    vec![
        p("renyi_gaussian_scaled_shift", "quadrature of p^α q^(1−α)", 1e-8, scaled_shift),
        p("gaussian_product_integral", "quadrature", 1e-10, product_integral),
        q("optimize_ratio_plus_linear", "grid + golden section", 1e-8, 1e-6, ratio_plus),
        q("optimize_ratio_minus_linear", "grid + golden section", 1e-8, 1e-6, ratio_minus),
        p("perturbation_upper_bound", "grid + golden section on the second-order objective", 1e-8, perturbation),
        p("truncation_delta", "direct summation on a conditioned distribution", 1e-10, truncation),
        q("interference_s1_closed_form", "grid + golden section over α at s = 1", 1e-8, 1e-6, s1_closed),
        p("zero_rate_optimum", "nested golden section over (α, s)", 1e-6, zero_rate),
        p("interference_lower", "grid + golden section on the α-family", 1e-8, lower_interference),
        q("isi_zero_rate_band", "200-point τ profile of golden-section maxima over α", 1e-5, 1e-6, isi),
        p("ar_log_term", "128-panel quadrature", 1e-8, ar_log),
        p("ar_closed_form", "quadrature at the same order", 1e-8, ar_bounds),
        p("dt_alpha_limit", "bisection", 1e-10, dt_limit),
        p("ct_alpha_limit", "bisection", 1e-10, ct_limit),
        p("ou_divergence_rate", "tail-truncated quadrature", 1e-6, ou_rate),
        p("flat_divergence_rate", "Gauss–Legendre quadrature", 1e-13, flat_rate),
        q("ou_optimal_bounds", "grid + golden section on E_U and E_L", 1e-8, 1e-6, ou_optimal),
        p("log_tilt_factor", "direct summation", 1e-10, tilt),
        p("iid_erasure_penalty", "power iteration", 1e-10, iid_penalty),
        p("varadhan_sup", "grid Legendre transform", 1e-6, varadhan),
        p("gaussian_rd_band", "grid + golden section", 1e-8, rd_band),
    ]
}

/// Runs `pair` on `scenes` accepted draws from substream `stream` of `seed`.
pub fn run_pair(pair: &OraclePair, seed: u64, stream: u64, scenes: usize) -> PairReport {
    let mut r = rng(seed, stream);
    let (mut accepted, mut rejected) = (0, 0);
    let (mut worst, mut worst_arg) = (0.0f64, 0.0f64);
    let mut error = None;
    while accepted < scenes {
        if rejected > MAX_REJECT_RATIO * scenes.max(1) {
            error = Some(format!("{rejected} draws rejected"));
            break;
        }
        match (pair.scene)(&mut r) {
            Ok(Some(e)) => {
                accepted += 1;
                // NaN sticks so a broken scene cannot pass.
                worst = if e.value.is_nan() || worst.is_nan() { f64::NAN } else { worst.max(e.value) };
                worst_arg = if e.argopt.is_nan() || worst_arg.is_nan() { f64::NAN } else { worst_arg.max(e.argopt) };
            }
            Ok(None) => rejected += 1,
            Err(e) => {
                error = Some(e.to_string());
                break;
            }
        }
    }
    PairReport {
        closed_form: pair.closed_form.to_string(),
        oracle: pair.oracle.to_string(),
        tolerance: pair.tolerance,
        argopt_tolerance: pair.argopt_tolerance,
        scenes: accepted,
        rejected,
        max_rel_error: worst,
        max_argopt_error: worst_arg,
        passed: error.is_none() && worst <= pair.tolerance && pair.argopt_tolerance.is_none_or(|t| worst_arg <= t),
        error,
    }
}

/// Looks up a pair by closed-form name.
pub fn find_pair(closed_form: &str) -> Option<OraclePair> {
    registry().into_iter().find(|p| p.closed_form == closed_form)
}

/// Whether each entry of [`CLOSED_FORMS`] has exactly one registered pair.
pub fn registry_complete(pairs: &[OraclePair]) -> bool {
    pairs.len() == CLOSED_FORMS.len()
        && CLOSED_FORMS.iter().all(|name| pairs.iter().filter(|p| p.closed_form == *name).count() == 1)
}

/// Runs every pair on [`DEFAULT_SCENES`] scenes. Pair `k` draws from
/// substream `k`, so reports are independent of the execution mode.
pub fn closed_form_oracle_suite(seed: u64) -> OracleReport {
    closed_form_oracle_suite_with(seed, DEFAULT_SCENES, Execution::default())
}

pub fn closed_form_oracle_suite_with(seed: u64, scenes: usize, exec: Execution) -> OracleReport {
    let pairs = registry();
    let complete = registry_complete(&pairs);
    assert!(complete, "oracle registry does not cover every closed form exactly once");
    let idx: Vec<usize> = (0..pairs.len()).collect();
    let reports = par::map_slice(exec, &idx, |&k| run_pair(&pairs[k], seed, k as u64, scenes));
    let passed = complete && reports.iter().all(|r| r.passed);
    OracleReport { seed, pairs: reports, complete, passed }
}
