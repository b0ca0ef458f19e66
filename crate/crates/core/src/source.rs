//! Lossy source coding: excess-distortion exponents of Gaussian and binary
//! sources under bounded interference, a pair of correlated sources, and a
//! lower bound on guessing moments.

use serde::{Deserialize, Serialize};

use crate::divergence::{renyi_discrete, DiscreteDist, DivergenceOrder};
use crate::erasure::log_tilt_factor;
use crate::error::{invalid, Error, Result};
use crate::exponent::{nan_unless_finite, scan_alpha, BoundResult};
use crate::grid::AlphaGrid;
use crate::numerics::optimize::{best_index, Goal};
use crate::par;

/// `Φ(u) = (e^{2u} − 1)/2 − u`.
pub fn phi(u: f64) -> f64 {
    0.5 * (2.0 * u).exp_m1() - u
}

/// `R_G(d) = ½ ln(σ²/d)`, zero for `d ≥ σ²`.
pub fn gaussian_rate_distortion(d: f64, variance: f64) -> f64 {
    (0.5 * (variance / d).ln()).max(0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RdScene {
    pub rate: f64,
    pub distortion: f64,
    pub variance: f64,
    /// Interference amplitude bound `A`.
    pub amplitude: f64,
}

impl RdScene {
    pub fn new(rate: f64, distortion: f64, variance: f64, amplitude: f64) -> Result<Self> {
        if !(rate >= 0.0 && rate.is_finite()) {
            return Err(invalid(format!("rate {rate} must be finite and nonnegative")));
        }
        if !(distortion > 0.0 && distortion.is_finite()) {
            return Err(invalid(format!("distortion {distortion} must be finite and positive")));
        }
        if !(variance > 0.0 && variance.is_finite()) {
            return Err(invalid(format!("variance {variance} must be finite and positive")));
        }
        if !(amplitude >= 0.0 && amplitude.is_finite()) {
            return Err(invalid(format!("amplitude {amplitude} must be finite and nonnegative")));
        }
        Ok(Self { rate, distortion, variance, amplitude })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RdBand {
    pub lower: f64,
    pub upper: f64,
    /// `R < R_G(d)`: the reference exponent is zero.
    pub zero_exponent_regime: bool,
}

/// `(√Φ(R − R_G(d)) ∓ A/(√2σ))²`, the lower end clamped at zero.
pub fn gaussian_rd_band(scene: &RdScene) -> RdBand {
    let u = scene.rate - gaussian_rate_distortion(scene.distortion, scene.variance);
    let c = scene.amplitude / (2.0 * scene.variance).sqrt();
    let zero = u < 0.0;
    let r = if zero { 0.0 } else { phi(u).sqrt() };
    RdBand {
        lower: if r > c { (r - c).powi(2) } else { 0.0 },
        upper: (r + c).powi(2),
        zero_exponent_regime: zero,
    }
}

/// `inf_α [αF/(α−1) + A ln(tilt(p, α))/(α−1)]` for a binary source, with `F`
/// the reference exponent evaluated at `(rate, distortion)`.
pub fn binary_rd_upper<F>(f: F, rate: f64, distortion: f64, p: f64, amplitude: f64, grid: &AlphaGrid) -> Result<BoundResult>
where
    F: Fn(f64, f64) -> f64,
{
    log_tilt_factor(p, 2.0)?;
    let fv = f(rate, distortion);
    if !(fv >= 0.0 && fv.is_finite()) {
        return Err(invalid(format!("reference exponent {fv} must be finite and nonnegative")));
    }
    Ok(scan_alpha(grid, Goal::Minimize, (1.0, f64::INFINITY), |a| {
        let t = log_tilt_factor(p, a).unwrap_or(f64::NAN);
        nan_unless_finite((a * fv + amplitude * t) / (a - 1.0))
    }))
}

/// Uniform grid on the probability simplex with `steps` divisions per
/// coordinate.
pub fn simplex_grid(k: usize, steps: usize) -> Vec<DiscreteDist> {
    fn rec(k: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k == 1 {
            cur.push(left);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for i in 0..=left {
            cur.push(i);
            rec(k - 1, left - i, cur, out);
            cur.pop();
        }
    }
    if k == 0 || steps == 0 {
        return Vec::new();
    }
    let mut idx = Vec::new();
    rec(k, steps, &mut Vec::new(), &mut idx);
    idx.into_iter()
        .map(|v| {
            let w: Vec<f64> = v.iter().map(|&i| i as f64).collect();
            DiscreteDist::from_weights(&w).expect("simplex point is a valid distribution")
        })
        .collect()
}

/// All pairs `(Q_X, Q_Y)` from two candidate lists.
pub fn product_grid(xs: &[DiscreteDist], ys: &[DiscreteDist]) -> Vec<(DiscreteDist, DiscreteDist)> {
    xs.iter().flat_map(|x| ys.iter().map(move |y| (x.clone(), y.clone()))).collect()
}

/// `inf [α/(α−1)(F_x(Q_X) + F_y(Q_Y)) + α D_α(Q_X × Q_Y ‖ P_XY)]` over the
/// candidate pairs and `α`. `pxy` is row-major with `X` indexing rows.
pub fn pair_sources_upper<Fx, Fy>(pxy: &DiscreteDist, nx: usize, fx: Fx, fy: Fy, candidates: &[(DiscreteDist, DiscreteDist)], grid: &AlphaGrid) -> Result<BoundResult>
where
    Fx: Fn(&DiscreteDist) -> f64 + Sync + Send,
    Fy: Fn(&DiscreteDist) -> f64 + Sync + Send,
{
    if nx == 0 || !pxy.len().is_multiple_of(nx) {
        return Err(invalid(format!("joint alphabet {} is not a multiple of |X| = {nx}", pxy.len())));
    }
    let ny = pxy.len() / nx;
    for (qx, qy) in candidates {
        if qx.len() != nx {
            return Err(Error::DimensionMismatch { left: nx, right: qx.len() });
        }
        if qy.len() != ny {
            return Err(Error::DimensionMismatch { left: ny, right: qy.len() });
        }
    }
    let inner = grid.clone().with_execution(crate::Execution::Sequential);
    let results = par::map_indexed(grid.execution(), candidates.len(), |k| {
        let (qx, qy) = &candidates[k];
        let q = qx.product(qy);
        if !q.is_abs_continuous_wrt(pxy) {
            return BoundResult::infeasible((1.0, f64::INFINITY));
        }
        let f = fx(qx) + fy(qy);
        scan_alpha(&inner, Goal::Minimize, (1.0, f64::INFINITY), |a| {
            let d = DivergenceOrder::new(a).and_then(|o| renyi_discrete(&q, pxy, o)).unwrap_or(f64::NAN);
            nan_unless_finite(a / (a - 1.0) * f + a * d)
        })
        .with_aux("candidate", k as f64)
    });
    let values: Vec<f64> = results.iter().map(|r| if r.feasible { r.value } else { f64::NAN }).collect();
    Ok(match best_index(&values, Goal::Minimize) {
        Some(i) => results[i].clone(),
        None => BoundResult::infeasible((1.0, f64::INFINITY)),
    })
}

/// Binary entropy in nats.
pub fn binary_entropy(q: f64) -> f64 {
    let h = |x: f64| if x > 0.0 { -x * x.ln() } else { 0.0 };
    h(q) + h(1.0 - q)
}

/// `R(d, q) = h(q) − h(d)` for `d < min(q, 1−q)`, else 0.
pub fn binary_rate_distortion(d: f64, q: f64) -> f64 {
    if d < q.min(1.0 - q) {
        binary_entropy(q) - binary_entropy(d)
    } else {
        0.0
    }
}

/// `D(Bern(q) ‖ Bern(p))` in nats.
pub fn binary_kl(q: f64, p: f64) -> f64 {
    let t = |a: f64, b: f64| if a > 0.0 { a * (a / b).ln() } else { 0.0 };
    t(q, p) + t(1.0 - q, 1.0 - p)
}

/// Lower bound on the guessing-moment exponent of order `ρ`:
/// `sup_{α, q̂} [ρR(d, q̂) − α/(α−1) D(q̂‖p) − A ln(tilt(p, α))/(α−1)]`,
/// clamped at zero.
pub fn guessing_lower(rho: f64, p: f64, amplitude: f64, d: f64, qhat_grid: &[f64], grid: &AlphaGrid) -> Result<BoundResult> {
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(invalid(format!("moment order {rho} must be finite and positive")));
    }
    log_tilt_factor(p, 2.0)?;
    if !(amplitude >= 0.0 && amplitude.is_finite()) {
        return Err(invalid(format!("amplitude {amplitude} must be finite and nonnegative")));
    }
    if qhat_grid.is_empty() || qhat_grid.iter().any(|q| !(0.0..=1.0).contains(q)) {
        return Err(invalid("q̂ grid must be nonempty with entries in [0, 1]"));
    }
    let inner = grid.clone().with_execution(crate::Execution::Sequential);
    let results = par::map_slice(grid.execution(), qhat_grid, |&q| {
        let gain = rho * binary_rate_distortion(d, q);
        let kl = binary_kl(q, p);
        scan_alpha(&inner, Goal::Maximize, (1.0, f64::INFINITY), |a| {
            let t = log_tilt_factor(p, a).unwrap_or(f64::NAN);
            nan_unless_finite(gain - a / (a - 1.0) * kl - amplitude * t / (a - 1.0))
        })
        .with_aux("qhat", q)
    });
    let values: Vec<f64> = results.iter().map(|r| if r.feasible { r.value } else { f64::NAN }).collect();
    Ok(match best_index(&values, Goal::Maximize) {
        Some(i) => results[i].clone().clamp_nonnegative(),
        None => BoundResult::infeasible((1.0, f64::INFINITY)),
    })
}
