//! Gaussian channels: memoryless mismatch, additive interference with an
//! energy constraint `Σ Γ_t² ≤ nΓ²`, and zero-rate bounds under ISI.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::divergence::{kl_discrete, renyi_discrete, renyi_gaussian_scaled_shift, DiscreteDist, DivergenceOrder};
use crate::error::{invalid, Error, Result};
use crate::exponent::{nan_unless_finite, optimize_ratio_plus_linear, scan_alpha, AlphaOptimum, BoundResult};
use crate::grid::AlphaGrid;
use crate::numerics::optimize::{best_index, bisect, golden_section_min, Goal};
use crate::par;

type ExponentFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Reliability-function bound `E_sl(R, Q_s)` of the reference channel with
/// noise variance `σ²/s`.
#[derive(Clone)]
pub enum ReferenceExponent {
    /// Very-noisy closed form with capacity `s·C_Q`.
    VeryNoisy { c_q: f64 },
    Zero,
    Constant(f64),
    Custom(ExponentFn),
}

impl fmt::Debug for ReferenceExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::VeryNoisy { c_q } => f.debug_struct("VeryNoisy").field("c_q", c_q).finish(),
            Self::Zero => f.write_str("Zero"),
            Self::Constant(c) => f.debug_tuple("Constant").field(c).finish(),
            Self::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

impl ReferenceExponent {
    pub fn custom(f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        Self::Custom(Arc::new(f))
    }

    pub fn eval(&self, rate: f64, s: f64) -> f64 {
        match self {
            Self::VeryNoisy { c_q } => very_noisy_reference_exponent(s * c_q, rate),
            Self::Zero => 0.0,
            Self::Constant(c) => *c,
            Self::Custom(f) => f(rate, s),
        }
    }

    /// Checks that `R ↦ E(R, s)` is nonincreasing on `rates`.
    pub fn is_nonincreasing(&self, rates: &[f64], s: f64) -> bool {
        rates.windows(2).all(|w| self.eval(w[1], s) <= self.eval(w[0], s) + 1e-12)
    }
}

#[derive(Debug, Clone)]
pub struct ChannelScene {
    pub rate: f64,
    pub power: f64,
    pub noise_var: f64,
    pub gamma: f64,
    pub reference: ReferenceExponent,
}

impl ChannelScene {
    pub fn new(rate: f64, power: f64, noise_var: f64, gamma: f64, reference: ReferenceExponent) -> Result<Self> {
        if !(rate >= 0.0 && rate.is_finite()) {
            return Err(invalid(format!("rate {rate} must be finite and nonnegative")));
        }
        check_positive(power, "power S")?;
        check_positive(noise_var, "noise variance")?;
        if !(gamma >= 0.0 && gamma.is_finite()) {
            return Err(invalid(format!("interference bound {gamma} must be finite and nonnegative")));
        }
        Ok(Self { rate, power, noise_var, gamma, reference })
    }

    /// `C_Q = S/(2σ²)`, the very-noisy capacity of the reference channel.
    pub fn c_q(&self) -> f64 {
        self.power / (2.0 * self.noise_var)
    }
}

fn check_positive(x: f64, name: &str) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("{name} = {x} must be finite and positive")))
    }
}

/// A finite-alphabet channel, one conditional distribution per input.
pub type Channel = Vec<DiscreteDist>;

fn check_channel(rows: &[DiscreteDist], mu: &DiscreteDist) -> Result<()> {
    if rows.len() != mu.len() {
        return Err(Error::DimensionMismatch { left: rows.len(), right: mu.len() });
    }
    let ny = rows.first().map_or(0, DiscreteDist::len);
    if let Some(r) = rows.iter().find(|r| r.len() != ny) {
        return Err(Error::DimensionMismatch { left: ny, right: r.len() });
    }
    Ok(())
}

/// `α Σ_x μ(x) D_α(q(·|x) ‖ p(·|x))`, the normalized divergence between
/// memoryless channels driven by a constant-composition code with type `μ`.
pub fn mismatch_single_letter_divergence(q: &[DiscreteDist], p: &[DiscreteDist], mu: &DiscreteDist, order: DivergenceOrder) -> Result<f64> {
    check_channel(q, mu)?;
    check_channel(p, mu)?;
    let mut sum = 0.0;
    for ((qx, px), &m) in q.iter().zip(p).zip(mu.probs()) {
        if m == 0.0 {
            continue;
        }
        let d = renyi_discrete(qx, px, order)?;
        if d.is_infinite() {
            return Ok(f64::INFINITY);
        }
        sum += m * d;
    }
    Ok(order.value() * sum)
}

/// `Σ_x μ(x) D(q(·|x) ‖ p(·|x))`.
pub fn conditional_kl(q: &[DiscreteDist], p: &[DiscreteDist], mu: &DiscreteDist) -> Result<f64> {
    check_channel(q, mu)?;
    check_channel(p, mu)?;
    let mut sum = 0.0;
    for ((qx, px), &m) in q.iter().zip(p).zip(mu.probs()) {
        if m > 0.0 {
            sum += m * kl_discrete(qx, px)?;
        }
    }
    Ok(sum)
}

/// `I(μ, q)` in nats.
pub fn mutual_information(mu: &DiscreteDist, q: &[DiscreteDist]) -> Result<f64> {
    check_channel(q, mu)?;
    let ny = q[0].len();
    let out: Vec<f64> = (0..ny).map(|y| q.iter().zip(mu.probs()).map(|(r, m)| m * r.probs()[y]).sum()).collect();
    let out = DiscreteDist::new(out)?;
    let rows = vec![out; q.len()];
    conditional_kl(q, &rows, mu)
}

/// The channel `q(y|x) ∝ ψ(y) e^{−θ d(x,y)}` matched to a decoding metric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceFamilyDiscrete {
    pub theta: f64,
    pub psi: DiscreteDist,
    pub metric: Vec<Vec<f64>>,
}

impl ReferenceFamilyDiscrete {
    pub fn new(theta: f64, psi: DiscreteDist, metric: Vec<Vec<f64>>) -> Result<Self> {
        if !(theta >= 0.0 && theta.is_finite()) {
            return Err(invalid(format!("theta = {theta} must be finite and nonnegative")));
        }
        for row in &metric {
            if row.len() != psi.len() {
                return Err(Error::DimensionMismatch { left: psi.len(), right: row.len() });
            }
            if row.iter().any(|d| !(d.is_finite() && *d >= 0.0)) {
                return Err(invalid("metric entries must be finite and nonnegative"));
            }
        }
        Ok(Self { theta, psi, metric })
    }

    pub fn channel(&self) -> Result<Channel> {
        self.metric
            .iter()
            .map(|row| {
                let w: Vec<f64> = row.iter().zip(self.psi.probs()).map(|(d, p)| p * (-self.theta * d).exp()).collect();
                DiscreteDist::from_weights(&w)
            })
            .collect()
    }
}

/// Upper bound on the mismatched-decoding exponent of the memoryless
/// channel `p` under `metric`, minimized over the family `q_{θ,ψ}` and `α`.
///
/// `e_sl` supplies the reference exponent of each constructed channel.
pub fn memoryless_mismatch_upper<F>(
    p: &[DiscreteDist],
    mu: &DiscreteDist,
    metric: &[Vec<f64>],
    e_sl: F,
    thetas: &[f64],
    psis: &[DiscreteDist],
    grid: &AlphaGrid,
) -> Result<BoundResult>
where
    F: Fn(&[DiscreteDist]) -> f64 + Sync + Send,
{
    check_channel(p, mu)?;
    if metric.len() != p.len() {
        return Err(Error::DimensionMismatch { left: p.len(), right: metric.len() });
    }
    let mut family = Vec::with_capacity(thetas.len() * psis.len());
    for &theta in thetas {
        for (k, psi) in psis.iter().enumerate() {
            let f = ReferenceFamilyDiscrete::new(theta, psi.clone(), metric.to_vec())?;
            family.push((theta, k, f.channel()?));
        }
    }
    let inner = grid.clone().with_execution(crate::Execution::Sequential);
    let results = par::map_slice(grid.execution(), &family, |(theta, k, q)| {
        let e = e_sl(q);
        scan_alpha(&inner, Goal::Minimize, (1.0, f64::INFINITY), |a| {
            let Ok(order) = DivergenceOrder::new(a) else { return f64::NAN };
            match mismatch_single_letter_divergence(q, p, mu, order) {
                Ok(d) => nan_unless_finite(a / (a - 1.0) * e + d),
                Err(_) => f64::NAN,
            }
        })
        .with_aux("theta", *theta)
        .with_aux("psi_index", *k as f64)
    });
    let values: Vec<f64> = results.iter().map(|r| if r.feasible { r.value } else { f64::NAN }).collect();
    Ok(match best_index(&values, Goal::Minimize) {
        Some(i) => results[i].clone(),
        None => BoundResult::infeasible((1.0, f64::INFINITY)),
    })
}

/// Objective of the interference upper bound at `(α, s)`:
/// `α/(α−1)·E_sl + α D_α(N(0, σ²/s) ‖ N(Γ, σ²))`. `NaN` for
/// `s ≤ 1 − 1/α`.
pub fn interference_objective(e_sl: f64, alpha: f64, s: f64, gamma: f64, noise_var: f64) -> f64 {
    let Ok(order) = DivergenceOrder::new(alpha) else { return f64::NAN };
    match renyi_gaussian_scaled_shift(gamma, noise_var, s, order) {
        Ok(d) => nan_unless_finite(alpha / (alpha - 1.0) * e_sl + alpha * d),
        Err(_) => f64::NAN,
    }
}

/// Upper bound on the exponent of a Gaussian channel with bounded additive
/// interference, minimized over `α` on `grid` and the noise scaling `s` on
/// `s_grid`, then refined by alternating golden-section passes.
pub fn interference_upper(scene: &ChannelScene, grid: &AlphaGrid, s_grid: &[f64]) -> BoundResult {
    let obj = |a: f64, s: f64| {
        if !(s > 1.0 - 1.0 / a) {
            return f64::NAN;
        }
        interference_objective(scene.reference.eval(scene.rate, s), a, s, scene.gamma, scene.noise_var)
    };
    let alphas = grid.values();
    // Row-major over (α, s); the first minimum in this order wins ties.
    let rows: Vec<Vec<f64>> = par::map_slice(grid.execution(), alphas, |&a| s_grid.iter().map(|&s| obj(a, s)).collect());
    let flat: Vec<f64> = rows.concat();
    let interval = (1.0, f64::INFINITY);
    let Some(k) = best_index(&flat, Goal::Minimize) else {
        return BoundResult::infeasible(interval);
    };
    let (ia, is) = (k / s_grid.len(), k % s_grid.len());
    let (mut a, mut s, mut v) = (alphas[ia], s_grid[is], flat[k]);
    let at_boundary = ia == 0 || ia + 1 == alphas.len() || is == 0 || is + 1 == s_grid.len();
    if grid.refines() {
        // Profile over s on the full s range, then golden section in α.
        let (s_min, s_max) = (s_grid[0], s_grid[s_grid.len() - 1]);
        let profile = |x: f64| golden_section_min(|t| obj(x, t), s_min.max(1.0 - 1.0 / x), s_max, 1e-15);
        let prof: Vec<f64> = par::map_slice(grid.execution(), alphas, |&x| profile(x).1);
        if let Some(j) = best_index(&prof, Goal::Minimize) {
            let (a_lo, a_hi) = (alphas[j.saturating_sub(1)], alphas[(j + 1).min(alphas.len() - 1)]);
            let (an, va) = golden_section_min(|x| profile(x).1, a_lo, a_hi, 1e-15);
            if va < v {
                (a, s, v) = (an, profile(an).0, va);
            }
        }
    }
    BoundResult {
        value: v,
        alpha_star: a,
        aux_params: BTreeMap::from([("s".to_string(), s)]),
        feasible_interval: interval,
        feasible: true,
        clamped: false,
        at_boundary,
    }
}

/// The `s = 1` slice in closed form: `α* = 1 + σ√(2E_sl)/Γ` and value
/// `(√E_sl + Γ/(√2σ))²`. With `Γ = 0` the value is `E_sl`, approached as
/// `α → ∞`.
pub fn interference_s1_closed_form(e_sl: f64, gamma: f64, noise_var: f64) -> Result<AlphaOptimum> {
    check_positive(noise_var, "noise variance")?;
    if gamma == 0.0 {
        return Ok(AlphaOptimum { alpha_star: f64::INFINITY, value: e_sl, at_boundary: true });
    }
    optimize_ratio_plus_linear(e_sl, gamma * gamma / (2.0 * noise_var))
}

/// Very-noisy reliability function with capacity `c_q`.
pub fn very_noisy_reference_exponent(c_q: f64, rate: f64) -> f64 {
    if rate < c_q / 4.0 {
        c_q / 2.0 - rate
    } else if rate < c_q {
        (c_q.sqrt() - rate.sqrt()).powi(2)
    } else {
        0.0
    }
}

/// Piecewise upper bound `E_1(R)` for the very-noisy channel with
/// interference: the shifted reference exponent up to `C_Q`, then the
/// straight line through `(C_Q, Γ²/2σ²)` and `(C, 0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VeryNoisyE1 {
    pub c_q: f64,
    /// `C = (√S + Γ)²/(2σ²)`.
    pub c: f64,
    pub gamma: f64,
    pub noise_var: f64,
}

impl VeryNoisyE1 {
    pub fn eval(&self, rate: f64) -> f64 {
        let g2 = self.gamma * self.gamma / (2.0 * self.noise_var);
        if rate < self.c_q / 4.0 {
            ((self.c_q / 2.0 - rate).sqrt() + g2.sqrt()).powi(2)
        } else if rate < self.c_q {
            (self.c.sqrt() - rate.sqrt()).powi(2)
        } else if rate < self.c {
            g2 * (self.c - rate) / (self.c - self.c_q)
        } else {
            0.0
        }
    }

    /// Interior breakpoints; the straight-line piece is absent when `Γ = 0`.
    pub fn breakpoints(&self) -> Vec<f64> {
        if self.c > self.c_q {
            vec![self.c_q / 4.0, self.c_q, self.c]
        } else {
            vec![self.c_q / 4.0, self.c_q]
        }
    }
}

pub fn very_noisy_upper_e1(power: f64, noise_var: f64, gamma: f64) -> Result<VeryNoisyE1> {
    check_positive(power, "power S")?;
    check_positive(noise_var, "noise variance")?;
    if !(gamma >= 0.0 && gamma.is_finite()) {
        return Err(invalid(format!("interference bound {gamma} must be finite and nonnegative")));
    }
    Ok(VeryNoisyE1 {
        c_q: power / (2.0 * noise_var),
        c: (power.sqrt() + gamma).powi(2) / (2.0 * noise_var),
        gamma,
        noise_var,
    })
}

/// `(√E(R,Q₁) − Γ/(√2σ))²` when `E(R,Q₁) ≥ Γ²/(2σ²)`, else 0.
pub fn interference_lower(e_rq1: f64, gamma: f64, noise_var: f64) -> f64 {
    let t = gamma * gamma / (2.0 * noise_var);
    if e_rq1 > t {
        (e_rq1 + t - 2.0 * (e_rq1 * t).sqrt()).max(0.0)
    } else {
        0.0
    }
}

/// Rate at which `E(R, Q₁)` falls to `Γ²/(2σ²)`: the interfered channel
/// still has positive exponent below it, so its capacity is at least this.
pub fn capacity_lower_root<F: Fn(f64) -> f64>(e_rq1: F, gamma: f64, noise_var: f64, rate_max: f64) -> Option<f64> {
    let t = gamma * gamma / (2.0 * noise_var);
    bisect(|r| e_rq1(r) - t, 0.0, rate_max, 1e-14)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Band {
    pub lower: f64,
    pub upper: f64,
}

/// Band on the minimax exponent over all channels within interference `Γ`
/// of the reference `Q₁`.
pub fn robust_band(e_rq1: f64, gamma: f64, noise_var: f64) -> Band {
    Band { lower: interference_lower(e_rq1, gamma, noise_var), upper: e_rq1 }
}

/// `E_1(0) = (√S + Γ√2)²/(4σ²)`.
pub fn zero_rate_optimum(power: f64, noise_var: f64, gamma: f64) -> f64 {
    (power.sqrt() + gamma * 2f64.sqrt()).powi(2) / (4.0 * noise_var)
}

/// `½ ln(1 + (√S + Γ)²/σ²)`.
pub fn capacity_upper(power: f64, gamma: f64, noise_var: f64) -> f64 {
    0.5 * ((power.sqrt() + gamma).powi(2) / noise_var).ln_1p()
}

/// Channel with ISI taps summarized by `r1` and `r2 ≥ r1²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IsiScene {
    pub power: f64,
    pub noise_var: f64,
    pub r1: f64,
    pub r2: f64,
}

impl IsiScene {
    pub fn new(power: f64, noise_var: f64, r1: f64, r2: f64) -> Result<Self> {
        check_positive(power, "power S")?;
        check_positive(noise_var, "noise variance")?;
        if !(r1.is_finite() && r2.is_finite() && r2 >= r1 * r1) {
            return Err(invalid(format!("need r2 ≥ r1², got r1 = {r1}, r2 = {r2}")));
        }
        Ok(Self { power, noise_var, r1, r2 })
    }

    /// `a = r2 − r1²`.
    pub fn a(&self) -> f64 {
        (self.r2 - self.r1 * self.r1).max(0.0)
    }

    /// `b = (1 + r1)²`.
    pub fn b(&self) -> f64 {
        (1.0 + self.r1).powi(2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IsiBand {
    pub lower: f64,
    pub upper: f64,
    pub tau_star: f64,
    pub alpha_star: f64,
    pub theta_star: f64,
    pub phi2_star: f64,
    /// `a ≥ b`: the lower bound is vacuous.
    pub vacuous: bool,
}

/// Zero-rate exponent band `S/(4σ²)(√b ∓ √a)²` under ISI.
pub fn isi_zero_rate_band(scene: &IsiScene) -> IsiBand {
    let (a, b) = (scene.a(), scene.b());
    let k = scene.power / (4.0 * scene.noise_var);
    let (sa, sb) = (a.sqrt(), b.sqrt());
    let vacuous = a >= b;
    let tau_star = if vacuous { f64::NAN } else if a == 0.0 { 1.0 } else { (sb - sa).powi(2) / (b - a) };
    IsiBand {
        lower: if vacuous { 0.0 } else { k * (sb - sa).powi(2) },
        upper: k * (sb + sa).powi(2),
        tau_star,
        alpha_star: 1.0 / (1.0 - tau_star),
        theta_star: 1.0 / (2.0 * scene.noise_var),
        phi2_star: (sb + sa).powi(2),
        vacuous,
    }
}

/// The `(α, τ)` objective whose maximum is the ISI zero-rate lower bound,
/// after the inner quadratic maximization:
/// `Φ(α,τ) + S/(2σ²)[−τa/(1−τ) + τb/(1+τ)]` with
/// `Φ = ((α−1) ln[τα/(α−1)] + ln[α(1−τ)])/(2α)`.
pub fn isi_objective(scene: &IsiScene, alpha: f64, tau: f64) -> f64 {
    if !(alpha > 1.0 && tau > 0.0 && tau < 1.0) {
        return f64::NAN;
    }
    let phi = ((alpha - 1.0) * (tau * alpha / (alpha - 1.0)).ln() + (alpha * (1.0 - tau)).ln()) / (2.0 * alpha);
    let k = scene.power / (2.0 * scene.noise_var);
    phi + k * (-tau * scene.a() / (1.0 - tau) + tau * scene.b() / (1.0 + tau))
}
