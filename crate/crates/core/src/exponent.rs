//! Exponent-level comparison bounds and their α-optimizers.
//!
//! For a model `P` and reference `Q` with divergence rates
//! `Δ_α^{P,Q} = limsup (1/n) D_α(P_n‖Q_n)`:
//!
//! ```text
//! (α−1)/α · E_*(Q) − (α−1) Δ_α^{P,Q}  ≤  E_*(P)
//! E^*(P)  ≤  α/(α−1) · E^*(Q) + α Δ_α^{Q,P}
//! ```
//!
//! Every bound in the crate is optimized over α by [`scan_alpha`]: a grid
//! scan followed by golden-section refinement around the best point.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::grid::AlphaGrid;
use crate::numerics::optimize::{optimize_on_grid, Goal};

/// Stand-in for `α → 1⁺` when an optimum sits on that boundary.
pub const BOUNDARY_ALPHA: f64 = 1.0 + 1e-6;

/// The lim-sup and lim-inf error exponents of a code sequence,
/// `E_* ≤ E^*`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentPair {
    pub e_star: f64,
    pub e_upper_star: f64,
}

impl ExponentPair {
    pub fn new(e_star: f64, e_upper_star: f64) -> Result<Self> {
        if !(e_star >= 0.0 && e_star.is_finite() && e_upper_star.is_finite()) {
            return Err(invalid(format!("exponents ({e_star}, {e_upper_star}) must be finite and nonnegative")));
        }
        if e_star > e_upper_star {
            return Err(invalid(format!("E_* = {e_star} exceeds E^* = {e_upper_star}")));
        }
        Ok(Self { e_star, e_upper_star })
    }

    /// Both exponents equal, i.e. the limit exists.
    pub fn exact(e: f64) -> Result<Self> {
        Self::new(e, e)
    }
}

/// An optimized bound together with the parameters that attain it.
///
/// Infeasible results carry `NaN` in `value` and `alpha_star`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundResult {
    pub value: f64,
    pub alpha_star: f64,
    /// Secondary optimizing parameters (`s`, `tau`, `theta`, ...).
    pub aux_params: BTreeMap<String, f64>,
    /// `(α_lo, α_hi]`, the orders at which the bound is finite.
    pub feasible_interval: (f64, f64),
    pub feasible: bool,
    /// A lower bound was negative before clamping at zero.
    pub clamped: bool,
    /// The optimizer landed on the edge of the feasible grid.
    pub at_boundary: bool,
}

impl BoundResult {
    pub fn infeasible(feasible_interval: (f64, f64)) -> Self {
        Self {
            value: f64::NAN,
            alpha_star: f64::NAN,
            aux_params: BTreeMap::new(),
            feasible_interval,
            feasible: false,
            clamped: false,
            at_boundary: false,
        }
    }

    pub fn with_aux(mut self, name: &str, value: f64) -> Self {
        self.aux_params.insert(name.to_string(), value);
        self
    }

    pub fn aux(&self, name: &str) -> Option<f64> {
        self.aux_params.get(name).copied()
    }

    /// Clamps a lower bound at zero, recording whether it was negative.
    pub fn clamp_nonnegative(mut self) -> Self {
        if self.feasible && self.value < 0.0 {
            self.value = 0.0;
            self.clamped = true;
        }
        self
    }
}

/// Lower and upper bounds on the same exponent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoSided {
    pub lower: BoundResult,
    pub upper: BoundResult,
}

type RateFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A divergence rate `α ↦ Δ_α ≥ 0`, finite on `domain = (lo, hi]`.
#[derive(Clone)]
pub struct DivergenceRate {
    rate: RateFn,
    domain: (f64, f64),
}

impl fmt::Debug for DivergenceRate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DivergenceRate").field("domain", &self.domain).finish_non_exhaustive()
    }
}

impl DivergenceRate {
    pub fn new(rate: impl Fn(f64) -> f64 + Send + Sync + 'static, domain: (f64, f64)) -> Self {
        Self { rate: Arc::new(rate), domain }
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    pub fn constant(c: f64) -> Self {
        Self::new(move |_| c, (1.0, f64::INFINITY))
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    /// `Δ_α`, or `None` outside the domain or where the rate is not a
    /// finite nonnegative number.
    pub fn eval(&self, alpha: f64) -> Option<f64> {
        if !(alpha > self.domain.0 && alpha <= self.domain.1) {
            return None;
        }
        let v = (self.rate)(alpha);
        (v.is_finite() && v >= 0.0).then_some(v)
    }
}

/// Optimizes `objective` over the grid. The objective returns `NaN` (or any
/// non-finite value) at orders where the bound does not apply.
pub fn scan_alpha<F>(grid: &AlphaGrid, goal: Goal, feasible_interval: (f64, f64), objective: F) -> BoundResult
where
    F: Fn(f64) -> f64 + Sync + Send,
{
    match optimize_on_grid(&objective, grid.values(), goal, grid.refines(), grid.execution()) {
        None => BoundResult::infeasible(feasible_interval),
        Some(opt) => BoundResult {
            value: opt.value,
            alpha_star: opt.x,
            aux_params: BTreeMap::new(),
            feasible_interval,
            feasible: true,
            clamped: false,
            at_boundary: opt.at_edge,
        },
    }
}

/// Maps non-finite values to `NaN` so grid scans skip them.
pub(crate) fn nan_unless_finite(x: f64) -> f64 {
    if x.is_finite() {
        x
    } else {
        f64::NAN
    }
}

/// Two-sided exponent bounds from divergence rates in both directions.
pub fn two_sided_exponent_bounds(
    e_q: ExponentPair,
    delta_pq: &DivergenceRate,
    delta_qp: &DivergenceRate,
    grid: &AlphaGrid,
) -> TwoSided {
    let lower = scan_alpha(grid, Goal::Maximize, delta_pq.domain(), |a| match delta_pq.eval(a) {
        Some(d) => (a - 1.0) / a * e_q.e_star - (a - 1.0) * d,
        None => f64::NAN,
    })
    .clamp_nonnegative();
    let upper = scan_alpha(grid, Goal::Minimize, delta_qp.domain(), |a| match delta_qp.eval(a) {
        Some(d) => a / (a - 1.0) * e_q.e_upper_star + a * d,
        None => f64::NAN,
    });
    TwoSided { lower, upper }
}

/// Closed-form optimum over `α > 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlphaOptimum {
    pub alpha_star: f64,
    pub value: f64,
    /// The optimum is only approached as `α → 1⁺` or `α → ∞`.
    pub at_boundary: bool,
}

/// Minimizes `α/(α−1)·u + α·v` over `α > 1`: `α* = 1 + √(u/v)`, minimum
/// `(√u + √v)²`. For `u = 0` the infimum `v` is approached as `α → 1⁺`.
pub fn optimize_ratio_plus_linear(u: f64, v: f64) -> Result<AlphaOptimum> {
    if !(u >= 0.0 && u.is_finite()) {
        return Err(invalid(format!("u = {u} must be finite and nonnegative")));
    }
    if !(v > 0.0 && v.is_finite()) {
        return Err(invalid(format!("v = {v} must be finite and positive")));
    }
    let value = u + v + 2.0 * (u * v).sqrt();
    if u == 0.0 {
        return Ok(AlphaOptimum { alpha_star: BOUNDARY_ALPHA, value, at_boundary: true });
    }
    Ok(AlphaOptimum { alpha_star: 1.0 + (u / v).sqrt(), value, at_boundary: false })
}

/// Maximizes `(α−1)/α·u − (α−1)·v` over `α > 1`: `α* = √(u/v)` with
/// maximum `(√u − √v)²` when `u > v`, else the supremum `0` at `α → 1⁺`.
/// For `v = 0` the supremum `u` is approached as `α → ∞`.
pub fn optimize_ratio_minus_linear(u: f64, v: f64) -> Result<AlphaOptimum> {
    if !(u >= 0.0 && u.is_finite() && v >= 0.0 && v.is_finite()) {
        return Err(invalid(format!("u = {u}, v = {v} must be finite and nonnegative")));
    }
    if v == 0.0 {
        return Ok(AlphaOptimum { alpha_star: f64::INFINITY, value: u, at_boundary: true });
    }
    if u <= v {
        return Ok(AlphaOptimum { alpha_star: BOUNDARY_ALPHA, value: 0.0, at_boundary: true });
    }
    Ok(AlphaOptimum { alpha_star: (u / v).sqrt(), value: (u.sqrt() - v.sqrt()).powi(2), at_boundary: false })
}

/// Leading term `(√E^*(Q) + √(ε̄²/2))²` of the upper bound for a channel
/// perturbed as `p = q(1 + ε)`, with `ε̄² = Σ q ε²`. The `o(‖ε‖²)`
/// remainder is not modeled.
pub fn perturbation_upper_bound(e_q_star: f64, eps2_bar: f64) -> f64 {
    let (u, v) = (e_q_star.max(0.0), eps2_bar.max(0.0) / 2.0);
    u + v + 2.0 * (u * v).sqrt()
}

/// `max_β (β−1)/β · E_L − (β−1) δ(β)`, clamped at zero.
pub fn iterated_lower_bound<F>(e_l: f64, delta: F, beta_grid: &AlphaGrid) -> BoundResult
where
    F: Fn(f64) -> f64 + Sync + Send,
{
    scan_alpha(beta_grid, Goal::Maximize, (1.0, f64::INFINITY), |b| {
        let d = delta(b);
        if d >= 0.0 {
            nan_unless_finite((b - 1.0) / b * e_l - (b - 1.0) * d)
        } else {
            f64::NAN
        }
    })
    .clamp_nonnegative()
}

/// `δ(β) = ln(1/z)/β` for noise whose density is a truncation of the
/// reference density to a set of reference probability `z`.
pub fn truncation_delta(z: f64) -> Result<impl Fn(f64) -> f64 + Sync + Send + Copy> {
    if !(z > 0.0 && z <= 1.0) {
        return Err(invalid(format!("truncation mass z = {z} must lie in (0, 1]")));
    }
    Ok(move |beta: f64| -z.ln() / beta)
}
