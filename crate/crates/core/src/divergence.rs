//! Rényi and Kullback–Leibler divergences, the probability and functional
//! comparison inequalities, and the measures that make them tight.
//!
//! All Rényi divergences here carry the `1/(α(α−1))` normalization:
//!
//! ```text
//! D_α(P‖Q) = 1/(α(α−1)) · ln Σ p_i^α q_i^(1−α)      (P ≪ Q)
//! ```
//!
//! and `+∞` when `P` is not absolutely continuous with respect to `Q`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, infeasible, Error, Result};
use crate::numerics::{log_sum_exp, log_weighted_sum_exp};

/// Slack allowed before an inequality is reported as violated.
pub const HOLD_TOL: f64 = 1e-12;

/// Allowed deviation of `Σ p_i` from one.
pub const SUM_TOL: f64 = 1e-12;

/// A probability vector on a finite alphabet.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteDist {
    probs: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
}

impl DiscreteDist {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(invalid("distribution has an empty alphabet"));
        }
        if let Some(p) = probs.iter().find(|p| !(p.is_finite() && **p >= 0.0)) {
            return Err(invalid(format!("probability {p} is not a finite nonnegative number")));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > SUM_TOL {
            return Err(invalid(format!("probabilities sum to {sum}, not 1")));
        }
        Ok(Self { probs, labels: None })
    }

    /// Normalizes nonnegative weights.
    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
            return Err(invalid(format!("weight {w} is not a finite nonnegative number")));
        }
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) {
            return Err(invalid("weights have zero total mass"));
        }
        Self::new(weights.iter().map(|w| w / total).collect())
    }

    /// Normalizes `exp(log_weights)` without overflow.
    pub fn from_log_weights(log_weights: &[f64]) -> Result<Self> {
        let z = log_sum_exp(log_weights.iter().copied());
        if !z.is_finite() {
            return Err(invalid("log-weights do not define a finite positive mass"));
        }
        let probs: Vec<f64> = log_weights.iter().map(|w| (w - z).exp()).collect();
        let s: f64 = probs.iter().sum();
        Self::new(probs.into_iter().map(|p| p / s).collect())
    }

    pub fn uniform(n: usize) -> Result<Self> {
        Self::from_weights(&vec![1.0; n])
    }

    pub fn point_mass(n: usize, at: usize) -> Result<Self> {
        if at >= n {
            return Err(invalid(format!("point mass index {at} outside alphabet of size {n}")));
        }
        let mut p = vec![0.0; n];
        p[at] = 1.0;
        Self::new(p)
    }

    /// Bernoulli distribution `(1 − q, q)`.
    pub fn bernoulli(q: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&q) {
            return Err(invalid(format!("Bernoulli parameter {q} outside [0, 1]")));
        }
        Self::new(vec![1.0 - q, q])
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.probs.len() {
            return Err(Error::DimensionMismatch { left: self.probs.len(), right: labels.len() });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.probs.len()).filter(|&i| self.probs[i] > 0.0).collect()
    }

    /// `P(A)` for an event given as a membership mask.
    pub fn mass(&self, event: &[bool]) -> Result<f64> {
        check_dims(self.len(), event.len())?;
        Ok(self.probs.iter().zip(event).filter(|(_, &a)| a).map(|(p, _)| p).sum::<f64>().min(1.0))
    }

    /// `P(· | A)`.
    pub fn conditional(&self, event: &[bool]) -> Result<Self> {
        let m = self.mass(event)?;
        if !(m > 0.0) {
            return Err(infeasible("conditioning event has zero probability"));
        }
        let w: Vec<f64> = self.probs.iter().zip(event).map(|(p, &a)| if a { *p } else { 0.0 }).collect();
        Self::from_weights(&w)
    }

    /// Product measure, flattened row-major (`self` indexes rows).
    pub fn product(&self, other: &Self) -> Self {
        let probs = self
            .probs
            .iter()
            .flat_map(|a| other.probs.iter().map(move |b| a * b))
            .collect();
        Self { probs, labels: None }
    }

    /// Absolute continuity `self ≪ other`, checked on the exact zero pattern.
    pub fn is_abs_continuous_wrt(&self, other: &Self) -> bool {
        self.probs.iter().zip(&other.probs).all(|(p, q)| *p == 0.0 || *q > 0.0)
    }
}

/// Rényi order `α > 1`. The order-one case is [`kl_discrete`].
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct DivergenceOrder(f64);

impl DivergenceOrder {
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha.is_finite() && alpha > 1.0 {
            Ok(Self(alpha))
        } else {
            Err(invalid(format!("divergence order must be a finite value > 1, got {alpha}")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for DivergenceOrder {
    type Error = Error;
    fn try_from(a: f64) -> Result<Self> {
        Self::new(a)
    }
}

impl From<DivergenceOrder> for f64 {
    fn from(a: DivergenceOrder) -> f64 {
        a.0
    }
}

/// Scalar normal law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianScalar {
    pub mean: f64,
    pub variance: f64,
}

impl GaussianScalar {
    pub fn new(mean: f64, variance: f64) -> Result<Self> {
        if !(variance.is_finite() && variance > 0.0) || !mean.is_finite() {
            return Err(invalid(format!("invalid Gaussian N({mean}, {variance})")));
        }
        Ok(Self { mean, variance })
    }

    pub fn density(&self, x: f64) -> f64 {
        let z = x - self.mean;
        (-(z * z) / (2.0 * self.variance)).exp() / (2.0 * std::f64::consts::PI * self.variance).sqrt()
    }
}

fn check_dims(a: usize, b: usize) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { left: a, right: b })
    }
}

/// `ln Σ p_i^α q_i^(1−α)` over `supp(p)`; `+∞` if `p` is not `≪ q`.
fn log_renyi_moment(p: &DiscreteDist, q: &DiscreteDist, alpha: f64) -> f64 {
    if !p.is_abs_continuous_wrt(q) {
        return f64::INFINITY;
    }
    log_sum_exp(
        p.probs
            .iter()
            .zip(&q.probs)
            .filter(|(pi, _)| **pi > 0.0)
            .map(|(pi, qi)| alpha * pi.ln() + (1.0 - alpha) * qi.ln()),
    )
}

/// `D_α(p‖q)`; `+∞` when `p` is not absolutely continuous w.r.t. `q`.
pub fn renyi_discrete(p: &DiscreteDist, q: &DiscreteDist, order: DivergenceOrder) -> Result<f64> {
    check_dims(p.len(), q.len())?;
    let a = order.value();
    let m = log_renyi_moment(p, q, a);
    if m.is_infinite() {
        return Ok(f64::INFINITY);
    }
    Ok((m / (a * (a - 1.0))).max(0.0))
}

/// `D(p‖q) = Σ p_i ln(p_i/q_i)` with `0 ln 0 = 0`.
pub fn kl_discrete(p: &DiscreteDist, q: &DiscreteDist) -> Result<f64> {
    check_dims(p.len(), q.len())?;
    if !p.is_abs_continuous_wrt(q) {
        return Ok(f64::INFINITY);
    }
    let d: f64 = p
        .probs
        .iter()
        .zip(&q.probs)
        .filter(|(pi, _)| **pi > 0.0)
        .map(|(pi, qi)| pi * (pi / qi).ln())
        .sum();
    Ok(d.max(0.0))
}

/// `D_α(N(x, σ²/s) ‖ N(x + ξ, σ²))`, independent of `x`.
///
/// Finite only for `s > 1 − 1/α`.
pub fn renyi_gaussian_scaled_shift(xi: f64, sigma2: f64, s: f64, order: DivergenceOrder) -> Result<f64> {
    let a = order.value();
    if !(sigma2 > 0.0) {
        return Err(invalid(format!("noise variance must be positive, got {sigma2}")));
    }
    let k = 1.0 + a * (s - 1.0);
    if !(s > 0.0 && k > 0.0) {
        return Err(infeasible(format!(
            "scale s = {s} must exceed 1 − 1/α = {}",
            1.0 - 1.0 / a
        )));
    }
    Ok(s.ln() / (2.0 * (a - 1.0)) - k.ln() / (2.0 * a * (a - 1.0)) + s * xi * xi / (2.0 * sigma2 * k))
}

/// `∫ exp{−a(y−u)² − b(y−v)²} dy = √(π/(a+b)) · exp{−ab(u−v)²/(a+b)}`.
pub fn gaussian_product_integral(u: f64, v: f64, a: f64, b: f64) -> Result<f64> {
    let s = a + b;
    if !(s > 0.0) {
        return Err(infeasible(format!("a + b = {s} must be positive")));
    }
    Ok((std::f64::consts::PI / s).sqrt() * (-a * b * (u - v) * (u - v) / s).exp())
}

/// Two sides of an inequality `lhs ≤ rhs`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

impl Comparison {
    fn new(lhs: f64, rhs: f64) -> Self {
        let holds = lhs <= rhs + HOLD_TOL || lhs == f64::NEG_INFINITY || rhs == f64::INFINITY;
        Self { lhs, rhs, holds }
    }

    /// `lhs − rhs` when positive, else zero; infinite sides give zero when
    /// the inequality holds.
    pub fn violation(&self) -> f64 {
        if self.lhs == f64::NEG_INFINITY || self.rhs == f64::INFINITY {
            return 0.0;
        }
        (self.lhs - self.rhs).max(0.0)
    }

    /// `|lhs − rhs|`, for equality checks.
    pub fn gap(&self) -> f64 {
        if self.lhs == self.rhs {
            0.0
        } else {
            (self.lhs - self.rhs).abs()
        }
    }
}

fn check_prob(x: f64, name: &str) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(invalid(format!("{name} = {x} is not a probability")))
    }
}

/// Logarithmic probability comparison:
/// `ln P(A)/(α−1) ≤ ln Q(A)/α + D_α(P‖Q)`.
pub fn lpcb_event(p_a: f64, q_a: f64, div_pq: f64, order: DivergenceOrder) -> Result<Comparison> {
    check_prob(p_a, "P(A)")?;
    check_prob(q_a, "Q(A)")?;
    if !(div_pq >= 0.0) {
        return Err(invalid(format!("divergence {div_pq} must be nonnegative")));
    }
    let a = order.value();
    let lhs = p_a.ln() / (a - 1.0);
    let rhs = if div_pq.is_infinite() {
        f64::INFINITY
    } else {
        q_a.ln() / a + div_pq
    };
    Ok(Comparison::new(lhs, rhs))
}

/// The comparison with roles exchanged, read as a lower bound on `P(A)`:
/// `ln Q(A)/(α−1) − D_α(Q‖P) ≤ ln P(A)/α`.
pub fn lpcb_event_reversed(p_a: f64, q_a: f64, div_qp: f64, order: DivergenceOrder) -> Result<Comparison> {
    let c = lpcb_event(q_a, p_a, div_qp, order)?;
    let lhs = if c.rhs.is_infinite() && div_qp.is_infinite() {
        f64::NEG_INFINITY
    } else {
        c.lhs - div_qp
    };
    Ok(Comparison::new(lhs, p_a.ln() / order.value()))
}

fn check_g(g: &[f64]) -> Result<()> {
    if let Some(x) = g.iter().find(|x| !x.is_finite()) {
        return Err(invalid(format!("function value {x} is not finite")));
    }
    Ok(())
}

/// Risk-sensitive functional comparison:
/// `ln E_P[e^{(α−1)g}]/(α−1) ≤ ln E_Q[e^{αg}]/α + D_α(P‖Q)`.
pub fn lpcb_functional(g: &[f64], p: &DiscreteDist, q: &DiscreteDist, order: DivergenceOrder) -> Result<Comparison> {
    check_dims(g.len(), p.len())?;
    check_dims(p.len(), q.len())?;
    check_g(g)?;
    let a = order.value();
    let lhs = duality_left(g, p, a);
    let d = renyi_discrete(p, q, order)?;
    let rhs = if d.is_infinite() { f64::INFINITY } else { duality_value(g, q, order)? + d };
    Ok(Comparison::new(lhs, rhs))
}

fn duality_left(g: &[f64], p: &DiscreteDist, a: f64) -> f64 {
    let e: Vec<f64> = g.iter().map(|x| (a - 1.0) * x).collect();
    log_weighted_sum_exp(&p.probs, &e) / (a - 1.0)
}

/// `ln E_Q[e^{αg}] / α`, the value of the variational problem.
pub fn duality_value(g: &[f64], q: &DiscreteDist, order: DivergenceOrder) -> Result<f64> {
    check_dims(g.len(), q.len())?;
    check_g(g)?;
    let a = order.value();
    let e: Vec<f64> = g.iter().map(|x| a * x).collect();
    Ok(log_weighted_sum_exp(&q.probs, &e) / a)
}

/// `ln E_P[e^{(α−1)g}]/(α−1) − D_α(P‖Q)`, the objective whose supremum over
/// `P` is [`duality_value`].
pub fn duality_objective(g: &[f64], p: &DiscreteDist, q: &DiscreteDist, order: DivergenceOrder) -> Result<f64> {
    check_dims(g.len(), p.len())?;
    check_dims(p.len(), q.len())?;
    check_g(g)?;
    let d = renyi_discrete(p, q, order)?;
    Ok(duality_left(g, p, order.value()) - d)
}

/// The maximizer `p_i ∝ e^{g_i} q_i` of [`duality_objective`].
///
/// With `D_α` normalized by `1/(α(α−1))`, substituting `p ∝ e^{cg}q` gives
/// the value `ln E_Q[e^{αg}]/α` exactly when `c = 1`, for every order.
pub fn duality_maximizer(g: &[f64], q: &DiscreteDist, _order: DivergenceOrder) -> Result<DiscreteDist> {
    check_dims(g.len(), q.len())?;
    check_g(g)?;
    let lw: Vec<f64> = g
        .iter()
        .zip(&q.probs)
        .map(|(x, qi)| if *qi > 0.0 { x + qi.ln() } else { f64::NEG_INFINITY })
        .collect();
    DiscreteDist::from_log_weights(&lw)
}

fn check_weights(w: &[f64]) -> Result<()> {
    if let Some(x) = w.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
        return Err(invalid(format!("weight {x} is not a finite nonnegative number")));
    }
    Ok(())
}

/// Comparison with a nonnegative weight `G` in place of `e^g`:
/// `ln Σ G^{α−1} P / (α−1) ≤ ln Σ G^α Q / α + D_α(P‖Q)`.
pub fn lpcb_weighted(weight: &[f64], p: &DiscreteDist, q: &DiscreteDist, order: DivergenceOrder) -> Result<Comparison> {
    check_dims(weight.len(), p.len())?;
    check_dims(p.len(), q.len())?;
    check_weights(weight)?;
    let a = order.value();
    let lw: Vec<f64> = weight.iter().map(|w| w.ln()).collect();
    let lhs = log_sum_exp(
        lw.iter()
            .zip(&p.probs)
            .filter(|(_, pi)| **pi > 0.0)
            .map(|(l, pi)| (a - 1.0) * l + pi.ln()),
    ) / (a - 1.0);
    let d = renyi_discrete(p, q, order)?;
    let rhs = if d.is_infinite() {
        f64::INFINITY
    } else {
        log_sum_exp(
            lw.iter()
                .zip(&q.probs)
                .filter(|(_, qi)| **qi > 0.0)
                .map(|(l, qi)| a * l + qi.ln()),
        ) / a
            + d
    };
    Ok(Comparison::new(lhs, rhs))
}

/// The reference measure `q_i ∝ p_i / G_i` on `supp(p) ∩ supp(G)` that makes
/// [`lpcb_weighted`] an equality.
///
/// Equality needs `supp(p) ⊆ supp(G)`; otherwise `p` is not absolutely
/// continuous w.r.t. the returned measure and the right side is infinite.
/// The order does not enter the construction; it is accepted so the
/// signature matches the inequality it saturates.
pub fn equality_achiever_event(p: &DiscreteDist, weight: &[f64], _order: DivergenceOrder) -> Result<DiscreteDist> {
    check_dims(weight.len(), p.len())?;
    check_weights(weight)?;
    let w: Vec<f64> = p
        .probs
        .iter()
        .zip(weight)
        .map(|(pi, gi)| if *pi > 0.0 && *gi > 0.0 { pi / gi } else { 0.0 })
        .collect();
    if w.iter().all(|x| *x == 0.0) {
        return Err(invalid("supports of p and the weight do not intersect"));
    }
    DiscreteDist::from_weights(&w)
}
