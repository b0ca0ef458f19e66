//! Binary symmetric channel with hidden-Markov erasures.
//!
//! A stationary chain `A_t` on `{0, …, d−1}` with transition matrix `Π`
//! labels each use by `f(A_t) ∈ {0, 1}`; uses with `f = 0` may be flipped
//! with probability `p`. The erasure frequency obeys a large-deviation
//! principle with rate `I(x) = sup_λ [λx − ln ρ(Π_λ)]`, where
//! `Π_λ(i,j) = Π(i,j) e^{λ f̄(j)}` and `f̄ = 1 − f`.

use crate::divergence::DivergenceOrder;
use crate::error::{invalid, Error, Result};
use crate::exponent::{nan_unless_finite, scan_alpha, TwoSided};
use crate::grid::AlphaGrid;
use crate::numerics::linalg::{perron, Matrix, PERRON_MAX_ITER, PERRON_TOL};
use crate::numerics::log_sum_exp;
use crate::numerics::optimize::{golden_section_max, Goal};

const ROW_SUM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct MarkovErasure {
    pi: Matrix,
    f: Vec<u8>,
    p: f64,
}

impl MarkovErasure {
    /// `f[i] = 0` marks states whose uses can be erased.
    pub fn new(rows: &[Vec<f64>], f: Vec<u8>, p: f64) -> Result<Self> {
        let pi = Matrix::from_rows(rows)?;
        if f.len() != pi.dim() {
            return Err(Error::DimensionMismatch { left: pi.dim(), right: f.len() });
        }
        if f.iter().any(|&v| v > 1) {
            return Err(invalid("labels f must be 0 or 1"));
        }
        for (i, r) in rows.iter().enumerate() {
            if r.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
                return Err(invalid(format!("row {i} has a negative or non-finite entry")));
            }
            let s: f64 = r.iter().sum();
            if (s - 1.0).abs() > ROW_SUM_TOL {
                return Err(invalid(format!("row {i} sums to {s}, not 1")));
            }
        }
        if !pi.is_irreducible() {
            return Err(invalid("transition matrix is not irreducible"));
        }
        check_crossover(p)?;
        Ok(Self { pi, f, p })
    }

    pub fn transitions(&self) -> &Matrix {
        &self.pi
    }

    pub fn labels(&self) -> &[u8] {
        &self.f
    }

    pub fn crossover(&self) -> f64 {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.pi.dim()
    }

    /// `f̄ = 1 − f`, the erasure indicator.
    pub fn fbar(&self) -> Vec<u8> {
        self.f.iter().map(|v| 1 - v).collect()
    }

    /// Stationary distribution (left Perron vector of `Π`).
    pub fn stationary(&self) -> Result<Vec<f64>> {
        let t = Matrix::from_fn(self.dim(), |i, j| self.pi[(j, i)]);
        Ok(perron(&t, PERRON_TOL, PERRON_MAX_ITER)?.vector)
    }

    /// Stationary erasure frequency `Σ_i π(i) f̄(i)`.
    pub fn stationary_mean(&self) -> Result<f64> {
        let s = self.stationary()?;
        Ok(s.iter().zip(self.fbar()).map(|(w, b)| w * f64::from(b)).sum())
    }

    /// `ln ρ(Π_λ)`.
    pub fn log_perron_root(&self, lambda: f64) -> Result<f64> {
        log_perron_root(&self.pi, &self.fbar(), lambda)
    }
}

fn check_crossover(p: f64) -> Result<()> {
    if p > 0.0 && p <= 0.5 {
        Ok(())
    } else {
        Err(invalid(format!("crossover probability {p} must lie in (0, 1/2]")))
    }
}

/// `ln[p^α (1−p)^{1−α} + (1−p)^α p^{1−α}]` for `p ∈ (0, 1)`.
pub fn log_tilt_factor(p: f64, alpha: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(invalid(format!("p = {p} must lie in (0, 1)")));
    }
    let (lp, lq) = (p.ln(), (-p).ln_1p());
    Ok(log_sum_exp([alpha * lp + (1.0 - alpha) * lq, alpha * lq + (1.0 - alpha) * lp]))
}

/// `p^α (1−p)^{1−α} + (1−p)^α p^{1−α}`, symmetric in `p ↔ 1−p`.
pub fn tilt_factor(p: f64, alpha: f64) -> Result<f64> {
    Ok(log_tilt_factor(p, alpha)?.exp())
}

/// `δ(α) = p((1−p)/p)^α + (1−p)(p/(1−p))^α ≥ 1` for `p ∈ (0, 1/2]`.
pub fn delta_alpha(p: f64, order: DivergenceOrder) -> Result<f64> {
    check_crossover(p)?;
    Ok(tilt_factor(p, order.value())?.max(1.0))
}

/// `ln δ(α)`, finite even where `δ(α)` overflows.
pub fn log_delta_alpha(p: f64, order: DivergenceOrder) -> Result<f64> {
    check_crossover(p)?;
    Ok(log_tilt_factor(p, order.value())?.max(0.0))
}

/// `ρ(Π_λ)` by power iteration.
pub fn perron_root(pi: &Matrix, fbar: &[u8], lambda: f64) -> Result<f64> {
    Ok(log_perron_root(pi, fbar, lambda)?.exp())
}

/// `ln ρ(Π_λ)`, with the largest tilt `max_j λf̄(j)` factored out so large
/// `|λ|` does not overflow.
pub fn log_perron_root(pi: &Matrix, fbar: &[u8], lambda: f64) -> Result<f64> {
    let n = pi.dim();
    if fbar.len() != n {
        return Err(Error::DimensionMismatch { left: n, right: fbar.len() });
    }
    if !pi.is_irreducible() {
        return Err(invalid("transition matrix is not irreducible"));
    }
    let tilt: Vec<f64> = fbar.iter().map(|&b| lambda * f64::from(b)).collect();
    let m = tilt.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let scaled = Matrix::from_fn(n, |i, j| pi[(i, j)] * (tilt[j] - m).exp());
    Ok(m + perron(&scaled, PERRON_TOL, PERRON_MAX_ITER)?.root.ln())
}

/// Largest tilt magnitude tried when searching for the Legendre maximizer.
const LAMBDA_MAX: f64 = 512.0;
/// Slope of the Legendre objective at `±LAMBDA_MAX` above which the
/// supremum is declared infinite.
const SLOPE_TOL: f64 = 1e-6;

/// `I(x) = sup_λ [λx − ln ρ(Π_λ)]`, `+∞` outside the range of attainable
/// erasure frequencies.
pub fn rate_function(me: &MarkovErasure, x: f64) -> f64 {
    if !(0.0..=1.0).contains(&x) {
        return f64::INFINITY;
    }
    let fbar = me.fbar();
    let lam = |l: f64| log_perron_root(&me.pi, &fbar, l).unwrap_or(f64::NAN);
    let obj = |l: f64| l * x - lam(l);
    let mut span = 1.0;
    loop {
        let (l, v) = golden_section_max(obj, -span, span, 1e-10);
        if l.abs() < 0.99 * span {
            return v.max(0.0);
        }
        if span >= LAMBDA_MAX {
            let h = 1e-4;
            let edge = l.signum() * span;
            let slope = x - (lam(edge + h) - lam(edge - h)) / (2.0 * h);
            return if slope * edge.signum() > SLOPE_TOL { f64::INFINITY } else { v.max(0.0) };
        }
        span *= 2.0;
    }
}

/// `sup_x [x ln δ(α) − I(x)] = ln ρ(Π_{ln δ(α)})`.
pub fn varadhan_sup(me: &MarkovErasure, order: DivergenceOrder) -> Result<f64> {
    let ld = log_delta_alpha(me.p, order)?;
    me.log_perron_root(ld)
}

/// `ln(1 − q + qδ(α))`: the penalty when every row of `Π` equals the same
/// distribution with erasure mass `q`.
pub fn iid_erasure_penalty(q: f64, p: f64, order: DivergenceOrder) -> Result<f64> {
    if !(0.0..=1.0).contains(&q) {
        return Err(invalid(format!("erasure mass q = {q} must lie in [0, 1]")));
    }
    let ld = log_delta_alpha(p, order)?;
    if q == 0.0 {
        return Ok(0.0);
    }
    Ok(log_sum_exp([(-q).ln_1p(), q.ln() + ld]))
}

fn bounds_from_penalty(e_q: f64, grid: &AlphaGrid, v: impl Fn(f64) -> f64 + Sync + Send) -> TwoSided {
    let interval = (1.0, f64::INFINITY);
    let upper = scan_alpha(grid, Goal::Minimize, interval, |a| nan_unless_finite(a / (a - 1.0) * e_q + v(a) / (a - 1.0)));
    let lower = scan_alpha(grid, Goal::Maximize, interval, |a| nan_unless_finite((a - 1.0) / a * e_q - v(a) / a)).clamp_nonnegative();
    TwoSided { lower, upper }
}

/// Exponent bounds for the hidden-Markov erasure channel.
pub fn erasure_bounds(me: &MarkovErasure, e_q: f64, grid: &AlphaGrid) -> Result<TwoSided> {
    check_exponent(e_q)?;
    Ok(bounds_from_penalty(e_q, grid, |a| match DivergenceOrder::new(a) {
        Ok(o) => varadhan_sup(me, o).unwrap_or(f64::NAN),
        Err(_) => f64::NAN,
    }))
}

/// Exponent bounds when at most a fraction `z` of uses can be erased.
pub fn bounded_fraction_bounds(z: f64, p: f64, e_q: f64, grid: &AlphaGrid) -> Result<TwoSided> {
    if !(0.0..=1.0).contains(&z) {
        return Err(invalid(format!("erasure fraction z = {z} must lie in [0, 1]")));
    }
    check_crossover(p)?;
    check_exponent(e_q)?;
    Ok(bounds_from_penalty(e_q, grid, |a| match DivergenceOrder::new(a) {
        Ok(o) => log_delta_alpha(p, o).map_or(f64::NAN, |ld| z * ld),
        Err(_) => f64::NAN,
    }))
}

fn check_exponent(e: f64) -> Result<()> {
    if e >= 0.0 && e.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("reference exponent {e} must be finite and nonnegative")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn o(a: f64) -> DivergenceOrder {
        DivergenceOrder::new(a).unwrap()
    }

    fn two_state(stay: f64, p: f64) -> MarkovErasure {
        MarkovErasure::new(&[vec![stay, 1.0 - stay], vec![1.0 - stay, stay]], vec![1, 0], p).unwrap()
    }

    #[test]
    fn delta_examples() {
        assert!((delta_alpha(0.5, o(3.0)).unwrap() - 1.0).abs() < 1e-15);
        let want = 0.1 * 81.0 + 0.9 / 81.0;
        assert!((delta_alpha(0.1, o(2.0)).unwrap() - want).abs() < 1e-12);
        assert!(delta_alpha(0.6, o(2.0)).is_err());
        assert!(delta_alpha(0.0, o(2.0)).is_err());
    }

    #[test]
    fn perron_trivial_cases() {
        let me = two_state(0.9, 0.1);
        assert!(me.log_perron_root(0.0).unwrap().abs() < 1e-12);
        let one = Matrix::from_rows(&[vec![1.0]]).unwrap();
        assert!((perron_root(&one, &[1], 0.7).unwrap() - 0.7f64.exp()).abs() < 1e-12);
    }

    #[test]
    fn stationary_mean_zeroes_rate() {
        let me = two_state(0.9, 0.1);
        let xbar = me.stationary_mean().unwrap();
        assert!((xbar - 0.5).abs() < 1e-10);
        assert!(rate_function(&me, xbar) < 1e-10);
        assert!(rate_function(&me, 0.8) > 0.0);
        assert_eq!(rate_function(&me, 1.5), f64::INFINITY);
    }

    #[test]
    fn iid_rows_give_bernoulli_divergence() {
        let q: f64 = 0.3;
        let row = vec![1.0 - q, q];
        let me = MarkovErasure::new(&[row.clone(), row], vec![1, 0], 0.2).unwrap();
        for x in [0.05, 0.2, 0.3, 0.6, 0.9] {
            let want = x * (x / q).ln() + (1.0 - x) * ((1.0 - x) / (1.0 - q)).ln();
            assert!((rate_function(&me, x) - want).abs() < 1e-8, "x={x}");
        }
        let d = delta_alpha(0.2, o(2.5)).unwrap();
        let v = varadhan_sup(&me, o(2.5)).unwrap();
        assert!((v - (1.0 - q + q * d).ln()).abs() < 1e-10);
    }

    #[test]
    fn deterministic_cycle_pins_frequency() {
        // 3-cycle with one erasure-capable state: frequency is exactly 1/3.
        let rows = vec![vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0], vec![1.0, 0.0, 0.0]];
        let me = MarkovErasure::new(&rows, vec![0, 1, 1], 0.1).unwrap();
        assert!((me.log_perron_root(0.9).unwrap() - 0.3).abs() < 1e-10);
        assert!(rate_function(&me, 1.0 / 3.0) < 1e-8);
        assert_eq!(rate_function(&me, 0.6), f64::INFINITY);
    }

    #[test]
    fn no_erasures_no_penalty() {
        let rows = vec![vec![0.5, 0.5], vec![0.5, 0.5]];
        let me = MarkovErasure::new(&rows, vec![1, 1], 0.1).unwrap();
        assert!(varadhan_sup(&me, o(3.0)).unwrap().abs() < 1e-12);
        let me = two_state(0.9, 0.5);
        assert!(varadhan_sup(&me, o(3.0)).unwrap().abs() < 1e-12);
    }

    #[test]
    fn reducible_chain_rejected() {
        assert!(MarkovErasure::new(&[vec![1.0, 0.0], vec![0.5, 0.5]], vec![1, 0], 0.1).is_err());
    }

    #[test]
    fn bounds_order() {
        let b = erasure_bounds(&two_state(0.9, 0.1), 1.0, &AlphaGrid::default()).unwrap();
        assert!(b.lower.value <= b.upper.value);
        let b = bounded_fraction_bounds(0.0, 0.1, 1.0, &AlphaGrid::geometric(1.5, 1e7, 200).unwrap()).unwrap();
        assert!((b.lower.value - 1.0).abs() < 1e-4 && (b.upper.value - 1.0).abs() < 1e-4);
    }
}
