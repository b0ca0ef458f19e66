//! Numerical building blocks: quadrature, scalar optimization, small dense
//! linear algebra and log-domain summation.

pub mod linalg;
pub mod optimize;
pub mod quadrature;

/// `ln Σ exp(x_i)`, stable for large magnitudes. Empty input or all `-∞`
/// gives `-∞`.
pub fn log_sum_exp<I: IntoIterator<Item = f64>>(terms: I) -> f64 {
    let terms: Vec<f64> = terms.into_iter().collect();
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if max == f64::INFINITY {
        return f64::INFINITY;
    }
    let s: f64 = terms.iter().map(|&t| (t - max).exp()).sum();
    max + s.ln()
}

/// Weighted log-sum-exp `ln Σ w_i exp(x_i)` over `w_i > 0`; zero weights are
/// skipped.
pub fn log_weighted_sum_exp(weights: &[f64], exps: &[f64]) -> f64 {
    log_sum_exp(
        weights
            .iter()
            .zip(exps)
            .filter(|(w, _)| **w > 0.0)
            .map(|(w, x)| w.ln() + x),
    )
}
