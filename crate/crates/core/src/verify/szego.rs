//! Finite-`n` log-determinants of AR(1) Toeplitz covariances against their
//! spectral limit.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::fading::ar_log_term;
use crate::numerics::linalg::Matrix;

/// AR(1) fading `h_t = a h_{t−1} + b w_t` with tilt `c`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToeplitzScene {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub n_list: Vec<usize>,
}

impl ToeplitzScene {
    pub fn new(a: f64, b: f64, c: f64, n_list: Vec<usize>) -> Result<Self> {
        if !(a.abs() < 1.0 && b > 0.0 && c >= 0.0 && b.is_finite() && c.is_finite()) {
            return Err(invalid("need |a| < 1, b > 0 and finite c ≥ 0"));
        }
        if n_list.is_empty() || n_list.contains(&0) {
            return Err(invalid("block lengths must be positive"));
        }
        Ok(Self { a, b, c, n_list })
    }

    /// Stationary variance `b²/(1 − a²)`.
    pub fn r0(&self) -> f64 {
        self.b * self.b / (1.0 - self.a * self.a)
    }

    /// `I − 2cV_n` with `V_n(i, j) = r0·a^{|i−j|}`.
    pub fn matrix(&self, n: usize) -> Matrix {
        let r0 = self.r0();
        let two_c = 2.0 * self.c;
        Matrix::from_fn(n, |i, j| {
            let v = r0 * self.a.powi(i.abs_diff(j) as i32);
            f64::from(u8::from(i == j)) - two_c * v
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SzegoRow {
    pub n: usize,
    /// `−logdet(I − 2cV_n)/(2n)`.
    pub finite_n: f64,
    /// `|finite_n − limit| / max(|limit|, ε)`, or the absolute gap when the
    /// limit vanishes.
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SzegoReport {
    pub scene: ToeplitzScene,
    pub limit: f64,
    pub rows: Vec<SzegoRow>,
    /// Gaps are nonincreasing in `n` (up to rounding).
    pub monotone: bool,
    pub final_gap: f64,
    pub passed: bool,
}

/// Compares each finite-`n` value with the limit `−(1/4π)∫ ln(1 − 2cΣ)`,
/// requiring a final relative gap of at most `tol` and monotone gaps.
pub fn szego_check(scene: &ToeplitzScene, tol: f64) -> Result<SzegoReport> {
    let limit = ar_log_term(scene.a, scene.b, scene.c)? / 2.0;
    let mut rows = Vec::with_capacity(scene.n_list.len());
    for &n in &scene.n_list {
        let ld = scene.matrix(n).spd_log_det()?;
        let finite_n = -ld / (2.0 * n as f64);
        let gap = if limit == 0.0 { finite_n.abs() } else { ((finite_n - limit) / limit).abs() };
        rows.push(SzegoRow { n, finite_n, gap });
    }
    let monotone = rows.windows(2).all(|w| w[1].gap <= w[0].gap * (1.0 + 1e-9) + 1e-15);
    let final_gap = rows.last().map_or(f64::NAN, |r| r.gap);
    Ok(SzegoReport { scene: scene.clone(), limit, rows, monotone, final_gap, passed: monotone && final_gap <= tol })
}
