//! Small dense matrices: Cholesky log-determinant and Perron roots of
//! nonnegative irreducible matrices.

use crate::error::{Error, Result};

/// Row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for r in rows {
            if r.len() != n {
                return Err(Error::DimensionMismatch { left: n, right: r.len() });
            }
            data.extend_from_slice(r);
        }
        Ok(Self { n, data })
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `xᵀ A`.
    pub fn vec_mul(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        for (i, xi) in x.iter().enumerate() {
            for (o, a) in out.iter_mut().zip(self.row(i)) {
                *o += xi * a;
            }
        }
        out
    }

    /// `ln det A` for symmetric positive definite `A` via Cholesky.
    pub fn spd_log_det(&self) -> Result<f64> {
        let l = self.cholesky()?;
        Ok(2.0 * (0..self.n).map(|i| l[(i, i)].ln()).sum::<f64>())
    }

    /// Lower-triangular `L` with `A = L Lᵀ`.
    pub fn cholesky(&self) -> Result<Matrix> {
        let n = self.n;
        let mut l = Matrix::zeros(n);
        for j in 0..n {
            let mut d = self[(j, j)];
            for k in 0..j {
                d -= l[(j, k)] * l[(j, k)];
            }
            if !(d > 0.0) {
                return Err(Error::Infeasible(format!(
                    "matrix is not positive definite (pivot {j} = {d:e})"
                )));
            }
            let djj = d.sqrt();
            l[(j, j)] = djj;
            for i in (j + 1)..n {
                let (ri, rj) = (i * n, j * n);
                let s: f64 = l.data[ri..ri + j]
                    .iter()
                    .zip(&l.data[rj..rj + j])
                    .map(|(a, b)| a * b)
                    .sum();
                l[(i, j)] = (self[(i, j)] - s) / djj;
            }
        }
        Ok(l)
    }

    /// True if the directed graph of positive entries is strongly connected.
    pub fn is_irreducible(&self) -> bool {
        let n = self.n;
        if n == 0 {
            return false;
        }
        let reach = |forward: bool| {
            let mut seen = vec![false; n];
            let mut stack = vec![0usize];
            seen[0] = true;
            while let Some(i) = stack.pop() {
                for j in 0..n {
                    let w = if forward { self[(i, j)] } else { self[(j, i)] };
                    if w > 0.0 && !seen[j] {
                        seen[j] = true;
                        stack.push(j);
                    }
                }
            }
            seen.into_iter().all(|s| s)
        };
        reach(true) && reach(false)
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n + j]
    }
}

/// Perron root and right eigenvector of a nonnegative irreducible matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Perron {
    pub root: f64,
    /// Positive right eigenvector normalized to unit sum.
    pub vector: Vec<f64>,
    pub iterations: usize,
}

pub const PERRON_TOL: f64 = 1e-12;
pub const PERRON_MAX_ITER: usize = 100_000;

/// `rI − A` is a nonsingular M-matrix, i.e. `r > ρ(A)`, exactly when
/// elimination without pivoting leaves only positive pivots.
fn exceeds_spectral_radius(a: &Matrix, r: f64) -> bool {
    let n = a.dim();
    let mut m = Matrix::from_fn(n, |i, j| f64::from(u8::from(i == j)) * r - a[(i, j)]);
    for k in 0..n {
        let piv = m[(k, k)];
        if !(piv > 0.0) {
            return false;
        }
        for i in k + 1..n {
            let f = m[(i, k)] / piv;
            if f != 0.0 {
                for j in k + 1..n {
                    let v = m[(k, j)];
                    m[(i, j)] -= f * v;
                }
            }
        }
    }
    true
}

/// Coarse estimate of `ρ(A)` by bisection in `ln r` between the smallest
/// and largest row sums.
fn radius_estimate(a: &Matrix) -> f64 {
    let sums: Vec<f64> = (0..a.dim()).map(|i| a.row(i).iter().sum()).collect();
    let mut lo = sums.iter().copied().fold(f64::INFINITY, f64::min).ln();
    let mut hi = sums.iter().copied().fold(0.0, f64::max).ln();
    if !(lo.is_finite() && hi.is_finite()) {
        return hi.exp();
    }
    while hi - lo > 1e-4 {
        let mid = 0.5 * (lo + hi);
        if exceeds_spectral_radius(a, mid.exp()) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    (0.5 * (lo + hi)).exp()
}

/// Power iteration on `A + sI` with `s` a bisection estimate of `ρ(A)`, so
/// periodic matrices still have a strictly dominant eigenvalue and the
/// dominance ratio stays away from 1 when `ρ(A)` is far below the row sums.
/// Terminates when the Collatz–Wielandt bracket
/// `min (Bx)_i/x_i ≤ ρ(B) ≤ max (Bx)_i/x_i` is tighter than `tol` relative.
pub fn perron(a: &Matrix, tol: f64, max_iter: usize) -> Result<Perron> {
    let n = a.dim();
    if !a.is_irreducible() {
        return Err(Error::InvalidInput("matrix is not irreducible".into()));
    }
    let shift = radius_estimate(a);
    let mut x = vec![1.0 / n as f64; n];
    for it in 1..=max_iter {
        let mut y = a.mul_vec(&x);
        for (yi, xi) in y.iter_mut().zip(&x) {
            *yi += shift * xi;
        }
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for (yi, xi) in y.iter().zip(&x) {
            let r = yi / xi;
            lo = lo.min(r);
            hi = hi.max(r);
        }
        let s: f64 = y.iter().sum();
        for yi in y.iter_mut() {
            *yi /= s;
        }
        x = y;
        if hi - lo <= tol * hi {
            return Ok(Perron { root: 0.5 * (lo + hi) - shift, vector: x, iterations: it });
        }
    }
    Err(Error::Numerical(format!("power iteration did not converge in {max_iter} iterations")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cholesky_log_det_matches_2x2() {
        let m = Matrix::from_rows(&[vec![4.0, 2.0], vec![2.0, 3.0]]).unwrap();
        assert!((m.spd_log_det().unwrap() - 8f64.ln()).abs() < 1e-14);
        let bad = Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap();
        assert!(matches!(bad.spd_log_det(), Err(Error::Infeasible(_))));
    }

    #[test]
    fn perron_of_periodic_matrix() {
        // 3-cycle permutation: eigenvalues are the cube roots of unity
        let m = Matrix::from_fn(3, |i, j| if j == (i + 1) % 3 { 1.0 } else { 0.0 });
        let p = perron(&m, 1e-12, 10_000).unwrap();
        assert!((p.root - 1.0).abs() < 1e-12);
    }

    #[test]
    fn reducible_matrix_rejected() {
        let m = Matrix::from_rows(&[vec![1.0, 0.0], vec![0.5, 0.5]]).unwrap();
        assert!(!m.is_irreducible());
        assert!(perron(&m, 1e-12, 100).is_err());
    }
}
