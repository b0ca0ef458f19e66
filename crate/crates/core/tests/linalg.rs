use nalgebra::DMatrix;
use proptest::prelude::*;

use lpcb::erasure::{iid_erasure_penalty, log_perron_root, varadhan_sup, MarkovErasure};
use lpcb::numerics::linalg::{perron, Matrix, PERRON_MAX_ITER, PERRON_TOL};
use lpcb::verify::ToeplitzScene;
use lpcb::DivergenceOrder;

fn to_nalgebra(m: &Matrix) -> DMatrix<f64> {
    let n = m.dim();
    DMatrix::from_fn(n, n, |i, j| m[(i, j)])
}

fn spectral_radius(m: &Matrix) -> f64 {
    to_nalgebra(m).complex_eigenvalues().iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn positive_matrix() -> impl Strategy<Value = Matrix> {
    (2usize..7).prop_flat_map(|n| prop::collection::vec(0.01f64..5.0, n * n).prop_map(move |v| Matrix::from_fn(n, |i, j| v[i * n + j])))
}

fn stochastic_rows() -> impl Strategy<Value = Vec<Vec<f64>>> {
    (2usize..6).prop_flat_map(|n| {
        prop::collection::vec(prop::collection::vec(0.02f64..1.0, n), n).prop_map(|rows| {
            rows.into_iter()
                .map(|r| {
                    let s: f64 = r.iter().sum();
                    r.into_iter().map(|x| x / s).collect()
                })
                .collect()
        })
    })
}

proptest! {
    #[test]
    fn perron_root_matches_eigen_decomposition(m in positive_matrix()) {
        let p = perron(&m, PERRON_TOL, PERRON_MAX_ITER).unwrap();
        let rho = spectral_radius(&m);
        prop_assert!((p.root - rho).abs() <= 1e-10 * rho);
        let y = m.mul_vec(&p.vector);
        for (yi, xi) in y.iter().zip(&p.vector) {
            prop_assert!(*xi > 0.0);
            prop_assert!((yi - p.root * xi).abs() <= 1e-9 * p.root * xi.max(1e-300));
        }
    }

    #[test]
    fn tilted_root_matches_eigen_decomposition(rows in stochastic_rows(), labels in prop::collection::vec(0u8..2, 6), lambda in -30.0f64..30.0) {
        let pi = Matrix::from_rows(&rows).unwrap();
        let fbar = &labels[..pi.dim()];
        let tilted = Matrix::from_fn(pi.dim(), |i, j| pi[(i, j)] * (lambda * f64::from(fbar[j])).exp());
        let expected = spectral_radius(&tilted).ln();
        let got = log_perron_root(&pi, fbar, lambda).unwrap();
        prop_assert!((got - expected).abs() <= 1e-9 * expected.abs().max(1.0), "{got} vs {expected}");
    }

    #[test]
    fn identical_rows_reduce_to_the_iid_penalty(row in prop::collection::vec(0.02f64..1.0, 2..6), labels in prop::collection::vec(0u8..2, 6), p in 0.01f64..0.5, a in 1.01f64..30.0) {
        let n = row.len();
        let s: f64 = row.iter().sum();
        let row: Vec<f64> = row.iter().map(|x| x / s).collect();
        let f = labels[..n].to_vec();
        let q: f64 = row.iter().zip(&f).filter(|(_, l)| **l == 0).map(|(x, _)| x).sum::<f64>().min(1.0);
        let me = MarkovErasure::new(&vec![row; n], f, p).unwrap();
        let o = DivergenceOrder::new(a).unwrap();
        let chain = varadhan_sup(&me, o).unwrap();
        let iid = iid_erasure_penalty(q, p, o).unwrap();
        prop_assert!((chain - iid).abs() <= 1e-10 * iid.abs().max(1.0));
    }

    #[test]
    fn log_det_matches_cholesky(a in -0.9f64..0.9, b in 0.05f64..1.0, frac in 0.0f64..0.95, n in 2usize..120) {
        let sup = b * b / (1.0 - a.abs()).powi(2);
        let scene = ToeplitzScene::new(a, b, frac / (2.0 * sup), vec![n]).unwrap();
        let m = scene.matrix(n);
        let ours = m.spd_log_det().unwrap();
        let chol = to_nalgebra(&m).cholesky().expect("positive definite");
        let theirs: f64 = chol.l().diagonal().iter().map(|d| 2.0 * d.ln()).sum();
        prop_assert!((ours - theirs).abs() <= 1e-10 * theirs.abs().max(1.0));
    }
}

#[test]
fn periodic_chain_root_is_found() {
    // 3-cycle tilted on one state: ρ = e^{λ/3}.
    let pi = Matrix::from_rows(&[vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0], vec![1.0, 0.0, 0.0]]).unwrap();
    for lambda in [-300.0, -5.0, 0.0, 2.0, 150.0] {
        let got = log_perron_root(&pi, &[1, 0, 0], lambda).unwrap();
        assert!((got - lambda / 3.0).abs() <= 1e-9 * (lambda / 3.0).abs().max(1.0), "{lambda}: {got}");
    }
}

#[test]
fn reducible_matrices_are_rejected() {
    let m = Matrix::from_rows(&[vec![1.0, 1.0], vec![0.0, 1.0]]).unwrap();
    assert!(!m.is_irreducible());
    assert!(perron(&m, PERRON_TOL, PERRON_MAX_ITER).is_err());
}
