//! Brute-force oracles: exhaustive checks of the comparison inequalities on
//! random finite instances, finite-length Monte Carlo, a Toeplitz
//! determinant check of the spectral limit, and a registry that pairs every
//! closed form with an independent numerical oracle.
//!
//! All reports are serializable and are pure functions of their seed.

pub mod lpcb;
pub mod mc;
pub mod oracles;
pub mod szego;

pub use lpcb::{duality_check, enumerate_lpcb, monotonicity_check, DualityReport, LpcbReport, MonotonicityReport};
pub use mc::{mc_finite_n_lpcb, Estimator, McConfig, McReport, McScene};
pub use oracles::{closed_form_oracle_suite, OracleReport, CLOSED_FORMS};
pub use szego::{szego_check, SzegoReport, ToeplitzScene};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};

use crate::divergence::DiscreteDist;

/// Generator for substream `stream` of `seed`.
pub(crate) fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

/// Random distribution of size `n`. With probability `zero_prob` each entry
/// is zeroed, keeping at least one positive entry.
pub(crate) fn random_dist<R: Rng>(rng: &mut R, n: usize, zero_prob: f64) -> DiscreteDist {
    let mut w: Vec<f64> = (0..n)
        .map(|_| {
            let x: f64 = Exp1.sample(rng);
            if rng.random::<f64>() < zero_prob {
                0.0
            } else {
                x
            }
        })
        .collect();
    if w.iter().all(|x| *x == 0.0) {
        w[rng.random_range(0..n)] = 1.0;
    }
    DiscreteDist::from_weights(&w).expect("positive weights")
}

/// Order drawn log-uniformly in `α − 1 ∈ [lo − 1, hi − 1]`.
pub(crate) fn random_order<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    let (a, b) = ((lo - 1.0).ln(), (hi - 1.0).ln());
    1.0 + (a + (b - a) * rng.random::<f64>()).exp()
}
