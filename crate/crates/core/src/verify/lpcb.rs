//! Exhaustive checks of the comparison inequalities on random finite
//! instances.

use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{random_dist, random_order, rng};
use crate::divergence::{
    duality_maximizer, duality_objective, duality_value, equality_achiever_event, lpcb_event, lpcb_event_reversed,
    lpcb_functional, lpcb_weighted, renyi_discrete, DivergenceOrder, HOLD_TOL,
};
use crate::error::{invalid, Result};

/// Largest tolerated gap for equality achievers.
pub const ACHIEVER_TOL: f64 = 1e-10;

/// A random instance, serialized when a check fails.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpcbInstance {
    pub case: usize,
    pub p: Vec<f64>,
    pub q: Vec<f64>,
    pub event: Vec<bool>,
    pub g: Vec<f64>,
    pub alpha: f64,
    pub check: String,
    pub amount: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpcbReport {
    pub seed: u64,
    pub cases: usize,
    pub alphabet_size: usize,
    /// Forward event inequality.
    pub max_violation_event: f64,
    /// Reversed event inequality (lower bound on `P(A)`).
    pub max_violation_reversed: f64,
    pub max_violation_functional: f64,
    pub max_violation_weighted: f64,
    /// `|lhs − rhs|` at `P = e^{g}Q/Z` in the functional inequality.
    pub max_gap_duality_achiever: f64,
    /// `|lhs − rhs|` at `Q ∝ P/G` in the weighted inequality.
    pub max_gap_weight_achiever: f64,
    /// `|lhs − rhs|` at `P = Q(·|A)` (forward) and `Q = P(·|A)` (reversed).
    pub max_gap_conditional: f64,
    pub passed: bool,
    pub failures: Vec<LpcbInstance>,
}

impl LpcbReport {
    pub fn max_violation(&self) -> f64 {
        [self.max_violation_event, self.max_violation_reversed, self.max_violation_functional, self.max_violation_weighted]
            .into_iter()
            .fold(0.0, f64::max)
    }

    pub fn max_achiever_gap(&self) -> f64 {
        [self.max_gap_duality_achiever, self.max_gap_weight_achiever, self.max_gap_conditional]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

fn random_event<R: Rng>(rng: &mut R, n: usize) -> Vec<bool> {
    let mut a: Vec<bool> = (0..n).map(|_| rng.random::<bool>()).collect();
    if !a.iter().any(|x| *x) {
        a[rng.random_range(0..n)] = true;
    }
    a
}

/// Checks the event, reversed, functional and weighted inequalities and the
/// tightness of their achievers on `cases` random instances with alphabets
/// of size `2..=alphabet_size`. Every tenth case uses `P = Q`.
pub fn enumerate_lpcb(alphabet_size: usize, cases: usize, seed: u64) -> Result<LpcbReport> {
    if !(2..=10).contains(&alphabet_size) {
        return Err(invalid(format!("alphabet size {alphabet_size} must lie in 2..=10")));
    }
    let mut r = rng(seed, 0);
    let mut rep = LpcbReport {
        seed,
        cases,
        alphabet_size,
        max_violation_event: 0.0,
        max_violation_reversed: 0.0,
        max_violation_functional: 0.0,
        max_violation_weighted: 0.0,
        max_gap_duality_achiever: 0.0,
        max_gap_weight_achiever: 0.0,
        max_gap_conditional: 0.0,
        passed: true,
        failures: Vec::new(),
    };
    for case in 0..cases {
        let n = r.random_range(2..=alphabet_size);
        let q = random_dist(&mut r, n, 0.15);
        let p = if case % 10 == 0 { q.clone() } else { random_dist(&mut r, n, 0.15) };
        let a = random_event(&mut r, n);
        let g: Vec<f64> = (0..n).map(|_| { let x: f64 = StandardNormal.sample(&mut r); 2.0 * x }).collect();
        let alpha = random_order(&mut r, 1.01, 10.0);
        let o = DivergenceOrder::new(alpha)?;

        let ctx = LpcbInstance {
            case,
            p: p.probs().to_vec(),
            q: q.probs().to_vec(),
            event: a.clone(),
            g: g.clone(),
            alpha,
            check: String::new(),
            amount: 0.0,
        };
        let mut note = |check: &str, amount: f64, limit: f64, slot: fn(&mut LpcbReport) -> &mut f64| {
            let s = slot(&mut rep);
            *s = s.max(amount);
            if !(amount <= limit) {
                rep.passed = false;
                rep.failures.push(LpcbInstance { check: check.to_string(), amount, ..ctx.clone() });
            }
        };

        let (pa, qa) = (p.mass(&a)?, q.mass(&a)?);
        let d_pq = renyi_discrete(&p, &q, o)?;
        let d_qp = renyi_discrete(&q, &p, o)?;
        let v = lpcb_event(pa, qa, d_pq, o)?.violation();
        note("event", v, HOLD_TOL, |r| &mut r.max_violation_event);
        let v = lpcb_event_reversed(pa, qa, d_qp, o)?.violation();
        note("reversed", v, HOLD_TOL, |r| &mut r.max_violation_reversed);
        let v = lpcb_functional(&g, &p, &q, o)?.violation();
        note("functional", v, HOLD_TOL, |r| &mut r.max_violation_functional);

        // Weight positive on supp(P), random elsewhere (including zeros).
        let weight: Vec<f64> = p
            .probs()
            .iter()
            .map(|&pi| {
                let x: f64 = Exp1.sample(&mut r);
                let w = 0.05 + x;
                if pi > 0.0 || r.random::<bool>() {
                    w
                } else {
                    0.0
                }
            })
            .collect();
        let v = lpcb_weighted(&weight, &p, &q, o)?.violation();
        note("weighted", v, HOLD_TOL, |r| &mut r.max_violation_weighted);

        let pstar = duality_maximizer(&g, &q, o)?;
        let gap = lpcb_functional(&g, &pstar, &q, o)?.gap();
        note("duality achiever", gap, ACHIEVER_TOL, |r| &mut r.max_gap_duality_achiever);

        let qstar = equality_achiever_event(&p, &weight, o)?;
        let gap = lpcb_weighted(&weight, &p, &qstar, o)?.gap();
        note("weight achiever", gap, ACHIEVER_TOL, |r| &mut r.max_gap_weight_achiever);

        if qa > 0.0 {
            let pc = q.conditional(&a)?;
            let c = lpcb_event(pc.mass(&a)?, qa, renyi_discrete(&pc, &q, o)?, o)?;
            note("conditional model", c.gap(), ACHIEVER_TOL, |r| &mut r.max_gap_conditional);
        }
        if pa > 0.0 {
            let qc = p.conditional(&a)?;
            let c = lpcb_event_reversed(pa, qc.mass(&a)?, renyi_discrete(&qc, &p, o)?, o)?;
            note("conditional reference", c.gap(), ACHIEVER_TOL, |r| &mut r.max_gap_conditional);
        }
    }
    Ok(rep)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualityReport {
    pub seed: u64,
    pub cases: usize,
    pub competitors: usize,
    /// `|objective(P*) − value|` over cases.
    pub max_attainment_gap: f64,
    /// `max(objective(P) − value, 0)` over competitors.
    pub max_excess: f64,
    pub passed: bool,
}

/// The variational identity `ln E_Q[e^{αg}]/α = sup_P [...]`: the explicit
/// maximizer attains the value and random competitors never exceed it.
pub fn duality_check(cases: usize, competitors: usize, seed: u64) -> Result<DualityReport> {
    let mut r = rng(seed, 1);
    let (mut gap, mut excess) = (0.0f64, 0.0f64);
    for _ in 0..cases {
        let n = r.random_range(2..=8);
        let q = random_dist(&mut r, n, 0.1);
        let g: Vec<f64> = (0..n).map(|_| { let x: f64 = StandardNormal.sample(&mut r); 2.0 * x }).collect();
        let o = DivergenceOrder::new(random_order(&mut r, 1.01, 10.0))?;
        let value = duality_value(&g, &q, o)?;
        let pstar = duality_maximizer(&g, &q, o)?;
        gap = gap.max((duality_objective(&g, &pstar, &q, o)? - value).abs());
        for _ in 0..competitors {
            let p = random_dist(&mut r, n, 0.1);
            let v = duality_objective(&g, &p, &q, o)?;
            if v.is_finite() {
                excess = excess.max(v - value);
            }
        }
    }
    Ok(DualityReport {
        seed,
        cases,
        competitors,
        max_attainment_gap: gap,
        max_excess: excess,
        passed: gap <= ACHIEVER_TOL && excess <= HOLD_TOL,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityReport {
    pub seed: u64,
    pub pairs: usize,
    pub grid_points: usize,
    /// Largest drop of `α D_α(q‖p)` between consecutive grid orders.
    pub max_decrease: f64,
    pub passed: bool,
}

/// `α ↦ α D_α(q‖p)` is nondecreasing on `{1.01, 1.1, 1.2, …, 10}`.
pub fn monotonicity_check(pairs: usize, seed: u64) -> Result<MonotonicityReport> {
    let mut grid = vec![1.01];
    grid.extend((1..=90).map(|k| 1.0 + 0.1 * k as f64));
    let mut r = rng(seed, 2);
    let mut worst = 0.0f64;
    for _ in 0..pairs {
        let n = r.random_range(2..=8);
        let q = random_dist(&mut r, n, 0.0);
        let p = random_dist(&mut r, n, 0.0);
        let mut prev = f64::NEG_INFINITY;
        for &a in &grid {
            let v = a * renyi_discrete(&q, &p, DivergenceOrder::new(a)?)?;
            worst = worst.max(prev - v);
            prev = v;
        }
    }
    Ok(MonotonicityReport { seed, pairs, grid_points: grid.len(), max_decrease: worst, passed: worst <= HOLD_TOL })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_run_passes_and_is_deterministic() {
        let a = enumerate_lpcb(6, 200, 7).unwrap();
        assert!(a.passed, "{:?}", a.failures.first());
        assert_eq!(a, enumerate_lpcb(6, 200, 7).unwrap());
        assert!(enumerate_lpcb(11, 1, 0).is_err());
    }

    #[test]
    fn duality_and_monotonicity_pass() {
        assert!(duality_check(20, 20, 3).unwrap().passed);
        assert!(monotonicity_check(20, 3).unwrap().passed);
    }
}
