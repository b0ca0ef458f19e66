//! `bound`, `sweep` and `verify`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use lpcb::divergence::{kl_discrete, renyi_gaussian_scaled_shift, DiscreteDist, DivergenceOrder};
use lpcb::erasure::{bounded_fraction_bounds, erasure_bounds, log_delta_alpha, varadhan_sup, MarkovErasure};
use lpcb::exponent::{BoundResult, TwoSided};
use lpcb::fading::{
    ar_closed_form, ct_alpha_limit, ct_divergence_rate, ct_fading_bounds, dt_alpha_limit, dt_fading_bounds, dt_log_integral,
    ou_optimal_bounds, FadingScene, SpectralModel,
};
use lpcb::gaussian::{
    capacity_upper, interference_lower, interference_objective, interference_s1_closed_form, interference_upper,
    isi_zero_rate_band, zero_rate_optimum, ChannelScene, IsiScene, ReferenceExponent,
};
use lpcb::grid::{linspace, GridSpec, Scale};
use lpcb::numerics::optimize::golden_section_min;
use lpcb::source::{binary_rd_upper, gaussian_rd_band, guessing_lower, pair_sources_upper, phi, product_grid, simplex_grid, RdScene};
use lpcb::verify::{
    closed_form_oracle_suite, duality_check, enumerate_lpcb, mc_finite_n_lpcb, monotonicity_check, szego_check, DualityReport,
    LpcbReport, McConfig, McReport, McScene, MonotonicityReport, OracleReport, SzegoReport, ToeplitzScene,
};
use lpcb::AlphaGrid;

use crate::scene::{InterferenceParams, Model, SceneFile, Time};
use crate::CliError;

/// Command-line overrides of the scene's α grid.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct GridOverrides {
    pub min: Option<f64>,
    pub max: Option<f64>,
    pub points: Option<usize>,
    pub scale: Option<Scale>,
}

impl GridOverrides {
    /// The scene grid (or `default`) with each given field replaced.
    pub fn apply(&self, scene: Option<GridSpec>, default: GridSpec) -> GridSpec {
        let mut g = scene.unwrap_or(default);
        g.min = self.min.unwrap_or(g.min);
        g.max = self.max.unwrap_or(g.max);
        g.points = self.points.unwrap_or(g.points);
        g.scale = self.scale.unwrap_or(g.scale);
        g
    }
}

/// Grid used by `bound` when neither the scene nor the flags give one: the
/// library's point density carried out to `α = 10⁷`, so bounds whose
/// optimum sits at `α → ∞` come within `E/10⁷` of their limit.
pub const BOUND_GRID: GridSpec = GridSpec { min: 1.0 + 1e-4, max: 1e7, points: 630, scale: Scale::Geometric };

/// Grid used by `sweep` when neither the scene nor the flags give one.
pub const SWEEP_GRID: GridSpec = GridSpec { min: 1.001, max: 1e3, points: 400, scale: Scale::Geometric };

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub model: String,
    pub upper: Option<BoundResult>,
    pub lower: Option<BoundResult>,
    /// Closed-form companions and scene constants.
    pub extras: BTreeMap<String, f64>,
}

impl BoundReport {
    fn new(model: &Model) -> Self {
        Self { model: model.tag().name().to_string(), upper: None, lower: None, extras: BTreeMap::new() }
    }

    fn two_sided(mut self, b: TwoSided) -> Self {
        self.upper = Some(b.upper);
        self.lower = Some(b.lower);
        self
    }

    fn extra(mut self, name: &str, v: f64) -> Self {
        self.extras.insert(name.to_string(), v);
        self
    }

    /// Every reported bound is feasible.
    pub fn feasible(&self) -> bool {
        self.upper.iter().chain(&self.lower).all(|b| b.feasible)
    }
}

/// A bound known in closed form.
fn fixed(value: f64, alpha_star: f64) -> BoundResult {
    BoundResult {
        value,
        alpha_star,
        aux_params: BTreeMap::new(),
        feasible_interval: (1.0, f64::INFINITY),
        feasible: value.is_finite(),
        clamped: false,
        at_boundary: false,
    }
}

fn channel_scene(p: &InterferenceParams) -> Result<ChannelScene, CliError> {
    let c_q = p.c_q.unwrap_or(p.power / (2.0 * p.noise_var));
    Ok(ChannelScene::new(p.rate, p.power, p.noise_var, p.gamma, ReferenceExponent::VeryNoisy { c_q })?)
}

fn s_values(p: &InterferenceParams) -> Result<Vec<f64>, CliError> {
    match p.s_grid {
        Some(g) => Ok(g.values(0.0)?),
        None => Ok(linspace(0.02, 4.0, 200)),
    }
}

fn ou_feasibility(a: f64, b: f64, p: f64) -> Result<(), CliError> {
    if !(a > 2.0 * b * p.sqrt()) {
        return Err(CliError::Infeasible(format!(
            "OU fading needs a > 2b√p, got a = {a}, 2b√p = {}",
            2.0 * b * p.sqrt()
        )));
    }
    Ok(())
}

fn flat_model(sigma0: f64, bandwidth: f64) -> SpectralModel {
    SpectralModel::Flat { sigma0, bandwidth }
}

/// Optimized bounds for a scene.
pub fn cmd_bound(scene: &SceneFile, grid: &AlphaGrid) -> Result<BoundReport, CliError> {
    let m = &scene.model;
    let r = BoundReport::new(m);
    Ok(match m {
        Model::Interference(p) => {
            let cs = channel_scene(p)?;
            let e1 = cs.reference.eval(p.rate, 1.0);
            let upper = interference_upper(&cs, grid, &s_values(p)?);
            let s1 = interference_s1_closed_form(e1, p.gamma, p.noise_var)?;
            BoundReport {
                upper: Some(upper),
                lower: Some(fixed(interference_lower(e1, p.gamma, p.noise_var), f64::NAN)),
                ..r
            }
            .extra("reference_exponent", e1)
            .extra("s1_upper", s1.value)
            .extra("s1_alpha_star", s1.alpha_star)
            .extra("zero_rate_optimum", zero_rate_optimum(p.power, p.noise_var, p.gamma))
            .extra("capacity_upper", capacity_upper(p.power, p.gamma, p.noise_var))
        }
        Model::Isi(p) => {
            let band = isi_zero_rate_band(&IsiScene::new(p.power, p.noise_var, p.r1, p.r2)?);
            let lower = fixed(band.lower, band.alpha_star)
                .with_aux("tau", band.tau_star)
                .with_aux("theta", band.theta_star)
                .with_aux("phi2", band.phi2_star);
            BoundReport { upper: Some(fixed(band.upper, f64::NAN)), lower: Some(lower), ..r }
                .extra("vacuous", f64::from(u8::from(band.vacuous)))
        }
        Model::FadingAr(p) => {
            let fs = FadingScene::from_snr(p.p, p.e_q, SpectralModel::Ar { a: p.a, b: p.b })?;
            r.two_sided(dt_fading_bounds(&fs, grid)?).extra("alpha_limit", dt_alpha_limit(p.p, fs.spectral.sup()))
        }
        Model::FadingFlat(p) => {
            let fs = FadingScene::from_snr(p.p, p.e_q, flat_model(p.sigma0, p.bandwidth))?;
            let sup = fs.spectral.sup();
            match p.time {
                Time::Discrete => r.two_sided(dt_fading_bounds(&fs, grid)?).extra("alpha_limit", dt_alpha_limit(p.p, sup)),
                Time::Continuous => r.two_sided(ct_fading_bounds(&fs, grid)?).extra("alpha_limit", ct_alpha_limit(p.p, sup)),
            }
        }
        Model::FadingOu(p) => {
            ou_feasibility(p.a, p.b, p.p)?;
            let fs = FadingScene::from_snr(p.p, p.e_q, SpectralModel::Ou { a: p.a, b: p.b })?;
            let mut r = r.two_sided(ct_fading_bounds(&fs, grid)?).extra("alpha_limit", ct_alpha_limit(p.p, fs.spectral.sup()));
            if let Ok(o) = ou_optimal_bounds(p.a, p.b, p.p, p.e_q) {
                r = r
                    .extra("ou_e_upper", o.e_upper)
                    .extra("ou_alpha_star", o.alpha_star)
                    .extra("ou_e_lower", o.e_lower)
                    .extra("ou_alpha_hat", o.alpha_hat);
            }
            r
        }
        Model::ErasureHmm(p) => {
            let me = MarkovErasure::new(&p.transitions, p.labels.clone(), p.p)?;
            let mean = me.stationary_mean()?;
            r.two_sided(erasure_bounds(&me, p.e_q, grid)?).extra("stationary_mean", mean)
        }
        Model::ErasureFraction(p) => r.two_sided(bounded_fraction_bounds(p.z, p.p, p.e_q, grid)?),
        Model::RdGaussian(p) => {
            let band = gaussian_rd_band(&RdScene::new(p.rate, p.distortion, p.variance, p.amplitude)?);
            BoundReport { upper: Some(fixed(band.upper, f64::NAN)), lower: Some(fixed(band.lower, f64::NAN)), ..r }
                .extra("zero_exponent_regime", f64::from(u8::from(band.zero_exponent_regime)))
        }
        Model::RdBinary(p) => {
            let f = p.f;
            BoundReport { upper: Some(binary_rd_upper(|_, _| f, p.rate, p.distortion, p.p, p.amplitude, grid)?), ..r }
        }
        Model::RdPair(p) => {
            let pxy = DiscreteDist::new(p.pxy.clone())?;
            if p.nx == 0 || pxy.len() % p.nx != 0 {
                return Err(CliError::Input(format!("joint alphabet {} is not a multiple of nx = {}", pxy.len(), p.nx)));
            }
            let ny = pxy.len() / p.nx;
            let px = DiscreteDist::new((0..p.nx).map(|x| (0..ny).map(|y| pxy.probs()[x * ny + y]).sum()).collect())?;
            let py = DiscreteDist::new((0..ny).map(|y| (0..p.nx).map(|x| pxy.probs()[x * ny + y]).sum()).collect())?;
            let candidates = product_grid(&simplex_grid(p.nx, p.steps), &simplex_grid(ny, p.steps));
            let (fx, fy) = (p.fx, p.fy);
            let charge = |f: f64, q: &DiscreteDist, marg: &DiscreteDist| f + kl_discrete(q, marg).unwrap_or(f64::INFINITY);
            let upper = pair_sources_upper(&pxy, p.nx, |q| charge(fx, q, &px), |q| charge(fy, q, &py), &candidates, grid)?;
            BoundReport { upper: Some(upper), ..r }.extra("candidates", candidates.len() as f64)
        }
        Model::Guessing(p) => {
            let qs = linspace(0.0, 1.0, p.qhat_points.max(2));
            BoundReport { lower: Some(guessing_lower(p.rho, p.p, p.amplitude, p.distortion, &qs, grid)?), ..r }
        }
    })
}

/// One row of an α sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub alpha: f64,
    pub upper: f64,
    pub lower: f64,
    pub feasible: bool,
}

type Curve = Box<dyn Fn(f64) -> (f64, f64)>;

fn order(a: f64) -> Option<DivergenceOrder> {
    DivergenceOrder::new(a).ok()
}

/// `(upper(α), lower(α))` from a per-order penalty `v(α)` in the form
/// `(αE + v)/(α−1)` and `((α−1)E − v)/α`.
fn penalty_curve(e: f64, v: impl Fn(f64) -> Option<f64> + 'static) -> Curve {
    Box::new(move |a| match v(a) {
        Some(v) if v.is_finite() => ((a * e + v) / (a - 1.0), ((a - 1.0) * e - v) / a),
        _ => (f64::NAN, f64::NAN),
    })
}

fn curve(model: &Model) -> Result<Curve, CliError> {
    Ok(match model {
        Model::FadingAr(p) => {
            let fs = FadingScene::from_snr(p.p, p.e_q, SpectralModel::Ar { a: p.a, b: p.b })?;
            Box::new(move |a| match order(a).map(|o| ar_closed_form(&fs, o)) {
                Some(Ok(cf)) if cf.feasible => (cf.upper.unwrap_or(f64::NAN), cf.lower.unwrap_or(f64::NAN)),
                _ => (f64::NAN, f64::NAN),
            })
        }
        Model::FadingFlat(p) => {
            let fs = FadingScene::from_snr(p.p, p.e_q, flat_model(p.sigma0, p.bandwidth))?;
            let e = p.e_q;
            match p.time {
                // ℓ = −(1/2π)∫ln(1 − 2cΣ), entering as ℓ/2.
                Time::Discrete => penalty_curve(e, move |a| dt_log_integral(&fs.spectral, fs.c(a)).ok().map(|l| -l / 2.0)),
                Time::Continuous => penalty_curve(e, move |a| ct_divergence_rate(&fs.spectral, fs.c(a)).ok()),
            }
        }
        Model::FadingOu(p) => {
            ou_feasibility(p.a, p.b, p.p)?;
            let fs = FadingScene::from_snr(p.p, p.e_q, SpectralModel::Ou { a: p.a, b: p.b })?;
            penalty_curve(p.e_q, move |a| ct_divergence_rate(&fs.spectral, fs.c(a)).ok())
        }
        Model::ErasureHmm(p) => {
            let me = MarkovErasure::new(&p.transitions, p.labels.clone(), p.p)?;
            penalty_curve(p.e_q, move |a| order(a).and_then(|o| varadhan_sup(&me, o).ok()))
        }
        Model::ErasureFraction(p) => {
            if !(0.0..=1.0).contains(&p.z) {
                return Err(CliError::Input(format!("erasure fraction z = {} must lie in [0, 1]", p.z)));
            }
            let (z, pp) = (p.z, p.p);
            log_delta_alpha(pp, DivergenceOrder::new(2.0)?)?;
            penalty_curve(p.e_q, move |a| order(a).and_then(|o| log_delta_alpha(pp, o).ok()).map(|ld| z * ld))
        }
        Model::Interference(p) => {
            let cs = channel_scene(p)?;
            let s = s_values(p)?;
            let (s_lo, s_hi) = (s[0], s[s.len() - 1]);
            let e1 = cs.reference.eval(p.rate, 1.0);
            Box::new(move |a| {
                let obj = |x: f64| {
                    let e = cs.reference.eval(cs.rate, x);
                    if x > 1.0 - 1.0 / a {
                        interference_objective(e, a, x, cs.gamma, cs.noise_var)
                    } else {
                        f64::NAN
                    }
                };
                let up = golden_section_min(obj, s_lo.max(1.0 - 1.0 / a), s_hi, 1e-12).1;
                let lo = order(a)
                    .and_then(|o| renyi_gaussian_scaled_shift(cs.gamma, cs.noise_var, 1.0, o).ok())
                    .map_or(f64::NAN, |d| (a - 1.0) / a * e1 - (a - 1.0) * d);
                (up, lo)
            })
        }
        Model::RdGaussian(p) => {
            let sc = RdScene::new(p.rate, p.distortion, p.variance, p.amplitude)?;
            let u = sc.rate - lpcb::source::gaussian_rate_distortion(sc.distortion, sc.variance);
            let f = if u < 0.0 { 0.0 } else { phi(u) };
            let v = sc.amplitude * sc.amplitude / (2.0 * sc.variance);
            Box::new(move |a| (a / (a - 1.0) * f + a * v, (a - 1.0) / a * f - (a - 1.0) * v))
        }
        other => {
            return Err(CliError::Input(format!("model {} has no α-indexed bound curve to sweep", other.tag().name())));
        }
    })
}

/// Pointwise bounds on the α grid. Only `param = "alpha"` is sweepable.
pub fn cmd_sweep(scene: &SceneFile, param: &str, alphas: &[f64]) -> Result<Vec<SweepRow>, CliError> {
    if param != "alpha" {
        return Err(CliError::Input(format!("parameter {param:?} is not sweepable; only \"alpha\" is")));
    }
    let f = curve(&scene.model)?;
    Ok(alphas
        .iter()
        .map(|&alpha| {
            let (upper, lower) = f(alpha);
            let feasible = upper.is_finite() && lower.is_finite();
            SweepRow { alpha, upper, lower, feasible }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    /// Exhaustive comparison-inequality, duality and monotonicity checks.
    Lpcb,
    /// Finite-block Monte Carlo check on the Gaussian interference channel.
    Mc,
    /// Toeplitz log-determinants against their spectral limit.
    Szego,
    /// Every closed form against its independent numerical oracle.
    Oracles,
    All,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpcbSuite {
    pub enumeration: LpcbReport,
    pub duality: DualityReport,
    pub monotonicity: MonotonicityReport,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub suite: Suite,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lpcb: Option<LpcbSuite>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mc: Option<McReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub szego: Option<SzegoReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracles: Option<OracleReport>,
    pub passed: bool,
}

/// Enumeration, duality and monotonicity at their acceptance sizes.
pub fn lpcb_suite(seed: u64) -> Result<LpcbSuite, CliError> {
    let enumeration = enumerate_lpcb(8, 1000, seed)?;
    let duality = duality_check(200, 200, seed)?;
    let monotonicity = monotonicity_check(500, seed)?;
    let passed = enumeration.passed && duality.passed && monotonicity.passed;
    Ok(LpcbSuite { enumeration, duality, monotonicity, passed })
}

/// Two-codeword code, `n = 50`, `S = σ² = 1`, `γ = 0.1`, `α = 2`, 10⁶ trials
/// at 99% confidence.
pub fn mc_suite(seed: u64) -> Result<McReport, CliError> {
    let cfg = McConfig::new(50, 1_000_000, seed, 0.99)?;
    Ok(mc_finite_n_lpcb(&McScene::new(1.0, 1.0, 0.1)?, &cfg, DivergenceOrder::new(2.0)?)?)
}

/// AR(0.5) with `b = 0.25`, `c = 1`, so `2c sup Σ = 0.5`; 2% at `n = 1024`.
pub fn szego_suite() -> Result<SzegoReport, CliError> {
    let scene = ToeplitzScene::new(0.5, 0.25, 1.0, vec![64, 128, 256, 512, 1024])?;
    Ok(szego_check(&scene, 0.02)?)
}

pub fn cmd_verify(suite: Suite, seed: u64) -> Result<VerifyReport, CliError> {
    let want = |s: Suite| suite == s || suite == Suite::All;
    let lpcb = want(Suite::Lpcb).then(|| lpcb_suite(seed)).transpose()?;
    let mc = want(Suite::Mc).then(|| mc_suite(seed)).transpose()?;
    let szego = want(Suite::Szego).then(szego_suite).transpose()?;
    let oracles = want(Suite::Oracles).then(|| closed_form_oracle_suite(seed));
    let passed = lpcb.as_ref().is_none_or(|r| r.passed)
        && mc.as_ref().is_none_or(|r| r.passed)
        && szego.as_ref().is_none_or(|r| r.passed)
        && oracles.as_ref().is_none_or(|r| r.passed);
    Ok(VerifyReport { suite, seed, lpcb, mc, szego, oracles, passed })
}
