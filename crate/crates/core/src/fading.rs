//! Fading channels `y_t = (𝔞 + θ_t) x_t + z_t` with Gaussian fading `θ` of
//! spectral density `Σ_θ`, compared against the non-fading reference.
//!
//! With `p = 𝔞²/(2σ²)` and `c(α) = α(α−1)p`, the discrete-time divergence
//! rate is governed by `L = (1/2π) ∫₀^{2π} ln[1 − 2cΣ_θ(ω)] dω` and the
//! continuous-time one by `r = −(1/4π) ∫ ln[1 − 4πcΣ_θ(ω)] dω`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{infeasible, invalid, Error, Result};
use crate::exponent::{nan_unless_finite, scan_alpha, BoundResult, TwoSided};
use crate::grid::AlphaGrid;
use crate::numerics::optimize::Goal;
use crate::numerics::quadrature::{default_rule, integrate_checked, DEFAULT_PANELS};
use crate::DivergenceOrder;

/// Spectral density of the fading process.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum SpectralModel {
    /// First-order autoregression `θ_t = aθ_{t−1} + bW_t` (discrete time).
    Ar { a: f64, b: f64 },
    /// `Σ₀` on `|ω| ≤ B`, zero elsewhere.
    Flat { sigma0: f64, bandwidth: f64 },
    /// Ornstein–Uhlenbeck process `dθ = −aθ dt + b dW` (continuous time).
    Ou { a: f64, b: f64 },
    /// Samples of `Σ` at ascending frequencies, linearly interpolated and
    /// zero outside the sampled range.
    Tabulated { omega: Vec<f64>, sigma: Vec<f64> },
}

impl SpectralModel {
    pub fn validate(&self) -> Result<()> {
        let pos = |x: f64, n: &str| {
            if x > 0.0 && x.is_finite() {
                Ok(())
            } else {
                Err(invalid(format!("{n} = {x} must be finite and positive")))
            }
        };
        match *self {
            Self::Ar { a, b } => {
                if !(a.abs() < 1.0) {
                    return Err(invalid(format!("AR coefficient |a| = {} must be below 1", a.abs())));
                }
                if !(b >= 0.0 && b.is_finite()) {
                    return Err(invalid(format!("AR gain b = {b} must be finite and nonnegative")));
                }
                Ok(())
            }
            Self::Flat { sigma0, bandwidth } => {
                pos(sigma0, "sigma0")?;
                pos(bandwidth, "bandwidth")
            }
            Self::Ou { a, b } => {
                pos(a, "OU rate a")?;
                if !(b >= 0.0 && b.is_finite()) {
                    return Err(invalid(format!("OU gain b = {b} must be finite and nonnegative")));
                }
                Ok(())
            }
            Self::Tabulated { ref omega, ref sigma } => {
                if omega.len() != sigma.len() {
                    return Err(Error::DimensionMismatch { left: omega.len(), right: sigma.len() });
                }
                if omega.len() < 2 {
                    return Err(invalid("tabulated spectrum needs at least two samples"));
                }
                if omega.windows(2).any(|w| !(w[1] > w[0])) || omega.iter().any(|w| !w.is_finite()) {
                    return Err(invalid("tabulated frequencies must be finite and strictly increasing"));
                }
                if sigma.iter().any(|s| !(s.is_finite() && *s >= 0.0)) {
                    return Err(invalid("tabulated spectrum must be finite and nonnegative"));
                }
                Ok(())
            }
        }
    }

    pub fn density(&self, omega: f64) -> f64 {
        match self {
            Self::Ar { a, b } => b * b / (1.0 - 2.0 * a * omega.cos() + a * a),
            Self::Flat { sigma0, bandwidth } => {
                if omega.abs() <= *bandwidth {
                    *sigma0
                } else {
                    0.0
                }
            }
            Self::Ou { a, b } => b * b / (PI * (a * a + omega * omega)),
            Self::Tabulated { omega: w, sigma } => interpolate(w, sigma, omega),
        }
    }

    pub fn sup(&self) -> f64 {
        match self {
            Self::Ar { a, b } => b * b / (1.0 - a.abs()).powi(2),
            Self::Flat { sigma0, .. } => *sigma0,
            Self::Ou { a, b } => b * b / (PI * a * a),
            Self::Tabulated { sigma, .. } => sigma.iter().copied().fold(0.0, f64::max),
        }
    }

    /// Variance `r₀ = (1/2π) ∫₀^{2π} Σ dω` of a discrete-time process.
    pub fn dt_variance(&self) -> Result<f64> {
        match self {
            Self::Ar { a, b } => Ok(b * b / (1.0 - a * a)),
            Self::Flat { sigma0, bandwidth } => Ok(sigma0 * bandwidth.min(PI) / PI),
            Self::Ou { .. } => Err(invalid("the OU model is continuous-time")),
            Self::Tabulated { omega, sigma } => Ok(segments_integral(omega, sigma, 0.0, 2.0 * PI, |s| s) / (2.0 * PI)),
        }
    }
}

fn interpolate(w: &[f64], s: &[f64], x: f64) -> f64 {
    if x < w[0] || x > w[w.len() - 1] {
        return 0.0;
    }
    let i = w.partition_point(|&v| v <= x).clamp(1, w.len() - 1);
    let t = (x - w[i - 1]) / (w[i] - w[i - 1]);
    s[i - 1] + t * (s[i] - s[i - 1])
}

/// `∫_lo^hi g(Σ(ω)) dω` for a tabulated `Σ`, one Gauss–Legendre panel set per
/// sample interval so kinks fall on panel edges. Outside the table `Σ = 0`
/// contributes `g(0)` per unit length.
fn segments_integral(w: &[f64], s: &[f64], lo: f64, hi: f64, g: impl Fn(f64) -> f64) -> f64 {
    let rule = default_rule();
    let mut edges = vec![lo];
    edges.extend(w.iter().copied().filter(|&x| x > lo && x < hi));
    edges.push(hi);
    edges
        .windows(2)
        .map(|e| rule.composite(|x| g(interpolate(w, s, x)), e[0], e[1], 4))
        .sum()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FadingScene {
    pub amplitude: f64,
    pub noise_var: f64,
    /// Reference exponent `E(Q)`.
    pub e_q: f64,
    pub spectral: SpectralModel,
}

impl FadingScene {
    pub fn new(amplitude: f64, noise_var: f64, e_q: f64, spectral: SpectralModel) -> Result<Self> {
        if !(amplitude > 0.0 && amplitude.is_finite()) {
            return Err(invalid(format!("amplitude {amplitude} must be finite and positive")));
        }
        if !(noise_var > 0.0 && noise_var.is_finite()) {
            return Err(invalid(format!("noise variance {noise_var} must be finite and positive")));
        }
        if !(e_q >= 0.0 && e_q.is_finite()) {
            return Err(invalid(format!("reference exponent {e_q} must be finite and nonnegative")));
        }
        spectral.validate()?;
        Ok(Self { amplitude, noise_var, e_q, spectral })
    }

    /// Scene with unit noise variance and the given `p = 𝔞²/(2σ²)`.
    pub fn from_snr(p: f64, e_q: f64, spectral: SpectralModel) -> Result<Self> {
        Self::new((2.0 * p).sqrt(), 1.0, e_q, spectral)
    }

    /// `p = 𝔞²/(2σ²)`.
    pub fn p(&self) -> f64 {
        self.amplitude * self.amplitude / (2.0 * self.noise_var)
    }

    /// `c(α) = α(α−1)p`.
    pub fn c(&self, alpha: f64) -> f64 {
        alpha * (alpha - 1.0) * self.p()
    }
}

/// Largest `α` with `α(α−1) < k`, i.e. `(1 + √(1 + 4k))/2`.
fn alpha_root(k: f64) -> f64 {
    if k.is_infinite() {
        f64::INFINITY
    } else {
        0.5 * (1.0 + (1.0 + 4.0 * k).sqrt())
    }
}

/// Smallest `α` violating `2c(α) sup Σ < 1`.
pub fn dt_alpha_limit(p: f64, sup: f64) -> f64 {
    alpha_root(1.0 / (2.0 * p * sup))
}

/// Smallest `α` violating `4πc(α) sup Σ < 1`.
pub fn ct_alpha_limit(p: f64, sup: f64) -> f64 {
    alpha_root(1.0 / (4.0 * PI * p * sup))
}

/// `(1/2π) ∫₀^{2π} ln[1 − 2cΣ(ω)] dω` by quadrature (closed form for a flat
/// band). Errors when `2c sup Σ ≥ 1`.
pub fn dt_log_integral(model: &SpectralModel, c: f64) -> Result<f64> {
    if !(2.0 * c * model.sup() < 1.0) {
        return Err(infeasible(format!("2c·sup Σ = {} is not below 1", 2.0 * c * model.sup())));
    }
    match model {
        SpectralModel::Ar { .. } => {
            let est = integrate_checked(|w| (-2.0 * c * model.density(w)).ln_1p(), 0.0, 2.0 * PI, DEFAULT_PANELS);
            Ok(est.value / (2.0 * PI))
        }
        SpectralModel::Flat { sigma0, bandwidth } => Ok(bandwidth.min(PI) / PI * (-2.0 * c * sigma0).ln_1p()),
        SpectralModel::Ou { .. } => Err(invalid("the OU model is continuous-time")),
        SpectralModel::Tabulated { omega, sigma } => {
            Ok(segments_integral(omega, sigma, 0.0, 2.0 * PI, |s| (-2.0 * c * s).ln_1p()) / (2.0 * PI))
        }
    }
}

/// Upper and lower bounds on the exponent of a discrete-time fading
/// channel, optimized over the orders with `2c(α) sup Σ < 1`.
pub fn dt_fading_bounds(scene: &FadingScene, grid: &AlphaGrid) -> Result<TwoSided> {
    scene.spectral.validate()?;
    if let SpectralModel::Ou { .. } = scene.spectral {
        return Err(invalid("the OU model is continuous-time"));
    }
    let interval = (1.0, dt_alpha_limit(scene.p(), scene.spectral.sup()));
    let l = |a: f64| dt_log_integral(&scene.spectral, scene.c(a)).unwrap_or(f64::NAN);
    let e = scene.e_q;
    let upper = scan_alpha(grid, Goal::Minimize, interval, |a| nan_unless_finite(a / (a - 1.0) * e - l(a) / (2.0 * (a - 1.0))));
    let lower = scan_alpha(grid, Goal::Maximize, interval, |a| nan_unless_finite((a - 1.0) / a * e + l(a) / (2.0 * a))).clamp_nonnegative();
    Ok(TwoSided { lower, upper })
}

/// `ℓ = −(1/2π) ∫₀^{2π} ln[1 − 2cΣ(ω)] dω` for AR fading, in closed form:
/// `ℓ = ln[(ξ − √(ξ² − 4a²))/(2a²)] = ln 2 − ln(ξ + √(ξ² − 4a²))` with
/// `ξ = 1 − 2cb² + a²`. The second form is used; it is exact at `a = 0`.
pub fn ar_log_term(a: f64, b: f64, c: f64) -> Result<f64> {
    let xi = 1.0 - 2.0 * c * b * b + a * a;
    if !((1.0 - a.abs()).powi(2) > 2.0 * c * b * b) {
        return Err(infeasible(format!("(1−|a|)² = {} does not exceed 2cb² = {}", (1.0 - a.abs()).powi(2), 2.0 * c * b * b)));
    }
    let root = xi + (xi * xi - 4.0 * a * a).sqrt();
    let r2 = 2.0 * a / root;
    if !(r2.abs() < 1.0) {
        return Err(Error::Numerical(format!("AR root r2 = {r2} left the unit disc")));
    }
    Ok(2f64.ln() - root.ln())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArClosedForm {
    pub xi: f64,
    pub feasible: bool,
    pub upper: Option<f64>,
    pub lower: Option<f64>,
    /// The logarithmic term `ℓ`.
    pub log_term: Option<f64>,
}

/// AR-fading bounds at a single order.
pub fn ar_closed_form(scene: &FadingScene, order: DivergenceOrder) -> Result<ArClosedForm> {
    let SpectralModel::Ar { a, b } = scene.spectral else {
        return Err(invalid("closed form needs an AR spectral model"));
    };
    let alpha = order.value();
    let c = scene.c(alpha);
    let xi = 1.0 - 2.0 * c * b * b + a * a;
    match ar_log_term(a, b, c) {
        Ok(l) => Ok(ArClosedForm {
            xi,
            feasible: true,
            upper: Some(alpha / (alpha - 1.0) * scene.e_q + l / (2.0 * (alpha - 1.0))),
            lower: Some((alpha - 1.0) / alpha * scene.e_q - l / (2.0 * alpha)),
            log_term: Some(l),
        }),
        Err(Error::Infeasible(_)) => Ok(ArClosedForm { xi, feasible: false, upper: None, lower: None, log_term: None }),
        Err(e) => Err(e),
    }
}

/// Upper bound for weak fading, valid on orders with `2c(α) sup Σ ≤ δ`:
/// `α/(α−1)E(Q) + αp r₀ + κδ²/(2(α−1))` with `κ = 1/(2(1−δ)²)`.
pub fn small_fading_upper(scene: &FadingScene, delta: f64, grid: &AlphaGrid) -> Result<BoundResult> {
    scene.spectral.validate()?;
    if !(delta > 0.0 && delta < 1.0) {
        return Err(invalid(format!("delta = {delta} must lie in (0, 1)")));
    }
    let r0 = scene.spectral.dt_variance()?;
    let sup = scene.spectral.sup();
    let p = scene.p();
    let kappa = 1.0 / (2.0 * (1.0 - delta).powi(2));
    let a_max = alpha_root(delta / (2.0 * p * sup));
    let e = scene.e_q;
    Ok(scan_alpha(grid, Goal::Minimize, (1.0, a_max), |a| {
        if 2.0 * scene.c(a) * sup > delta {
            return f64::NAN;
        }
        a / (a - 1.0) * e + a * p * r0 + kappa * delta * delta / (2.0 * (a - 1.0))
    })
    .with_aux("kappa", kappa))
}

/// `½a − ½√(a² − 4b²c)`.
pub fn ou_divergence_rate(a: f64, b: f64, c: f64) -> Result<f64> {
    let disc = a * a - 4.0 * b * b * c;
    if !(disc > 0.0) {
        return Err(infeasible(format!("a² − 4b²c = {disc} is not positive")));
    }
    Ok(0.5 * a - 0.5 * disc.sqrt())
}

/// `−(2B/4π) ln[1 − 4πcΣ₀]`.
pub fn flat_divergence_rate(sigma0: f64, bandwidth: f64, c: f64) -> Result<f64> {
    let x = 4.0 * PI * c * sigma0;
    if !(x < 1.0) {
        return Err(infeasible(format!("4πcΣ₀ = {x} is not below 1")));
    }
    Ok(-(2.0 * bandwidth) / (4.0 * PI) * (-x).ln_1p())
}

/// `∫_{−∞}^{∞} ln[1 − k/(a² + ω²)] dω` with `k = 4cb² < a²`: graded panels
/// on `[0, W]`, `W = 10³·max(a, 1)`, plus a two-term analytic tail.
fn ou_log_integral(a: f64, k: f64) -> f64 {
    let rule = default_rule();
    let w_max = 1e3 * a.max(1.0);
    let f = |w: f64| (-k / (a * a + w * w)).ln_1p();
    let scale = (a * a - k).sqrt().min(a);
    let mut edges = vec![0.0];
    let mut x = scale / 8.0;
    while x < w_max {
        edges.push(x);
        x *= 2.0;
    }
    edges.push(w_max);
    let body: f64 = edges.windows(2).map(|e| rule.composite(f, e[0], e[1], 8)).sum();
    let tail = -k / a * (PI / 2.0 - (w_max / a).atan()) - k * k / (6.0 * w_max.powi(3));
    2.0 * (body + tail)
}

/// `r = −(1/4π) ∫ ln[1 − 4πcΣ(ω)] dω` over the whole line, by quadrature
/// for OU and tabulated spectra and exactly for a flat band.
pub fn ct_divergence_rate(model: &SpectralModel, c: f64) -> Result<f64> {
    if !(4.0 * PI * c * model.sup() < 1.0) {
        return Err(infeasible(format!("4πc·sup Σ = {} is not below 1", 4.0 * PI * c * model.sup())));
    }
    match model {
        SpectralModel::Ou { a, b } => Ok(-ou_log_integral(*a, 4.0 * c * b * b) / (4.0 * PI)),
        SpectralModel::Flat { sigma0, bandwidth } => flat_divergence_rate(*sigma0, *bandwidth, c),
        SpectralModel::Tabulated { omega, sigma } => {
            let hi = omega[omega.len() - 1].abs().max(omega[0].abs());
            let sym = |w: f64| interpolate(omega, sigma, w.abs());
            // Σ is read at |ω|, so integrate [0, hi] with table kinks as edges and double.
            let rule = default_rule();
            let mut edges = vec![0.0];
            edges.extend(omega.iter().copied().filter(|&x| x > 0.0 && x < hi));
            edges.push(hi);
            let half: f64 = edges
                .windows(2)
                .map(|e| rule.composite(|w| (-4.0 * PI * c * sym(w)).ln_1p(), e[0], e[1], 4))
                .sum();
            Ok(-2.0 * half / (4.0 * PI))
        }
        SpectralModel::Ar { .. } => Err(invalid("the AR model is discrete-time")),
    }
}

/// Upper and lower bounds on the exponent of a continuous-time fading
/// channel. Requires `p < 1/(4π sup Σ)`.
pub fn ct_fading_bounds(scene: &FadingScene, grid: &AlphaGrid) -> Result<TwoSided> {
    scene.spectral.validate()?;
    if let SpectralModel::Ar { .. } = scene.spectral {
        return Err(invalid("the AR model is discrete-time"));
    }
    let (p, sup) = (scene.p(), scene.spectral.sup());
    if !(4.0 * PI * p * sup < 1.0) {
        return Err(infeasible(format!("p = {p} must be below 1/(4π sup Σ) = {}", 1.0 / (4.0 * PI * sup))));
    }
    let interval = (1.0, ct_alpha_limit(p, sup));
    let r = |a: f64| ct_divergence_rate(&scene.spectral, scene.c(a)).unwrap_or(f64::NAN);
    let e = scene.e_q;
    let upper = scan_alpha(grid, Goal::Minimize, interval, |a| nan_unless_finite(a / (a - 1.0) * e + r(a) / (a - 1.0)));
    let lower = scan_alpha(grid, Goal::Maximize, interval, |a| nan_unless_finite((a - 1.0) / a * e - r(a) / a)).clamp_nonnegative();
    Ok(TwoSided { lower, upper })
}

/// Optimized OU bounds using `c(α) ≤ pα²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OuOptimal {
    pub e_upper: f64,
    pub alpha_star: f64,
    pub e_lower: f64,
    pub alpha_hat: f64,
}

fn ou_rate_bar(a: f64, gamma2: f64, alpha: f64) -> f64 {
    let d = a * a - gamma2 * gamma2 * alpha * alpha;
    if d < 0.0 {
        f64::NAN
    } else {
        0.5 * a - 0.5 * d.sqrt()
    }
}

/// `E_U(α) = α/(α−1)E(Q) + r̄(α)/(α−1)` with `r̄(α) = ½a − ½√(a² − 4b²pα²)`.
pub fn ou_upper_objective(a: f64, b: f64, p: f64, e_q: f64, alpha: f64) -> f64 {
    let g2 = 2.0 * b * p.sqrt();
    alpha / (alpha - 1.0) * e_q + ou_rate_bar(a, g2, alpha) / (alpha - 1.0)
}

/// `E_L(α) = (α−1)/α E(Q) − r̄(α)/α`.
pub fn ou_lower_objective(a: f64, b: f64, p: f64, e_q: f64, alpha: f64) -> f64 {
    let g2 = 2.0 * b * p.sqrt();
    (alpha - 1.0) / alpha * e_q - ou_rate_bar(a, g2, alpha) / alpha
}

/// Closed-form optimizers with `γ₁ = a + 2E(Q)` and `γ₂ = 2b√p`; requires
/// `a > γ₂`.
pub fn ou_optimal_bounds(a: f64, b: f64, p: f64, e_q: f64) -> Result<OuOptimal> {
    if !(a > 0.0 && b > 0.0 && p > 0.0 && e_q >= 0.0) {
        return Err(invalid(format!("need a, b, p > 0 and E(Q) ≥ 0, got a={a}, b={b}, p={p}, E={e_q}")));
    }
    let g1 = a + 2.0 * e_q;
    let g2 = 2.0 * b * p.sqrt();
    if !(a > g2) {
        return Err(infeasible(format!("need a > 2b√p, got a = {a}, 2b√p = {g2}")));
    }
    let s = g1 * g1 + g2 * g2;
    let alpha_star = (a * a * g2 + a * g1 * (s - a * a).sqrt()) / (g2 * s);
    if !(alpha_star > 1.0 && alpha_star < a / g2) {
        return Err(infeasible(format!("optimal order {alpha_star} falls outside (1, a/(2b√p)) = (1, {})", a / g2)));
    }
    let e_upper = (2.0 * alpha_star * e_q + a - (a * a - g2 * g2 * alpha_star * alpha_star).sqrt()) / (2.0 * (alpha_star - 1.0));
    let alpha_hat = ((a / g2).powi(2) - (a * a / (g1 * g2)).powi(2)).sqrt();
    let e_lower = if alpha_hat > 1.0 {
        ((2.0 * g1 * (alpha_hat - 1.0) * e_q - a * g1 + a * a) / (2.0 * g1 * alpha_hat)).max(0.0)
    } else {
        0.0
    };
    Ok(OuOptimal { e_upper, alpha_star, e_lower, alpha_hat })
}
