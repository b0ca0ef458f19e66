//! Scene files: a `model` tag, a model-specific `params` object and an
//! optional `alpha_grid`.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use lpcb::grid::GridSpec;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelTag {
    Interference,
    Isi,
    FadingAr,
    FadingFlat,
    FadingOu,
    ErasureHmm,
    ErasureFraction,
    RdGaussian,
    RdBinary,
    RdPair,
    Guessing,
}

impl ModelTag {
    pub fn name(self) -> &'static str {
        match self {
            Self::Interference => "interference",
            Self::Isi => "isi",
            Self::FadingAr => "fading-ar",
            Self::FadingFlat => "fading-flat",
            Self::FadingOu => "fading-ou",
            Self::ErasureHmm => "erasure-hmm",
            Self::ErasureFraction => "erasure-fraction",
            Self::RdGaussian => "rd-gaussian",
            Self::RdBinary => "rd-binary",
            Self::RdPair => "rd-pair",
            Self::Guessing => "guessing",
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScene {
    model: ModelTag,
    params: serde_json::Value,
    #[serde(default)]
    alpha_grid: Option<GridSpec>,
}

/// Gaussian channel with bounded additive interference. `c_q` defaults to
/// the very-noisy capacity `S/(2σ²)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InterferenceParams {
    pub rate: f64,
    pub power: f64,
    pub noise_var: f64,
    pub gamma: f64,
    #[serde(default)]
    pub c_q: Option<f64>,
    /// Noise-scaling grid `s`; defaults to 200 points on `[0.02, 4]`.
    #[serde(default)]
    pub s_grid: Option<GridSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IsiParams {
    pub power: f64,
    pub noise_var: f64,
    pub r1: f64,
    pub r2: f64,
}

/// `p = 𝔞²/(2σ²)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArParams {
    pub a: f64,
    pub b: f64,
    pub p: f64,
    pub e_q: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Time {
    Discrete,
    #[default]
    Continuous,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlatParams {
    pub sigma0: f64,
    pub bandwidth: f64,
    pub p: f64,
    pub e_q: f64,
    #[serde(default)]
    pub time: Time,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OuParams {
    pub a: f64,
    pub b: f64,
    pub p: f64,
    pub e_q: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HmmParams {
    pub transitions: Vec<Vec<f64>>,
    /// `f(s) = 1` marks the states in which erasures cannot occur.
    pub labels: Vec<u8>,
    pub p: f64,
    pub e_q: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FractionParams {
    pub z: f64,
    pub p: f64,
    pub e_q: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RdGaussianParams {
    pub rate: f64,
    pub distortion: f64,
    pub variance: f64,
    pub amplitude: f64,
}

/// `f` is the reference exponent `F(R, D)` at the scene's rate and
/// distortion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RdBinaryParams {
    pub rate: f64,
    pub distortion: f64,
    pub p: f64,
    pub amplitude: f64,
    pub f: f64,
}

/// Joint pmf `pxy` row-major over `|X| = nx` rows. Each candidate `Q_X`
/// is charged `fx + D(Q_X‖P_X)`, and likewise for `Y`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RdPairParams {
    pub pxy: Vec<f64>,
    pub nx: usize,
    pub fx: f64,
    pub fy: f64,
    /// Simplex divisions per coordinate for the candidate grid.
    #[serde(default = "default_steps")]
    pub steps: usize,
}

fn default_steps() -> usize {
    10
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GuessingParams {
    pub rho: f64,
    pub p: f64,
    pub amplitude: f64,
    pub distortion: f64,
    #[serde(default = "default_qhat_points")]
    pub qhat_points: usize,
}

fn default_qhat_points() -> usize {
    201
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "model", content = "params", rename_all = "kebab-case")]
pub enum Model {
    Interference(InterferenceParams),
    Isi(IsiParams),
    FadingAr(ArParams),
    FadingFlat(FlatParams),
    FadingOu(OuParams),
    ErasureHmm(HmmParams),
    ErasureFraction(FractionParams),
    RdGaussian(RdGaussianParams),
    RdBinary(RdBinaryParams),
    RdPair(RdPairParams),
    Guessing(GuessingParams),
}

impl Model {
    pub fn tag(&self) -> ModelTag {
        match self {
            Self::Interference(_) => ModelTag::Interference,
            Self::Isi(_) => ModelTag::Isi,
            Self::FadingAr(_) => ModelTag::FadingAr,
            Self::FadingFlat(_) => ModelTag::FadingFlat,
            Self::FadingOu(_) => ModelTag::FadingOu,
            Self::ErasureHmm(_) => ModelTag::ErasureHmm,
            Self::ErasureFraction(_) => ModelTag::ErasureFraction,
            Self::RdGaussian(_) => ModelTag::RdGaussian,
            Self::RdBinary(_) => ModelTag::RdBinary,
            Self::RdPair(_) => ModelTag::RdPair,
            Self::Guessing(_) => ModelTag::Guessing,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SceneFile {
    #[serde(flatten)]
    pub model: Model,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha_grid: Option<GridSpec>,
}

fn params<T: DeserializeOwned>(v: serde_json::Value) -> Result<T, CliError> {
    serde_path_to_error::deserialize(v).map_err(|e| {
        let path = e.path().to_string();
        let at = if path == "." { "params".to_string() } else { format!("params.{path}") };
        CliError::Schema { path: at, message: e.into_inner().to_string() }
    })
}

impl SceneFile {
    /// Parses and validates a scene document; errors name the offending
    /// field.
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let raw: RawScene = serde_path_to_error::deserialize(de)
            .map_err(|e| CliError::Schema { path: e.path().to_string(), message: e.into_inner().to_string() })?;
        let model = match raw.model {
            ModelTag::Interference => Model::Interference(params(raw.params)?),
            ModelTag::Isi => Model::Isi(params(raw.params)?),
            ModelTag::FadingAr => Model::FadingAr(params(raw.params)?),
            ModelTag::FadingFlat => Model::FadingFlat(params(raw.params)?),
            ModelTag::FadingOu => Model::FadingOu(params(raw.params)?),
            ModelTag::ErasureHmm => Model::ErasureHmm(params(raw.params)?),
            ModelTag::ErasureFraction => Model::ErasureFraction(params(raw.params)?),
            ModelTag::RdGaussian => Model::RdGaussian(params(raw.params)?),
            ModelTag::RdBinary => Model::RdBinary(params(raw.params)?),
            ModelTag::RdPair => Model::RdPair(params(raw.params)?),
            ModelTag::Guessing => Model::Guessing(params(raw.params)?),
        };
        Ok(Self { model, alpha_grid: raw.alpha_grid })
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scene serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_ar_scene() {
        let s = SceneFile::from_json(r#"{"model":"fading-ar","params":{"a":0.2,"b":0.02,"p":0.1,"e_q":1}}"#).unwrap();
        assert_eq!(s.model, Model::FadingAr(ArParams { a: 0.2, b: 0.02, p: 0.1, e_q: 1.0 }));
        assert!(s.alpha_grid.is_none());
    }

    #[test]
    fn unknown_param_is_located() {
        let e = SceneFile::from_json(r#"{"model":"fading-ou","params":{"a":1,"b":0.1,"p":0.1,"e_q":1,"bogus":2}}"#).unwrap_err();
        match e {
            CliError::Schema { path, message } => {
                assert!(path.starts_with("params"), "{path}");
                assert!(message.contains("bogus"), "{message}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn wrong_type_points_at_field() {
        let e = SceneFile::from_json(r#"{"model":"erasure-fraction","params":{"z":"x","p":0.1,"e_q":1}}"#).unwrap_err();
        assert!(matches!(e, CliError::Schema { ref path, .. } if path == "params.z"), "{e:?}");
    }

    #[test]
    fn unknown_top_level_key_and_model_rejected() {
        assert!(SceneFile::from_json(r#"{"model":"isi","params":{},"extra":1}"#).is_err());
        let e = SceneFile::from_json(r#"{"model":"nope","params":{}}"#).unwrap_err();
        assert!(matches!(e, CliError::Schema { ref path, .. } if path == "model"), "{e:?}");
    }

    #[test]
    fn round_trips() {
        let text = r#"{"model":"erasure-fraction","params":{"z":0.1,"p":0.05,"e_q":1.5},"alpha_grid":{"min":1.01,"max":50,"points":30,"scale":"linear"}}"#;
        let s = SceneFile::from_json(text).unwrap();
        assert_eq!(SceneFile::from_json(&s.to_json()).unwrap(), s);
    }
}
