//! Scenario documents.
//!
//! ```json
//! {
//!   "suite": "confined",
//!   "source": { "generator": { "seed": 7, "trials": 1000, "max_dim": 16 } },
//!   "output": "out/confined"
//! }
//! ```

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::amenable::StencilDoc;
use crate::error::{Error, Result};
use crate::model::io::MatrixDoc;
use crate::monotone::StepDoc;

pub const SUITES: [&str; 12] = [
    "confined",
    "sharpness",
    "lieb_thirring",
    "entropy",
    "log_sobolev",
    "heat",
    "balance",
    "continuum",
    "fourier",
    "bathtub",
    "folner",
    "curves",
];

fn default_max_dim() -> usize {
    16
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorDoc {
    pub seed: Option<u64>,
    pub trials: Option<u64>,
    #[serde(default = "default_max_dim")]
    pub max_dim: usize,
    #[serde(default)]
    pub positive: bool,
    #[serde(default)]
    pub scalar: bool,
}

/// A single explicit model. Regions and partitions list point indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InlineModel {
    pub operator: MatrixDoc,
    pub state: Option<MatrixDoc>,
    pub region: Option<Vec<usize>>,
    pub partition: Option<Vec<Vec<usize>>>,
    pub fine: Option<Vec<Vec<usize>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Source {
    Generator(GeneratorDoc),
    Inline(Box<InlineModel>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiniteSuite {
    pub source: Source,
    pub output: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SharpnessParams {
    /// Levels to test; when absent each instance draws one inside its
    /// spectral range.
    pub lambdas: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SharpnessSuite {
    pub source: Source,
    pub params: SharpnessParams,
    pub output: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LiebThirringParams {
    pub ts: Vec<f64>,
    /// Random step functions for the `ψ`/`φ` sandwich, drawn per trial.
    #[serde(default)]
    pub steps_per_trial: usize,
    #[serde(default = "default_jumps")]
    pub max_jumps: usize,
    #[serde(default)]
    pub sample_points: Vec<f64>,
}

fn default_jumps() -> usize {
    20
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LiebThirringSuite {
    pub source: Source,
    pub params: LiebThirringParams,
    pub output: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LogSobolevParams {
    pub ts: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LogSobolevSuite {
    pub source: Source,
    pub params: LogSobolevParams,
    pub output: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BalanceParams {
    pub shifts: Vec<f64>,
    /// `[scale, shift]` pairs, used for the scale-balanced inequalities.
    #[serde(default)]
    pub affine: Vec<[f64; 2]>,
    /// Improvement factors for the no-uniform-improvement witness.
    #[serde(default)]
    pub eps: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BalanceSuite {
    pub source: Source,
    pub params: BalanceParams,
    pub output: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContinuumParams {
    /// Box side lengths for the Dirichlet sums.
    pub boxes: Vec<Vec<f64>>,
    pub max_count: usize,
    /// `(n, λ)` pairs for the density ratio.
    #[serde(default)]
    pub density_levels: Vec<(usize, f64)>,
    /// Dimensions for which `φ` and `ψ` curves are exported.
    #[serde(default)]
    pub curve_dims: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContinuumSuite {
    pub params: ContinuumParams,
    pub output: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FourierParams {
    /// Oscillator times.
    pub ts: Vec<f64>,
    pub samples: usize,
    pub half_width: f64,
    /// Allowed distance between sampled and closed-form entropies.
    pub sampling_tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FourierSuite {
    pub params: FourierParams,
    pub output: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BathtubParams {
    pub cells: usize,
    /// Random symbols compared against the filling, per trial.
    pub symbols_per_trial: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BathtubSuite {
    pub source: Source,
    pub params: BathtubParams,
    pub output: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FolnerParams {
    pub stencil: StencilDoc,
    pub lambda: f64,
    pub sizes: Vec<usize>,
    pub panels: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FolnerSuite {
    pub params: FolnerParams,
    pub output: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurvesParams {
    pub step: StepDoc,
    /// Abscissae for `F` and its log hull.
    pub energy_range: [f64; 2],
    /// Abscissae for `φ`, `ψ` and the sandwich checks.
    pub mass_range: [f64; 2],
    pub samples: usize,
    /// Extra `t` values for `φ_t` curves.
    #[serde(default)]
    pub ts: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurvesSuite {
    pub params: CurvesParams,
    pub output: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "suite", rename_all = "snake_case")]
pub enum Scenario {
    Confined(FiniteSuite),
    Sharpness(SharpnessSuite),
    LiebThirring(LiebThirringSuite),
    Entropy(FiniteSuite),
    LogSobolev(LogSobolevSuite),
    Heat(FiniteSuite),
    Balance(BalanceSuite),
    Continuum(ContinuumSuite),
    Fourier(FourierSuite),
    Bathtub(BathtubSuite),
    Folner(FolnerSuite),
    Curves(CurvesSuite),
}

impl Scenario {
    pub fn suite(&self) -> &'static str {
        match self {
            Scenario::Confined(_) => "confined",
            Scenario::Sharpness(_) => "sharpness",
            Scenario::LiebThirring(_) => "lieb_thirring",
            Scenario::Entropy(_) => "entropy",
            Scenario::LogSobolev(_) => "log_sobolev",
            Scenario::Heat(_) => "heat",
            Scenario::Balance(_) => "balance",
            Scenario::Continuum(_) => "continuum",
            Scenario::Fourier(_) => "fourier",
            Scenario::Bathtub(_) => "bathtub",
            Scenario::Folner(_) => "folner",
            Scenario::Curves(_) => "curves",
        }
    }

    pub fn output(&self) -> Option<&str> {
        match self {
            Scenario::Confined(s) | Scenario::Entropy(s) | Scenario::Heat(s) => s.output.as_deref(),
            Scenario::Sharpness(s) => s.output.as_deref(),
            Scenario::LiebThirring(s) => s.output.as_deref(),
            Scenario::LogSobolev(s) => s.output.as_deref(),
            Scenario::Balance(s) => s.output.as_deref(),
            Scenario::Continuum(s) => s.output.as_deref(),
            Scenario::Fourier(s) => s.output.as_deref(),
            Scenario::Bathtub(s) => s.output.as_deref(),
            Scenario::Folner(s) => s.output.as_deref(),
            Scenario::Curves(s) => s.output.as_deref(),
        }
    }

    pub fn source(&self) -> Option<&Source> {
        match self {
            Scenario::Confined(s) | Scenario::Entropy(s) | Scenario::Heat(s) => Some(&s.source),
            Scenario::Sharpness(s) => Some(&s.source),
            Scenario::LiebThirring(s) => Some(&s.source),
            Scenario::LogSobolev(s) => Some(&s.source),
            Scenario::Balance(s) => Some(&s.source),
            Scenario::Bathtub(s) => Some(&s.source),
            Scenario::Continuum(_) | Scenario::Fourier(_) | Scenario::Folner(_) | Scenario::Curves(_) => None,
        }
    }
}

/// Parses a scenario, reporting malformed JSON with its position and
/// unknown or missing suite ids by field.
pub fn parse_scenario(json: &str) -> Result<Scenario> {
    let value: Value = serde_json::from_str(json)?;
    let obj = value.as_object().ok_or_else(|| Error::Config {
        field: "<root>".into(),
        message: "scenario must be a JSON object".into(),
    })?;
    match obj.get("suite") {
        None => {
            return Err(Error::Config {
                field: "suite".into(),
                message: "missing suite id".into(),
            })
        }
        Some(Value::String(s)) if SUITES.contains(&s.as_str()) => {}
        Some(other) => {
            return Err(Error::Config {
                field: "suite".into(),
                message: format!("unknown suite id {other}; expected one of {}", SUITES.join(", ")),
            })
        }
    }
    Ok(serde_json::from_str(json)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_generator_scenario() {
        let s = parse_scenario(
            r#"{"suite":"confined","source":{"generator":{"seed":7,"trials":10}},"output":"o"}"#,
        )
        .unwrap();
        assert_eq!(s.suite(), "confined");
        assert_eq!(s.output(), Some("o"));
        match s.source() {
            Some(Source::Generator(g)) => {
                assert_eq!(g.seed, Some(7));
                assert_eq!(g.max_dim, 16);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn diagnostics() {
        match parse_scenario("{\n  \"suite\": \"confined\",\n  oops\n}") {
            Err(Error::Json { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse_scenario(r#"{"suite":"nope"}"#),
            Err(Error::Config { field, .. }) if field == "suite"
        ));
        assert!(matches!(parse_scenario(r#"{"source":{}}"#), Err(Error::Config { .. })));
        assert!(matches!(
            parse_scenario(r#"{"suite":"heat","source":{"generator":{"seed":1}},"extra":1}"#),
            Err(Error::Json { .. })
        ));
        assert!(parse_scenario("[1]").is_err());
    }

    #[test]
    fn folner_scenario() {
        let s = parse_scenario(
            r#"{"suite":"folner","params":{"stencil":{"dim":1,"taps":{"0":2,"1":-1,"-1":-1}},"lambda":2,"sizes":[64,256]}}"#,
        )
        .unwrap();
        assert_eq!(s.suite(), "folner");
        assert!(s.source().is_none());
    }
}
