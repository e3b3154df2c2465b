//! Versioned JSON configuration. Unknown keys are rejected at every level.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::ends::{Thresholds, Verdict};
use crate::exec::ExecPolicy;
use crate::kahler::PotentialChoice;
use crate::mesh::ScenarioSpec;
use crate::solver::SolverOptions;
use crate::sparse::CgOptions;

pub const CONFIG_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pipeline {
    Capacity,
    Classify,
    Separate,
    Periods,
    Betti,
    Kahler,
    Counterexample,
    Converge,
}

impl Pipeline {
    pub fn name(self) -> &'static str {
        match self {
            Pipeline::Capacity => "capacity",
            Pipeline::Classify => "classify",
            Pipeline::Separate => "separate",
            Pipeline::Periods => "periods",
            Pipeline::Betti => "betti",
            Pipeline::Kahler => "kahler",
            Pipeline::Counterexample => "counterexample",
            Pipeline::Converge => "converge",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pipeline: Option<Pipeline>,
    pub scenario: ScenarioSpec,
    /// Number of exhaustion levels.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levels: Option<usize>,
    /// Explicit truncation radii, overriding `levels`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule: Option<Vec<f64>>,
    #[serde(default = "default_core")]
    pub core: String,
    /// End (truncation loop) that a pipeline singles out.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub end: Option<String>,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub thresholds: Thresholds,
    /// Verdict the classify pipeline must reach.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect: Option<Verdict>,
    #[serde(default)]
    pub kahler: KahlerConfig,
    #[serde(default)]
    pub barrier: BarrierConfig,
    #[serde(default)]
    pub converge: ConvergeConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

fn default_core() -> String {
    "L0".into()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    #[serde(default = "default_tol")]
    pub tol: f64,
    /// Iteration cap; `50√n` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iter: Option<usize>,
    #[serde(default = "default_true")]
    pub parallel: bool,
}

fn default_tol() -> f64 {
    1e-10
}
fn default_true() -> bool {
    true
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tol: default_tol(),
            max_iter: None,
            parallel: true,
        }
    }
}

impl SolverConfig {
    pub fn options(&self) -> SolverOptions {
        SolverOptions {
            cg: CgOptions {
                tol: self.tol,
                max_iter: self.max_iter,
            },
            policy: if self.parallel {
                ExecPolicy::Parallel
            } else {
                ExecPolicy::Sequential
            },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PotentialKind {
    Power,
    Log,
    Constant,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KahlerConfig {
    #[serde(default = "default_potential")]
    pub potential: PotentialKind,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    /// Path from `{f = big_s}` down to `{f = s}`.
    #[serde(default = "default_s")]
    pub s: f64,
    #[serde(default = "default_big_s")]
    pub big_s: f64,
    /// Endpoint of the longer path used for the divergence check.
    #[serde(default = "default_s_far")]
    pub s_far: f64,
    /// Radius at which the conformal factor is compared with its closed form.
    #[serde(default = "default_lambda_radius")]
    pub lambda_radius: f64,
    /// Collar depth of the defining function.
    #[serde(default = "default_delta")]
    pub delta: f64,
}

fn default_potential() -> PotentialKind {
    PotentialKind::Power
}
fn default_alpha() -> f64 {
    1.0
}
fn default_s() -> f64 {
    0.01
}
fn default_big_s() -> f64 {
    0.25
}
fn default_s_far() -> f64 {
    1e-4
}
fn default_lambda_radius() -> f64 {
    2.0
}
fn default_delta() -> f64 {
    1.0
}

impl Default for KahlerConfig {
    fn default() -> Self {
        KahlerConfig {
            potential: default_potential(),
            alpha: default_alpha(),
            s: default_s(),
            big_s: default_big_s(),
            s_far: default_s_far(),
            lambda_radius: default_lambda_radius(),
            delta: default_delta(),
        }
    }
}

impl KahlerConfig {
    pub fn choice(&self) -> PotentialChoice {
        match self.potential {
            PotentialKind::Power => PotentialChoice::Power { alpha: self.alpha },
            PotentialKind::Log => PotentialChoice::Log,
            PotentialKind::Constant => PotentialChoice::Constant,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BarrierConfig {
    /// Values of `η - η₀` to test.
    #[serde(default = "default_offsets")]
    pub eta_offsets: Vec<f64>,
    #[serde(default = "default_barrier_tol")]
    pub tol: f64,
}

fn default_offsets() -> Vec<f64> {
    vec![0.05, 0.25, 0.5, 1.0, 2.0]
}
fn default_barrier_tol() -> f64 {
    1e-8
}

impl Default for BarrierConfig {
    fn default() -> Self {
        BarrierConfig {
            eta_offsets: default_offsets(),
            tol: default_barrier_tol(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    Capacity,
    Green,
    Period,
    Lambda,
    PathLength,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// Successive quadrisections of the scenario mesh.
    Refine,
    /// The scenario regenerated at doubled resolution.
    Resolution,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergeConfig {
    #[serde(default = "default_quantity")]
    pub quantity: Quantity,
    #[serde(default = "default_refinements")]
    pub refinements: usize,
    /// Defaults to `resolution` for `lambda` and `path_length`, `refine` otherwise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<Family>,
    /// Relative error allowed on the finest level.
    #[serde(default = "default_final_tol")]
    pub tolerance: f64,
    #[serde(default = "default_min_order")]
    pub min_order: f64,
}

fn default_quantity() -> Quantity {
    Quantity::Capacity
}
fn default_refinements() -> usize {
    3
}
fn default_final_tol() -> f64 {
    0.02
}
fn default_min_order() -> f64 {
    0.9
}

impl Default for ConvergeConfig {
    fn default() -> Self {
        ConvergeConfig {
            quantity: default_quantity(),
            refinements: default_refinements(),
            family: None,
            tolerance: default_final_tol(),
            min_order: default_min_order(),
        }
    }
}

impl ConvergeConfig {
    pub fn family(&self) -> Family {
        self.family.unwrap_or(match self.quantity {
            Quantity::Lambda | Quantity::PathLength => Family::Resolution,
            _ => Family::Refine,
        })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<PathBuf>,
}

/// Schema violation with the path of the offending field.
#[derive(Clone, Debug, PartialEq)]
pub struct ConfigError {
    pub path: String,
    pub message: String,
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.path.is_empty() || self.path == "." {
            write!(f, "{}", self.message)
        } else {
            write!(f, "{}: {}", self.path, self.message)
        }
    }
}

fn invalid(path: &str, message: impl Into<String>) -> ConfigError {
    ConfigError {
        path: path.into(),
        message: message.into(),
    }
}

pub fn parse_config(text: &str) -> Result<Config, ConfigError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let cfg: Config = serde_path_to_error::deserialize(de).map_err(|e| ConfigError {
        path: e.path().to_string(),
        message: e.inner().to_string(),
    })?;
    cfg.check()?;
    Ok(cfg)
}

impl Config {
    /// Semantic checks that the schema cannot express.
    pub fn check(&self) -> Result<(), ConfigError> {
        if self.version != CONFIG_VERSION {
            return Err(invalid(
                "version",
                format!("unsupported version {} (expected {CONFIG_VERSION})", self.version),
            ));
        }
        self.scenario
            .validate()
            .map_err(|e| invalid("scenario", e.to_string()))?;
        if !(self.solver.tol > 0.0 && self.solver.tol < 1.0) {
            return Err(invalid("solver.tol", "must lie in (0, 1)"));
        }
        if let Some(l) = self.levels {
            if l < 1 {
                return Err(invalid("levels", "must be at least 1"));
            }
        }
        if let Some(s) = &self.schedule {
            if s.iter().any(|r| !(r.is_finite() && *r > 0.0)) || s.windows(2).any(|w| w[1] <= w[0]) {
                return Err(invalid("schedule", "radii must be positive and strictly increasing"));
            }
        }
        let k = &self.kahler;
        if self.kahler.potential == PotentialKind::Power && !(k.alpha > 0.0 && k.alpha.is_finite()) {
            return Err(invalid("kahler.alpha", "must be positive"));
        }
        if !(0.0 < k.s_far && k.s_far < k.s && k.s < k.big_s) {
            return Err(invalid("kahler", "need 0 < s_far < s < big_s"));
        }
        if !(k.delta > 0.0) {
            return Err(invalid("kahler.delta", "must be positive"));
        }
        if !(k.lambda_radius > 1.0) {
            return Err(invalid("kahler.lambda_radius", "must exceed 1"));
        }
        if self.barrier.eta_offsets.iter().any(|x| !(*x > 0.0)) {
            return Err(invalid("barrier.eta_offsets", "offsets must be positive"));
        }
        if self.converge.refinements < 2 {
            return Err(invalid("converge.refinements", "need at least 2 to estimate an order"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_parses_with_defaults() {
        let cfg = parse_config(r#"{"version": 1, "scenario": {"kind": "disk", "r": 1.0, "res": 16}}"#).unwrap();
        assert_eq!(cfg.core, "L0");
        assert_eq!(cfg.solver.tol, 1e-10);
        assert_eq!(cfg.converge.family(), Family::Refine);
    }

    #[test]
    fn missing_resolution_names_the_field() {
        let err = parse_config(r#"{"version": 1, "scenario": {"kind": "disk", "r": 1.0}}"#).unwrap_err();
        assert!(err.message.contains("res"), "{err}");
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = parse_config(r#"{"version": 1, "scenario": {"kind": "disk", "r": 1.0, "res": 8}, "solver": {"tol": 1e-8, "tolerance": 1}}"#)
            .unwrap_err();
        assert_eq!(err.path, "solver.tolerance");
        let err = parse_config(r#"{"version": 2, "scenario": {"kind": "disk", "r": 1.0, "res": 8}}"#).unwrap_err();
        assert_eq!(err.path, "version");
    }
}
