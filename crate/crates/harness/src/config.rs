//! Experiment configuration files.
//!
//! A config is a flat TOML table. Every key is optional except where the
//! chosen problem needs it; unknown keys are rejected. See
//! `configs/example.toml` for the full schema with comments.

use std::path::{Path, PathBuf};

use inexact_newton::problems::DataFormat;
use inexact_newton::{ArcMode, Loss, SampleMode};
use serde::Deserialize;

use crate::error::HarnessError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemKind {
    /// Gaussian finite-sum data from [`inexact_newton::problems::generate_synthetic`].
    Synthetic,
    /// Finite-sum data read from `data`.
    File,
    /// `x⁴/4 − x²/2 + y²/2`.
    Saddle,
    /// A random strongly convex quadratic in `d` variables.
    Quadratic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossKind {
    Biweight,
    NlsLogistic,
}

impl LossKind {
    pub fn loss(self) -> Loss<f64> {
        match self {
            Self::Biweight => Loss::BiWeight,
            Self::NlsLogistic => Loss::NlsLogistic,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverKind {
    Tr,
    Arc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArcModeKind {
    Standard,
    Optimal,
}

impl From<ArcModeKind> for ArcMode {
    fn from(m: ArcModeKind) -> Self {
        match m {
            ArcModeKind::Standard => ArcMode::Standard,
            ArcModeKind::Optimal => ArcMode::Optimal,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HessianKind {
    Exact,
    /// Uniform with replacement.
    Uniform,
    UniformWithoutReplacement,
    Nonuniform,
    Intrinsic,
}

impl HessianKind {
    pub fn sample_mode(self) -> Option<SampleMode> {
        match self {
            Self::Exact => None,
            Self::Uniform => Some(SampleMode::UniformWithReplacement),
            Self::UniformWithoutReplacement => Some(SampleMode::UniformWithoutReplacement),
            Self::Nonuniform => Some(SampleMode::NonUniform),
            Self::Intrinsic => Some(SampleMode::NonUniformIntrinsic),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FormatKind {
    Csv,
    Svmlight,
}

impl From<FormatKind> for DataFormat {
    fn from(f: FormatKind) -> Self {
        match f {
            FormatKind::Csv => DataFormat::Csv,
            FormatKind::Svmlight => DataFormat::SvmLight,
        }
    }
}

/// Starting point: `"zeros"`, `"gaussian"` (scaled by `x0_scale`), or explicit values.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum StartPoint {
    Named(String),
    Values(Vec<f64>),
}

impl Default for StartPoint {
    fn default() -> Self {
        Self::Named("zeros".into())
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub problem: ProblemKind,
    pub loss: LossKind,
    pub data: Option<PathBuf>,
    pub format: FormatKind,
    pub n: usize,
    pub d: usize,
    pub skew: f64,
    pub noise: f64,
    pub outlier_fraction: f64,
    pub target_k_max: Option<f64>,
    pub data_seed: u64,

    pub solver: SolverKind,
    pub arc_mode: ArcModeKind,
    pub hessian: HessianKind,
    /// Fixed `|S|`, overriding the sample-size bound.
    pub sample_size: Option<usize>,
    pub cap_at_n: bool,
    pub eps_g: f64,
    pub eps_h: f64,
    pub delta0: f64,
    pub sigma0: f64,
    pub sigma_min: Option<f64>,
    pub eta: f64,
    pub gamma: f64,
    pub alpha: f64,
    pub nu: f64,
    pub zeta: f64,
    /// Lipschitz constant of the Hessian; estimated around `x0` when absent.
    pub lipschitz: Option<f64>,
    pub max_iters: usize,
    pub delta: f64,
    pub max_subspace_dim: Option<usize>,
    pub x0: StartPoint,
    pub x0_scale: f64,

    pub seed: u64,
    pub out: Option<PathBuf>,
    pub trials: usize,

    pub verify_eps: Vec<f64>,
    pub verify_delta: Vec<f64>,
    pub verify_trials: usize,
    /// Add quartered-size rows that are expected to fail at tight accuracies.
    pub verify_control: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            problem: ProblemKind::Synthetic,
            loss: LossKind::Biweight,
            data: None,
            format: FormatKind::Csv,
            n: 1000,
            d: 50,
            skew: 1.0,
            noise: 0.1,
            outlier_fraction: 0.05,
            target_k_max: Some(1.0),
            data_seed: 0,
            solver: SolverKind::Tr,
            arc_mode: ArcModeKind::Standard,
            hessian: HessianKind::Exact,
            sample_size: None,
            cap_at_n: true,
            eps_g: 1e-4,
            eps_h: 1e-2,
            delta0: 1.0,
            sigma0: 1.0,
            sigma_min: None,
            eta: 0.2,
            gamma: 2.0,
            alpha: 0.5,
            nu: 0.5,
            zeta: 0.25,
            lipschitz: None,
            max_iters: 1000,
            delta: 0.1,
            max_subspace_dim: None,
            x0: StartPoint::default(),
            x0_scale: 1.0,
            seed: 0,
            out: None,
            trials: 20,
            verify_eps: vec![0.002, 0.01, 0.05, 0.1, 0.2],
            verify_delta: vec![0.01, 0.1],
            verify_trials: 1000,
            verify_control: true,
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, HarnessError> {
        let config: Self =
            toml::from_str(text).map_err(|e| HarnessError::Config(e.message().to_string()))?;
        config.check()?;
        Ok(config)
    }

    /// Reads `path`; a relative `data` path is resolved against the config's directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self, HarnessError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut config = Self::from_toml(&text).map_err(|e| match e {
            HarnessError::Config(m) => HarnessError::Config(format!("{}: {m}", path.display())),
            other => other,
        })?;
        if let (Some(data), Some(dir)) = (&config.data, path.parent()) {
            if data.is_relative() {
                config.data = Some(dir.join(data));
            }
        }
        Ok(config)
    }

    /// Structural checks only; numeric ranges are validated by the solver configs.
    fn check(&self) -> Result<(), HarnessError> {
        let bad = |m: String| Err(HarnessError::Config(m));
        match self.problem {
            ProblemKind::File if self.data.is_none() => {
                return bad("problem = \"file\" needs `data`".into())
            }
            ProblemKind::Synthetic | ProblemKind::Quadratic if self.n == 0 || self.d == 0 => {
                return bad(format!(
                    "`n` and `d` must be positive, got n = {}, d = {}",
                    self.n, self.d
                ));
            }
            _ => {}
        }
        let finite_sum = matches!(self.problem, ProblemKind::Synthetic | ProblemKind::File);
        if !finite_sum && self.hessian != HessianKind::Exact {
            return bad(format!(
                "hessian = {:?} needs a finite-sum problem",
                self.hessian
            ));
        }
        if let StartPoint::Named(name) = &self.x0 {
            if name != "zeros" && name != "gaussian" {
                return bad(format!(
                    "x0 must be \"zeros\", \"gaussian\" or a list of numbers, got \"{name}\""
                ));
            }
        }
        if self.trials == 0 || self.verify_trials == 0 {
            return bad("`trials` and `verify_trials` must be positive".into());
        }
        if self.verify_eps.is_empty() || self.verify_delta.is_empty() {
            return bad("`verify_eps` and `verify_delta` must not be empty".into());
        }
        Ok(())
    }
}
