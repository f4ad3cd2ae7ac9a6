// Copyright 2026 The segwave Authors
// SPDX-License-Identifier: Apache-2.0

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::cmt::GateSpec;
use crate::coupling::MapSpec;
use crate::error::{Error, Result};
use crate::metrics::FresnelPolicy;
use crate::noise::{CorrelationMode, NoiseSpec};

/// Extra term added to the fidelity loss.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regularizer {
    #[default]
    Baseline,
    /// `λ_R · R` with `R = 1 − Π T_k`.
    Fresnel,
    /// `λ_A · A`.
    Adiabatic,
}

impl Regularizer {
    pub fn label(&self) -> &'static str {
        match self {
            Regularizer::Baseline => "baseline",
            Regularizer::Fresnel => "fresnel",
            Regularizer::Adiabatic => "adiabatic",
        }
    }
}

/// Width noise as configured: absolute (nm) or relative to the middle of
/// the allowed width range (%).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma_nm: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma_percent: Option<f64>,
    #[serde(default)]
    pub mode: CorrelationMode,
}

impl NoiseConfig {
    pub fn sigma_nm(sigma: f64) -> Self {
        NoiseConfig { sigma_nm: Some(sigma), ..Default::default() }
    }

    pub fn sigma_percent(percent: f64) -> Self {
        NoiseConfig { sigma_percent: Some(percent), ..Default::default() }
    }

    pub fn with_mode(self, mode: CorrelationMode) -> Self {
        NoiseConfig { mode, ..self }
    }

    /// Absolute σ in nm; percentages refer to `reference_width`.
    pub fn resolve_sigma(&self, reference_width: f64) -> Result<f64> {
        match (self.sigma_nm, self.sigma_percent) {
            (Some(_), Some(_)) => Err(Error::Config("noise: give sigma_nm or sigma_percent, not both".into())),
            (Some(s), None) => Ok(s),
            (None, Some(p)) => Ok(p / 100.0 * reference_width),
            (None, None) => Ok(0.0),
        }
    }

    pub fn to_spec(&self, reference_width: f64, seed: u64) -> Result<NoiseSpec> {
        NoiseSpec::new(self.resolve_sigma(reference_width)?, self.mode, seed)
    }
}

fn default_lambda_w() -> f64 {
    1e-4
}
fn default_lambda_r() -> f64 {
    10.0
}
fn default_lambda_a() -> f64 {
    0.1
}
fn default_batch_size() -> usize {
    256
}
fn default_epochs() -> usize {
    500
}
fn default_initial_lr() -> f64 {
    0.1
}
fn default_restarts() -> usize {
    10
}
fn default_w_min() -> f64 {
    500.0
}
fn default_w_max() -> f64 {
    850.0
}
fn default_l_init() -> [f64; 2] {
    [10.0, 60.0]
}
fn default_resolution() -> f64 {
    20.0
}
fn default_min_segment_length() -> f64 {
    1.0
}
fn default_width_scale() -> f64 {
    100.0
}
fn default_validation_factor() -> usize {
    10
}
fn default_true() -> bool {
    true
}
fn default_eval_samples() -> usize {
    10_000
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizeConfig {
    pub gate: GateSpec,
    pub n_segments: usize,
    #[serde(default)]
    pub map: MapSpec,
    #[serde(default)]
    pub noise: NoiseConfig,
    #[serde(default)]
    pub regularizer: Regularizer,
    #[serde(default = "default_lambda_w")]
    pub lambda_w: f64,
    #[serde(default = "default_lambda_r")]
    pub lambda_r: f64,
    #[serde(default = "default_lambda_a")]
    pub lambda_a: f64,
    #[serde(default = "default_batch_size")]
    pub batch_size: usize,
    #[serde(default = "default_epochs")]
    pub epochs: usize,
    #[serde(default = "default_initial_lr")]
    pub initial_lr: f64,
    #[serde(default = "default_restarts")]
    pub restarts: usize,
    #[serde(default = "default_w_min")]
    pub w_min_nm: f64,
    #[serde(default = "default_w_max")]
    pub w_max_nm: f64,
    /// Range of the initial total length (µm).
    #[serde(default = "default_l_init")]
    pub l_init_um: [f64; 2],
    #[serde(default = "default_resolution")]
    pub resolution_nm: f64,
    #[serde(default = "default_min_segment_length")]
    pub min_segment_length_um: f64,
    #[serde(default)]
    pub fresnel_policy: FresnelPolicy,
    /// Width change (nm) corresponding to a unit step in parameter space.
    #[serde(default = "default_width_scale")]
    pub width_scale_nm: f64,
    /// Validation batch size as a multiple of `batch_size`.
    #[serde(default = "default_validation_factor")]
    pub validation_factor: usize,
    /// Project widths into `[w_min_nm, w_max_nm]` and lengths above
    /// `min_segment_length_um` after every step.
    #[serde(default = "default_true")]
    pub project_to_bounds: bool,
    /// Monte-Carlo samples for the final report.
    #[serde(default = "default_eval_samples")]
    pub eval_samples: usize,
    #[serde(default)]
    pub seed: u64,
}

impl OptimizeConfig {
    /// Defaults for everything except the target and segment count.
    pub fn new(gate: GateSpec, n_segments: usize) -> Self {
        OptimizeConfig {
            gate,
            n_segments,
            map: MapSpec::default(),
            noise: NoiseConfig::default(),
            regularizer: Regularizer::default(),
            lambda_w: default_lambda_w(),
            lambda_r: default_lambda_r(),
            lambda_a: default_lambda_a(),
            batch_size: default_batch_size(),
            epochs: default_epochs(),
            initial_lr: default_initial_lr(),
            restarts: default_restarts(),
            w_min_nm: default_w_min(),
            w_max_nm: default_w_max(),
            l_init_um: default_l_init(),
            resolution_nm: default_resolution(),
            min_segment_length_um: default_min_segment_length(),
            fresnel_policy: FresnelPolicy::default(),
            width_scale_nm: default_width_scale(),
            validation_factor: default_validation_factor(),
            project_to_bounds: true,
            eval_samples: default_eval_samples(),
            seed: 0,
        }
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let c: OptimizeConfig = serde_json::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json_str(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    /// Middle of the allowed width range; the reference for `sigma_percent`.
    pub fn reference_width(&self) -> f64 {
        0.5 * (self.w_min_nm + self.w_max_nm)
    }

    pub fn sigma_nm(&self) -> Result<f64> {
        self.noise.resolve_sigma(self.reference_width())
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Config(m));
        crate::cmt::ideal_gate(&self.gate).map_err(|e| Error::Config(format!("gate: {e}")))?;
        if self.n_segments == 0 {
            return fail("n_segments must be at least 1".into());
        }
        if !(self.w_min_nm.is_finite() && self.w_max_nm.is_finite() && self.w_min_nm < self.w_max_nm) {
            return fail(format!("need w_min_nm < w_max_nm, got {} and {}", self.w_min_nm, self.w_max_nm));
        }
        if self.batch_size == 0 {
            return fail("batch_size must be at least 1".into());
        }
        if self.epochs == 0 {
            return fail("epochs must be at least 1".into());
        }
        if self.restarts == 0 {
            return fail("restarts must be at least 1".into());
        }
        if self.validation_factor == 0 {
            return fail("validation_factor must be at least 1".into());
        }
        if self.eval_samples < 2 {
            return fail("eval_samples must be at least 2".into());
        }
        if !(self.initial_lr.is_finite() && self.initial_lr > 0.0) {
            return fail(format!("initial_lr must be positive, got {}", self.initial_lr));
        }
        for (name, v) in [("lambda_w", self.lambda_w), ("lambda_r", self.lambda_r), ("lambda_a", self.lambda_a)] {
            if !(v.is_finite() && v >= 0.0) {
                return fail(format!("{name} must be non-negative, got {v}"));
            }
        }
        let [lo, hi] = self.l_init_um;
        if !(lo.is_finite() && lo > 0.0 && lo <= hi && hi.is_finite()) {
            return fail(format!("l_init_um must satisfy 0 < lo ≤ hi, got [{lo}, {hi}]"));
        }
        if !(self.resolution_nm.is_finite() && self.resolution_nm > 0.0) {
            return fail("resolution_nm must be positive".into());
        }
        if !(self.min_segment_length_um.is_finite() && self.min_segment_length_um >= 0.0) {
            return fail("min_segment_length_um must be non-negative".into());
        }
        if !(self.width_scale_nm.is_finite() && self.width_scale_nm > 0.0) {
            return fail("width_scale_nm must be positive".into());
        }
        let sigma = self.sigma_nm()?;
        if !(sigma.is_finite() && sigma >= 0.0) {
            return fail(format!("noise sigma must be non-negative, got {sigma}"));
        }
        if let CorrelationMode::CorrelationMu(mu) = self.noise.mode {
            if !(mu.is_finite() && mu >= 0.0) {
                return fail(format!("correlation mu must be non-negative, got {mu}"));
            }
        }
        Ok(())
    }
}
