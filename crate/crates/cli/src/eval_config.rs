// Copyright 2026 The segwave Authors
// SPDX-License-Identifier: Apache-2.0

use serde::{Deserialize, Serialize};

use segwave_core::coupling::MapSpec;
use segwave_core::metrics::FresnelPolicy;
use segwave_core::optimizer::{NoiseConfig, OptimizeConfig};
use segwave_core::{Error, GateSpec, Result};

/// Settings for `evaluate` and `trajectory`. Fields left out fall back to
/// the configuration stored in an optimizer output, then to defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalConfig {
    pub gate: Option<GateSpec>,
    pub map: Option<MapSpec>,
    pub noise: Option<NoiseConfig>,
    pub n_samples: Option<usize>,
    pub fresnel_policy: Option<FresnelPolicy>,
    #[serde(default)]
    pub power_under_noise: bool,
    pub seed: Option<u64>,
}

/// Fully resolved evaluation settings.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedEval {
    pub gate: GateSpec,
    pub map: MapSpec,
    pub noise: NoiseConfig,
    pub n_samples: usize,
    pub fresnel_policy: FresnelPolicy,
    pub power_under_noise: bool,
    pub seed: u64,
}

impl EvalConfig {
    pub fn resolve(&self, stored: Option<&OptimizeConfig>) -> Result<ResolvedEval> {
        let gate = self
            .gate
            .clone()
            .or_else(|| stored.map(|c| c.gate.clone()))
            .ok_or_else(|| Error::Config("missing field `gate` (the design file does not name one)".into()))?;
        Ok(ResolvedEval {
            gate,
            map: self.map.clone().or_else(|| stored.map(|c| c.map.clone())).unwrap_or_default(),
            noise: self.noise.or_else(|| stored.map(|c| c.noise)).unwrap_or_default(),
            n_samples: self.n_samples.or_else(|| stored.map(|c| c.eval_samples)).unwrap_or(10_000),
            fresnel_policy: self.fresnel_policy.or_else(|| stored.map(|c| c.fresnel_policy)).unwrap_or_default(),
            power_under_noise: self.power_under_noise,
            seed: self.seed.or_else(|| stored.map(|c| c.seed)).unwrap_or(0),
        })
    }
}
