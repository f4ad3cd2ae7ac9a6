// Copyright 2026 The segwave Authors
// SPDX-License-Identifier: Apache-2.0

use serde::{Deserialize, Serialize};

use crate::cmt::{Design, Unitary2};
use crate::coupling::CouplingMap;
use crate::error::{Error, Result};
use crate::metrics::{
    adiabaticity_metric, design_power_loss, fidelity_for_batch, power_loss_for_coefficients, realized_coefficients,
    PowerLossOptions,
};
use crate::noise::{sigma_percent, NoiseSpec, WidthSampler};
use crate::seed::rng_from_seed;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluateOptions {
    pub noise: NoiseSpec,
    pub n_samples: usize,
    pub power: PowerLossOptions,
    /// Also report the mean power loss over the noise samples.
    pub power_under_noise: bool,
}

impl Default for EvaluateOptions {
    fn default() -> Self {
        EvaluateOptions {
            noise: NoiseSpec::noiseless(),
            n_samples: 10_000,
            power: PowerLossOptions::default(),
            power_under_noise: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    #[serde(rename = "mean_F")]
    pub mean_f: f64,
    #[serde(rename = "std_F")]
    pub std_f: f64,
    #[serde(rename = "stderr_F")]
    pub stderr_f: f64,
    pub n_samples: usize,
    /// `1 − Π T_k` at nominal widths.
    pub power_loss: f64,
    #[serde(rename = "per_transition_T")]
    pub per_transition_t: Vec<f64>,
    #[serde(rename = "adiabaticity_A")]
    pub adiabaticity_a: f64,
    pub sigma_percent: f64,
    #[serde(default)]
    pub clamp_rate: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub calibration_factor: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub calibrated_power_loss: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub power_loss_under_noise: Option<f64>,
}

/// Fidelity statistics, power loss, and adiabaticity of a design.
pub fn evaluate_design(
    design: &Design,
    map: &dyn CouplingMap,
    ideal: &Unitary2,
    options: &EvaluateOptions,
) -> Result<EvaluationReport> {
    options.noise.validate()?;
    if options.n_samples < 2 {
        return Err(Error::Contract("evaluation needs at least 2 samples".into()));
    }
    let sampler = WidthSampler::new(options.noise.sigma, options.noise.mode, design.len())?;
    let batch = sampler.sample(&mut rng_from_seed(options.noise.seed), options.n_samples);
    let stats = fidelity_for_batch(design, map, ideal, &batch)?;
    let power = design_power_loss(design, map, &options.power)?;

    let power_loss_under_noise = if options.power_under_noise {
        let mut buf = Vec::with_capacity(design.len());
        let mut total = 0.0;
        for row in batch.rows() {
            realized_coefficients(design, map, row, &mut buf);
            total += power_loss_for_coefficients(design, &buf, &options.power)?.total_loss;
        }
        Some(total / batch.n_samples() as f64)
    } else {
        None
    };

    Ok(EvaluationReport {
        mean_f: stats.mean,
        std_f: stats.std,
        stderr_f: stats.stderr,
        n_samples: stats.n_samples,
        power_loss: power.total_loss,
        per_transition_t: power.per_transition_t,
        adiabaticity_a: adiabaticity_metric(design),
        sigma_percent: sigma_percent(design, options.noise.sigma),
        clamp_rate: stats.clamp_rate,
        calibration_factor: power.calibration_factor,
        calibrated_power_loss: power.calibrated_loss,
        power_loss_under_noise,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cmt::{ideal_gate, GateSpec, Segment};
    use crate::coupling::default_linbo3_map;
    use crate::noise::CorrelationMode;

    #[test]
    fn uniform_design_report() {
        let d = Design::from_segments(vec![Segment::new(600.0, 600.0, 10.0).unwrap(); 3]).unwrap();
        let opts = EvaluateOptions {
            noise: NoiseSpec::new(30.0, CorrelationMode::FullyCorrelated, 4).unwrap(),
            n_samples: 500,
            power_under_noise: true,
            ..Default::default()
        };
        let ideal = ideal_gate(&GateSpec::named("X")).unwrap();
        let r = evaluate_design(&d, &default_linbo3_map(), &ideal, &opts).unwrap();
        assert_eq!(r.power_loss, 0.0);
        assert_eq!(r.power_loss_under_noise, Some(0.0));
        assert_eq!(r.per_transition_t, vec![1.0, 1.0]);
        assert_eq!(r.adiabaticity_a, 0.0);
        assert_eq!(r.sigma_percent, 5.0);
        assert_eq!(r.n_samples, 500);
    }

    #[test]
    fn json_field_names_and_round_trip() {
        let d = Design::from_segments(vec![
            Segment::new(600.0, 640.0, 10.0).unwrap(),
            Segment::new(620.0, 700.0, 12.0).unwrap(),
        ])
        .unwrap();
        let ideal = ideal_gate(&GateSpec::named("H")).unwrap();
        let opts = EvaluateOptions { n_samples: 4, ..Default::default() };
        let r = evaluate_design(&d, &default_linbo3_map(), &ideal, &opts).unwrap();
        let v: serde_json::Value = serde_json::to_value(&r).unwrap();
        for key in ["mean_F", "std_F", "stderr_F", "n_samples", "power_loss", "per_transition_T", "adiabaticity_A", "sigma_percent"] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
        let text = serde_json::to_string(&r).unwrap();
        let back: EvaluationReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back, r);
    }
}
