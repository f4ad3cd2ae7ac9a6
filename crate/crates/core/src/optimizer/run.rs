// Copyright 2026 The segwave Authors
// SPDX-License-Identifier: Apache-2.0

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cmt::{ideal_gate, Design, Segment};
use crate::coupling::CouplingMap;
use crate::error::{Error, Result};
use crate::metrics::{evaluate_design, EvaluateOptions, EvaluationReport, PowerLossOptions};
use crate::noise::{ErrorBatch, WidthSampler};
use crate::optimizer::{
    cosine_lr, cost_gradient, feasibility_filter, quantize, total_cost, Adam, CostBreakdown, FeasibilityVerdict,
    OptimizeConfig,
};
use crate::seed::{derive_seed, rng_from_seed};

/// Smallest width a parameter vector may map to (nm).
const WIDTH_FLOOR_NM: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub epoch: usize,
    pub lr: f64,
    #[serde(flatten)]
    pub cost: CostBreakdown,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantizedResult {
    pub resolution_nm: f64,
    pub design: Design,
    #[serde(rename = "mean_F")]
    pub mean_f: f64,
    #[serde(rename = "std_F")]
    pub std_f: f64,
    /// Nominal-width mean fidelity lost to rounding.
    pub fidelity_degradation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizedDesign {
    pub gate: String,
    pub material: String,
    pub method: String,
    pub n_segments: usize,
    pub seed: u64,
    pub restart: usize,
    /// Configuration that produced the design.
    pub config: OptimizeConfig,
    pub design: Design,
    pub report: EvaluationReport,
    pub validation_cost_initial: f64,
    pub validation_cost_final: f64,
    pub feasibility: FeasibilityVerdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quantized: Option<QuantizedResult>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub cost_trace: Vec<TracePoint>,
}

impl OptimizedDesign {
    pub fn from_json_str(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json_str(&text)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("optimized design serializes")
    }
}

struct RestartOutcome {
    restart: usize,
    design: Design,
    trace: Vec<TracePoint>,
    validation_initial: f64,
    validation_final: f64,
    feasibility: FeasibilityVerdict,
}

fn to_design(theta: &[f64], config: &OptimizeConfig) -> Result<Design> {
    let segs = theta
        .chunks_exact(3)
        .map(|p| {
            Segment::new(
                (p[0] * config.width_scale_nm).max(WIDTH_FLOOR_NM),
                (p[1] * config.width_scale_nm).max(WIDTH_FLOOR_NM),
                p[2].exp(),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    Design::from_segments(segs)
}

fn project(theta: &mut [f64], config: &OptimizeConfig) {
    let (lo, hi) = (config.w_min_nm / config.width_scale_nm, config.w_max_nm / config.width_scale_nm);
    let log_min = config.min_segment_length_um.max(f64::MIN_POSITIVE).ln();
    for p in theta.chunks_exact_mut(3) {
        p[0] = p[0].clamp(lo, hi);
        p[1] = p[1].clamp(lo, hi);
        p[2] = p[2].max(log_min);
    }
}

fn initial_parameters(config: &OptimizeConfig, restart: usize) -> Vec<f64> {
    let mut rng = rng_from_seed(derive_seed(config.seed, &format!("restart/{restart}/init")));
    let n = config.n_segments;
    let mut widths: Vec<f64> = (0..2 * n)
        .map(|_| rng.random_range(config.w_min_nm..=config.w_max_nm))
        .collect();
    let [lo, hi] = config.l_init_um;
    let total = if hi > lo { rng.random_range(lo..hi) } else { lo };
    let z = total / n as f64;
    let mut theta = Vec::with_capacity(3 * n);
    for pair in widths.chunks_exact_mut(2) {
        theta.extend([pair[0] / config.width_scale_nm, pair[1] / config.width_scale_nm, z.ln()]);
    }
    theta
}

fn training_sampler(config: &OptimizeConfig) -> Result<(WidthSampler, usize)> {
    let sigma = config.sigma_nm()?;
    let sampler = WidthSampler::new(sigma, config.noise.mode, config.n_segments)?;
    // Without noise every sample is identical.
    let batch = if sigma == 0.0 { 1 } else { config.batch_size };
    Ok((sampler, batch))
}

fn validation_batch(config: &OptimizeConfig) -> Result<ErrorBatch> {
    let (sampler, batch) = training_sampler(config)?;
    let n = if batch == 1 { 1 } else { batch * config.validation_factor };
    Ok(sampler.sample(&mut rng_from_seed(derive_seed(config.seed, "validation")), n))
}

fn run_restart(
    config: &OptimizeConfig,
    map: &dyn CouplingMap,
    validation: &ErrorBatch,
    restart: usize,
) -> Result<RestartOutcome> {
    let (sampler, batch_size) = training_sampler(config)?;
    let mut noise_rng = rng_from_seed(derive_seed(config.seed, &format!("restart/{restart}/noise")));
    let mut theta = initial_parameters(config, restart);
    if config.project_to_bounds {
        project(&mut theta, config);
    }
    let mut adam = Adam::new(theta.len());
    let mut trace = Vec::with_capacity(config.epochs);

    let start = to_design(&theta, config)?;
    let validation_initial = total_cost(&start, map, config, validation)?.total;

    let mut grad_theta = vec![0.0; theta.len()];
    for epoch in 0..config.epochs {
        let design = to_design(&theta, config)?;
        let batch = sampler.sample(&mut noise_rng, batch_size);
        let (cost, grad) = cost_gradient(&design, map, config, &batch)?;
        if !cost.total.is_finite() {
            return Err(Error::Degenerate(format!("non-finite cost at epoch {epoch} of restart {restart}")));
        }
        let lr = cosine_lr(config.initial_lr, epoch, config.epochs);
        trace.push(TracePoint { epoch, lr, cost });
        for (i, s) in design.segments().iter().enumerate() {
            grad_theta[3 * i] = grad.width_0[i] * config.width_scale_nm;
            grad_theta[3 * i + 1] = grad.width_1[i] * config.width_scale_nm;
            grad_theta[3 * i + 2] = grad.length[i] * s.length_z;
        }
        adam.step(&mut theta, &grad_theta, lr);
        if config.project_to_bounds {
            project(&mut theta, config);
        }
    }

    let design = to_design(&theta, config)?;
    let validation_final = total_cost(&design, map, config, validation)?.total;
    let feasibility = feasibility_filter(&design, config);
    log::debug!(
        "restart {restart}: validation cost {validation_initial:.6} -> {validation_final:.6}, {}",
        feasibility.summary()
    );
    Ok(RestartOutcome { restart, design, trace, validation_initial, validation_final, feasibility })
}

fn run_all(config: &OptimizeConfig, map: &dyn CouplingMap) -> Result<Vec<RestartOutcome>> {
    config.validate()?;
    let validation = validation_batch(config)?;
    (0..config.restarts)
        .into_par_iter()
        .map(|r| run_restart(config, map, &validation, r))
        .collect()
}

/// Options used for the final report of an optimized design.
pub fn report_options(config: &OptimizeConfig) -> Result<EvaluateOptions> {
    Ok(EvaluateOptions {
        noise: config.noise.to_spec(config.reference_width(), derive_seed(config.seed, "evaluation"))?,
        n_samples: config.eval_samples,
        power: PowerLossOptions { policy: config.fresnel_policy, clamp_to_domain: true, ..Default::default() },
        power_under_noise: false,
    })
}

fn finish(config: &OptimizeConfig, map: &dyn CouplingMap, outcome: RestartOutcome) -> Result<OptimizedDesign> {
    let ideal = ideal_gate(&config.gate)?;
    let options = report_options(config)?;
    let report = evaluate_design(&outcome.design, map, &ideal, &options)?;
    let quantized = quantize(&outcome.design, config.resolution_nm)?;
    let nominal_options = EvaluateOptions { noise: crate::noise::NoiseSpec::noiseless(), n_samples: 2, ..options.clone() };
    let f_nominal = evaluate_design(&outcome.design, map, &ideal, &nominal_options)?.mean_f;
    let q_nominal = evaluate_design(&quantized, map, &ideal, &nominal_options)?.mean_f;
    let q_report = evaluate_design(&quantized, map, &ideal, &options)?;
    Ok(OptimizedDesign {
        gate: config.gate.label(),
        material: config.map.material_label().to_string(),
        method: config.regularizer.label().to_string(),
        n_segments: config.n_segments,
        seed: config.seed,
        restart: outcome.restart,
        config: config.clone(),
        design: outcome.design,
        report,
        validation_cost_initial: outcome.validation_initial,
        validation_cost_final: outcome.validation_final,
        feasibility: outcome.feasibility,
        quantized: Some(QuantizedResult {
            resolution_nm: config.resolution_nm,
            design: quantized,
            mean_f: q_report.mean_f,
            std_f: q_report.std_f,
            fidelity_degradation: f_nominal - q_nominal,
        }),
        cost_trace: outcome.trace,
    })
}

/// Optimize with the map named in the config.
pub fn optimize(config: &OptimizeConfig) -> Result<OptimizedDesign> {
    config.validate()?;
    let map = config.map.build()?;
    optimize_with_map(config, map.as_ref())
}

/// Run every restart and return the feasible one with the lowest
/// validation cost.
pub fn optimize_with_map(config: &OptimizeConfig, map: &dyn CouplingMap) -> Result<OptimizedDesign> {
    let outcomes = run_all(config, map)?;
    let by_cost = |a: &&RestartOutcome, b: &&RestartOutcome| a.validation_final.total_cmp(&b.validation_final);
    let best_feasible = outcomes.iter().filter(|o| o.feasibility.feasible).min_by(by_cost).map(|o| o.restart);
    match best_feasible {
        Some(r) => {
            let chosen = outcomes.into_iter().find(|o| o.restart == r).expect("restart present");
            finish(config, map, chosen)
        }
        None => {
            let reasons = outcomes
                .iter()
                .map(|o| format!("restart {}: {}", o.restart, o.feasibility.summary()))
                .collect::<Vec<_>>()
                .join(" | ");
            let best = outcomes.iter().min_by(by_cost).map(|o| o.restart).expect("at least one restart");
            let chosen = outcomes.into_iter().find(|o| o.restart == best).expect("restart present");
            Err(Error::AllInfeasible {
                restarts: config.restarts,
                reasons,
                best: Box::new(finish(config, map, chosen)?),
            })
        }
    }
}

/// Every restart's result, in restart order, for ensemble averages.
pub fn optimize_ensemble(config: &OptimizeConfig, map: &dyn CouplingMap) -> Result<Vec<OptimizedDesign>> {
    run_all(config, map)?
        .into_iter()
        .map(|o| finish(config, map, o))
        .collect()
}
