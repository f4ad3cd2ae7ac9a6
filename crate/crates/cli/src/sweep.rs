// Copyright 2026 The segwave Authors
// SPDX-License-Identifier: Apache-2.0

//! N, σ and μ sweeps over ensembles of designs.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use segwave_core::metrics::{fit_scaling_laws, fidelity_statistics, FidelityStats, ScalingFit, ScalingPoint};
use segwave_core::optimizer::{optimize_ensemble, NoiseConfig, OptimizeConfig, OptimizedDesign};
use segwave_core::seed::derive_seed;
use segwave_core::{ideal_gate, CorrelationMode, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepKind {
    N,
    Mu,
    Sigma,
}

impl SweepKind {
    pub fn column(self) -> &'static str {
        match self {
            SweepKind::N => "n_segments",
            SweepKind::Mu => "mu",
            SweepKind::Sigma => "sigma_percent",
        }
    }
}

fn default_n_values() -> Vec<usize> {
    vec![1, 3, 5, 7, 10, 20, 50, 100]
}
fn default_sigma_percent() -> Vec<f64> {
    (1..=10).map(f64::from).collect()
}
fn default_mu_values() -> Vec<f64> {
    vec![0.0, 0.1, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0]
}
fn default_eval_samples() -> usize {
    10_000
}

/// Sweep settings. Designs come either from `designs` (optimizer outputs)
/// or are optimized from `optimize`, a partial optimizer config whose
/// `n_segments` is filled in per grid point for N-sweeps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default)]
    pub optimize: Option<serde_json::Value>,
    #[serde(default)]
    pub designs: Vec<PathBuf>,
    #[serde(default = "default_n_values")]
    pub n_values: Vec<usize>,
    #[serde(default = "default_sigma_percent")]
    pub sigma_percent: Vec<f64>,
    #[serde(default = "default_mu_values")]
    pub mu_values: Vec<f64>,
    #[serde(default = "default_eval_samples")]
    pub eval_samples: usize,
    /// Evaluation noise; defaults to each design's training noise.
    #[serde(default)]
    pub noise: Option<NoiseConfig>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("all sweep fields have defaults")
    }
}

/// One grid point averaged over the designs sharing a segment count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n_segments: usize,
    pub n_designs: usize,
    pub value: f64,
    #[serde(rename = "mean_F")]
    pub mean_f: f64,
    #[serde(rename = "std_F")]
    pub std_f: f64,
    /// Monte-Carlo standard error of `mean_F`.
    #[serde(rename = "stderr_F")]
    pub stderr_f: f64,
    /// Standard error of `mean_F` across the designs (0 for one design).
    #[serde(rename = "ensemble_stderr_F")]
    pub ensemble_stderr_f: f64,
    #[serde(rename = "ensemble_stderr_std_F")]
    pub ensemble_stderr_std_f: f64,
    pub power_loss: f64,
    pub clamp_rate: f64,
}

impl SweepConfig {
    pub fn validate(&self, kind: SweepKind) -> Result<()> {
        let empty = match kind {
            SweepKind::N => self.n_values.is_empty(),
            SweepKind::Mu => self.mu_values.is_empty(),
            SweepKind::Sigma => self.sigma_percent.is_empty(),
        };
        if empty {
            return Err(Error::Config(format!("the {} grid is empty", kind.column())));
        }
        if self.eval_samples < 2 {
            return Err(Error::Config("eval_samples must be at least 2".into()));
        }
        if self.mu_values.iter().any(|m| !(m.is_finite() && *m >= 0.0)) {
            return Err(Error::Config("mu_values must be finite and non-negative".into()));
        }
        if self.sigma_percent.iter().any(|s| !(s.is_finite() && *s >= 0.0)) {
            return Err(Error::Config("sigma_percent values must be finite and non-negative".into()));
        }
        Ok(())
    }

    /// The base optimizer config with `n_segments` replaced.
    pub fn optimize_config(&self, n_segments: Option<usize>) -> Result<OptimizeConfig> {
        let mut value = self
            .optimize
            .clone()
            .ok_or_else(|| Error::Config("missing field `optimize`".into()))?;
        let obj = value
            .as_object_mut()
            .ok_or_else(|| Error::Config("`optimize` must be a JSON object".into()))?;
        if let Some(n) = n_segments {
            obj.insert("n_segments".into(), n.into());
        }
        let c: OptimizeConfig =
            serde_json::from_value(value).map_err(|e| Error::Config(format!("optimize: {e}")))?;
        c.validate()?;
        Ok(c)
    }

    pub fn load_designs(&self) -> Result<Vec<OptimizedDesign>> {
        self.designs.iter().map(OptimizedDesign::load).collect()
    }
}

/// Designs for a sweep: loaded from disk if listed, otherwise optimized.
/// N-sweeps optimize one ensemble per grid value with seed `n/{N}`.
pub fn sweep_designs(config: &SweepConfig, kind: SweepKind, seed: u64) -> Result<Vec<OptimizedDesign>> {
    if !config.designs.is_empty() {
        return config.load_designs();
    }
    if config.optimize.is_none() {
        return Err(Error::Config("a sweep needs `designs` or an `optimize` base config".into()));
    }
    let bases = match kind {
        SweepKind::N => config
            .n_values
            .iter()
            .map(|&n| {
                let mut c = config.optimize_config(Some(n))?;
                c.seed = derive_seed(seed, &format!("n/{n}"));
                Ok(c)
            })
            .collect::<Result<Vec<_>>>()?,
        _ => {
            let mut c = config.optimize_config(None)?;
            c.seed = seed;
            vec![c]
        }
    };
    let mut out = Vec::new();
    for c in bases {
        log::info!("optimizing {} restarts at N = {}", c.restarts, c.n_segments);
        let map = c.map.build()?;
        out.extend(optimize_ensemble(&c, map.as_ref())?);
    }
    Ok(out)
}

/// Evaluate one design at an explicit noise setting.
fn evaluate_at(design: &OptimizedDesign, noise: &NoiseConfig, n_samples: usize, seed: u64) -> Result<FidelityStats> {
    let c = &design.config;
    let map = c.map.build()?;
    let spec = noise.to_spec(c.reference_width(), seed)?;
    fidelity_statistics(&design.design, map.as_ref(), &spec, &ideal_gate(&c.gate)?, n_samples)
}

/// Ensemble averages over `designs` at each grid point of `kind`.
///
/// All designs and grid points share the evaluation seed so that
/// neighbouring rows differ only through the swept quantity.
pub fn run_sweep(config: &SweepConfig, kind: SweepKind, designs: &[OptimizedDesign], seed: u64) -> Result<Vec<SweepRow>> {
    config.validate(kind)?;
    if designs.is_empty() {
        return Err(Error::Config("sweep has no designs".into()));
    }
    let eval_seed = derive_seed(seed, "evaluation");
    let grid: Vec<f64> = match kind {
        SweepKind::N => vec![f64::NAN],
        SweepKind::Mu => config.mu_values.clone(),
        SweepKind::Sigma => config.sigma_percent.clone(),
    };
    let jobs: Vec<(usize, usize)> = (0..designs.len()).flat_map(|d| (0..grid.len()).map(move |g| (d, g))).collect();
    let results = jobs
        .par_iter()
        .map(|&(d, g)| {
            let design = &designs[d];
            let base = config.noise.unwrap_or(design.config.noise);
            let noise = match kind {
                SweepKind::N => base,
                SweepKind::Mu => base.with_mode(CorrelationMode::CorrelationMu(grid[g])),
                SweepKind::Sigma => NoiseConfig::sigma_percent(grid[g]).with_mode(base.mode),
            };
            evaluate_at(design, &noise, config.eval_samples, eval_seed).map(|s| (d, g, s))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut groups: BTreeMap<(usize, usize), Vec<(usize, FidelityStats)>> = BTreeMap::new();
    for (d, g, s) in results {
        groups.entry((designs[d].design.len(), g)).or_default().push((d, s));
    }
    let rows = groups
        .into_iter()
        .map(|((n, g), members)| {
            let k = members.len() as f64;
            let means: Vec<f64> = members.iter().map(|(_, s)| s.mean).collect();
            let stds: Vec<f64> = members.iter().map(|(_, s)| s.std).collect();
            let mean_f = means.iter().sum::<f64>() / k;
            let std_f = stds.iter().sum::<f64>() / k;
            SweepRow {
                n_segments: n,
                n_designs: members.len(),
                value: if kind == SweepKind::N { n as f64 } else { grid[g] },
                mean_f,
                std_f,
                stderr_f: members.iter().map(|(_, s)| s.stderr * s.stderr).sum::<f64>().sqrt() / k,
                ensemble_stderr_f: sample_stderr(&means),
                ensemble_stderr_std_f: sample_stderr(&stds),
                power_loss: members.iter().map(|(d, _)| designs[*d].report.power_loss).sum::<f64>() / k,
                clamp_rate: members.iter().map(|(_, s)| s.clamp_rate).sum::<f64>() / k,
            }
        })
        .collect();
    Ok(rows)
}

/// Standard error of the mean of `xs` (sample variance); 0 below two values.
pub fn sample_stderr(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let k = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / k;
    let var = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (k - 1.0);
    (var / k).sqrt()
}

pub fn scaling_fit(rows: &[SweepRow]) -> Result<ScalingFit> {
    let points: Vec<ScalingPoint> = rows
        .iter()
        .map(|r| ScalingPoint { n_segments: r.n_segments, mean_f: r.mean_f, std_f: r.std_f })
        .collect();
    fit_scaling_laws(&points)
}

/// Write `sweep_{kind}.csv` with the grid column named after the sweep.
pub fn write_rows(path: &Path, kind: SweepKind, rows: &[SweepRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let mut header = vec!["n_segments", "n_designs"];
    if kind != SweepKind::N {
        header.push(kind.column());
    }
    header.extend([
        "mean_F",
        "std_F",
        "stderr_F",
        "ensemble_stderr_F",
        "ensemble_stderr_std_F",
        "power_loss",
        "clamp_rate",
    ]);
    w.write_record(&header)?;
    for r in rows {
        let mut rec = vec![r.n_segments.to_string(), r.n_designs.to_string()];
        if kind != SweepKind::N {
            rec.push(r.value.to_string());
        }
        rec.extend(
            [r.mean_f, r.std_f, r.stderr_f, r.ensemble_stderr_f, r.ensemble_stderr_std_f, r.power_loss, r.clamp_rate]
                .map(|v| v.to_string()),
        );
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_match_documented_grids() {
        let c = SweepConfig::default();
        assert_eq!(c.n_values, [1, 3, 5, 7, 10, 20, 50, 100]);
        assert_eq!(c.sigma_percent.len(), 10);
        assert_eq!(c.sigma_percent[0], 1.0);
        assert_eq!(c.mu_values[0], 0.0);
    }

    #[test]
    fn empty_grid_rejected() {
        let c = SweepConfig { n_values: vec![], ..Default::default() };
        assert!(matches!(c.validate(SweepKind::N), Err(Error::Config(_))));
    }

    #[test]
    fn n_is_filled_into_the_base() {
        let c = SweepConfig { optimize: Some(serde_json::json!({"gate": "X", "epochs": 7})), ..Default::default() };
        let oc = c.optimize_config(Some(5)).unwrap();
        assert_eq!(oc.n_segments, 5);
        assert_eq!(oc.epochs, 7);
    }

    #[test]
    fn stderr_of_constant_is_zero() {
        assert_eq!(sample_stderr(&[0.5; 4]), 0.0);
        assert_eq!(sample_stderr(&[1.0]), 0.0);
        assert!((sample_stderr(&[0.0, 2.0]) - 1.0).abs() < 1e-15);
    }
}
