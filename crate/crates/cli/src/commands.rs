// Copyright 2026 The segwave Authors
// SPDX-License-Identifier: Apache-2.0

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use segwave_core::coupling::{MapSpec, SurrogateParams};
use segwave_core::metrics::{design_power_loss, evaluate_design, EvaluateOptions, EvaluationReport, PowerLossOptions};
use segwave_core::optimizer::{optimize, OptimizeConfig, OptimizedDesign};
use segwave_core::cmt::{propagate_state, QubitState};
use segwave_core::{ideal_gate, Error, Result};

use crate::eval_config::EvalConfig;
use crate::io::{ensure_dir, read_json, write_csv, write_json, DesignInput};
use crate::sweep::{run_sweep, scaling_fit, sweep_designs, write_rows, SweepConfig, SweepKind};
use crate::table::{collect_rows, render_text, write_table_csv};

pub const PAPER_SCALE_EPOCHS: usize = 5000;
pub const PAPER_SCALE_BATCH: usize = 1024;
pub const MIN_TRAJECTORY_SUBSTEPS: usize = 32;

/// Flags shared by every command.
#[derive(Debug, Clone, PartialEq)]
pub struct Globals {
    pub config: Option<PathBuf>,
    pub out: PathBuf,
    pub seed: Option<u64>,
    pub paper_scale: bool,
    pub calibration_factor: f64,
}

impl Default for Globals {
    fn default() -> Self {
        Globals { config: None, out: PathBuf::from("out"), seed: None, paper_scale: false, calibration_factor: 1.0 }
    }
}

impl Globals {
    fn calibration(&self) -> Result<Option<f64>> {
        let c = self.calibration_factor;
        if !(c.is_finite() && c >= 0.0) {
            return Err(Error::Config(format!("calibration factor must be non-negative, got {c}")));
        }
        Ok((c != 1.0).then_some(c))
    }

    fn require_config(&self, command: &str) -> Result<&Path> {
        self.config
            .as_deref()
            .ok_or_else(|| Error::Config(format!("`{command}` needs --config PATH")))
    }
}

/// Seed actually used by a command: the flag overrides the config.
pub fn effective_seed(globals: &Globals, config_seed: u64) -> u64 {
    globals.seed.unwrap_or(config_seed)
}

pub fn load_optimize_config(globals: &Globals) -> Result<OptimizeConfig> {
    let mut c = OptimizeConfig::load(globals.require_config("optimize")?)?;
    c.seed = effective_seed(globals, c.seed);
    if globals.paper_scale {
        c.epochs = PAPER_SCALE_EPOCHS;
        c.batch_size = PAPER_SCALE_BATCH;
    }
    c.validate()?;
    Ok(c)
}

fn apply_calibration(report: &mut EvaluationReport, design: &OptimizedDesign, factor: Option<f64>) -> Result<()> {
    let Some(c) = factor else { return Ok(()) };
    let map = design.config.map.build()?;
    let opts = PowerLossOptions {
        policy: design.config.fresnel_policy,
        calibration_factor: Some(c),
        clamp_to_domain: true,
        ..Default::default()
    };
    let p = design_power_loss(&design.design, map.as_ref(), &opts)?;
    report.calibration_factor = p.calibration_factor;
    report.calibrated_power_loss = p.calibrated_loss;
    Ok(())
}

fn write_optimized(out: &Path, mut d: OptimizedDesign) -> Result<()> {
    let trace = std::mem::take(&mut d.cost_trace);
    write_json(&out.join("design.json"), &d)?;
    write_json(&out.join("report.json"), &d.report)?;
    let rows: Vec<TraceRow> = trace
        .iter()
        .map(|t| {
            let c = &t.cost;
            (t.epoch, t.lr, c.total, c.fidelity_loss, c.range, c.regularizer, c.regularizer_raw)
        })
        .collect();
    write_csv(&out.join("trace.csv"), &rows, &TRACE_HEADER)
}

type TraceRow = (usize, f64, f64, f64, f64, f64, f64);
const TRACE_HEADER: [&str; 7] = ["epoch", "lr", "total", "fidelity_loss", "range", "regularizer", "regularizer_raw"];

/// `optimize`: design.json, report.json and trace.csv. When every restart
/// is infeasible the best candidate is still written before failing.
pub fn cmd_optimize(globals: &Globals) -> Result<u64> {
    let config = load_optimize_config(globals)?;
    ensure_dir(&globals.out)?;
    let calibration = globals.calibration()?;
    match optimize(&config) {
        Ok(mut d) => {
            let mut report = d.report.clone();
            apply_calibration(&mut report, &d, calibration)?;
            d.report = report;
            log::info!("mean fidelity {:.6}, power loss {:.4e}", d.report.mean_f, d.report.power_loss);
            write_optimized(&globals.out, d)?;
            Ok(config.seed)
        }
        Err(Error::AllInfeasible { restarts, reasons, mut best }) => {
            let mut report = best.report.clone();
            apply_calibration(&mut report, &best, calibration)?;
            best.report = report;
            write_optimized(&globals.out, (*best).clone())?;
            Err(Error::AllInfeasible { restarts, reasons, best })
        }
        Err(e) => Err(e),
    }
}

fn map_for(eval: &EvalConfig, input: &DesignInput) -> MapSpec {
    eval.map.clone().or_else(|| input.config().map(|c| c.map.clone())).unwrap_or_default()
}

/// `evaluate`: report.json for a design file.
pub fn cmd_evaluate(globals: &Globals, design_path: &Path) -> Result<u64> {
    let input = DesignInput::load(design_path)?;
    let eval: EvalConfig = match &globals.config {
        Some(p) => read_json(p)?,
        None => EvalConfig::default(),
    };
    let resolved = eval.resolve(input.config())?;
    let seed = effective_seed(globals, resolved.seed);
    let map = resolved.map.build()?;
    let domain = map.domain();
    let reference = 0.5 * (domain.w0.0 + domain.w0.1);
    let options = EvaluateOptions {
        noise: resolved.noise.to_spec(reference, seed)?,
        n_samples: resolved.n_samples,
        power: PowerLossOptions {
            policy: resolved.fresnel_policy,
            calibration_factor: globals.calibration()?,
            clamp_to_domain: true,
            ..Default::default()
        },
        power_under_noise: resolved.power_under_noise,
    };
    let report = evaluate_design(input.design(), map.as_ref(), &ideal_gate(&resolved.gate)?, &options)?;
    ensure_dir(&globals.out)?;
    write_json(&globals.out.join("report.json"), &report)?;
    Ok(seed)
}

/// `sweep-n`, `sweep-mu`, `sweep-sigma`.
pub fn cmd_sweep(globals: &Globals, kind: SweepKind) -> Result<u64> {
    let config: SweepConfig = read_json(globals.require_config("sweep")?)?;
    config.validate(kind)?;
    let base_seed = match &config.optimize {
        Some(v) => v.get("seed").and_then(serde_json::Value::as_u64).unwrap_or(0),
        None => 0,
    };
    let seed = effective_seed(globals, base_seed);
    let mut config = config;
    if globals.paper_scale {
        if let Some(obj) = config.optimize.as_mut().and_then(|v| v.as_object_mut()) {
            obj.insert("epochs".into(), PAPER_SCALE_EPOCHS.into());
            obj.insert("batch_size".into(), PAPER_SCALE_BATCH.into());
        }
    }
    ensure_dir(&globals.out)?;
    let designs = sweep_designs(&config, kind, seed)?;
    if config.designs.is_empty() {
        let dir = globals.out.join("designs");
        ensure_dir(&dir)?;
        for d in &designs {
            let mut d = d.clone();
            d.cost_trace.clear();
            write_json(&dir.join(format!("N{:03}_r{:02}.json", d.n_segments, d.restart)), &d)?;
        }
    }
    let rows = run_sweep(&config, kind, &designs, seed)?;
    let name = match kind {
        SweepKind::N => "sweep_n.csv",
        SweepKind::Mu => "sweep_mu.csv",
        SweepKind::Sigma => "sweep_sigma.csv",
    };
    write_rows(&globals.out.join(name), kind, &rows)?;
    if kind == SweepKind::N {
        match scaling_fit(&rows) {
            Ok(fit) => write_json(&globals.out.join("scaling_fit.json"), &fit)?,
            Err(e) => log::warn!("no scaling fit: {e}"),
        }
    }
    Ok(seed)
}

/// `table`: table.csv and table.txt from a directory of optimizer outputs.
pub fn cmd_table(globals: &Globals, designs_dir: &Path) -> Result<u64> {
    let rows = collect_rows(designs_dir)?;
    ensure_dir(&globals.out)?;
    let csv_path = globals.out.join("table.csv");
    let f = File::create(&csv_path).map_err(|e| Error::io(&csv_path, e))?;
    write_table_csv(&rows, BufWriter::new(f))?;
    let txt_path = globals.out.join("table.txt");
    std::fs::write(&txt_path, render_text(&rows)).map_err(|e| Error::io(&txt_path, e))?;
    Ok(globals.seed.unwrap_or(0))
}

/// `trajectory`: Bloch-vector samples through a design's nominal path.
pub fn cmd_trajectory(globals: &Globals, design_path: &Path, state: &str, substeps: usize) -> Result<u64> {
    if substeps < MIN_TRAJECTORY_SUBSTEPS {
        return Err(Error::Config(format!("substeps must be at least {MIN_TRAJECTORY_SUBSTEPS}, got {substeps}")));
    }
    let input = DesignInput::load(design_path)?;
    let eval: EvalConfig = match &globals.config {
        Some(p) => read_json(p)?,
        None => EvalConfig::default(),
    };
    let map = map_for(&eval, &input).build()?;
    let initial = QubitState::parse(state)?;
    let traj = propagate_state(input.design(), map.as_ref(), &initial, substeps)?;
    ensure_dir(&globals.out)?;
    let path = globals.out.join("trajectory.csv");
    let f = File::create(&path).map_err(|e| Error::io(&path, e))?;
    traj.write_csv(BufWriter::new(f))?;
    Ok(globals.seed.unwrap_or(0))
}

fn default_step() -> f64 {
    5.0
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurrogateTableConfig {
    #[serde(default)]
    pub map: MapSpec,
    #[serde(default = "default_step")]
    pub step_nm: f64,
}

impl Default for SurrogateTableConfig {
    fn default() -> Self {
        SurrogateTableConfig { map: MapSpec::default(), step_nm: default_step() }
    }
}

fn surrogate_params(map: &MapSpec) -> Result<SurrogateParams> {
    match map {
        MapSpec::Silicon => Ok(SurrogateParams::silicon()),
        MapSpec::Linbo3 => Ok(SurrogateParams::linbo3()),
        MapSpec::Surrogate(p) => Ok(p.clone()),
        MapSpec::Table { .. } => Err(Error::Config("gen-surrogate-table needs a surrogate map, not a table".into())),
    }
}

/// `gen-surrogate-table`: tabulate a surrogate map as coupling_table.csv.
pub fn cmd_gen_surrogate_table(globals: &Globals, step_override: Option<f64>) -> Result<u64> {
    let mut config: SurrogateTableConfig = match &globals.config {
        Some(p) => read_json(p)?,
        None => SurrogateTableConfig::default(),
    };
    if let Some(s) = step_override {
        config.step_nm = s;
    }
    let surrogate = segwave_core::coupling::SurrogateMap::new(surrogate_params(&config.map)?)?;
    let table = surrogate.to_table(config.step_nm)?;
    ensure_dir(&globals.out)?;
    table.save(globals.out.join("coupling_table.csv"))?;
    Ok(globals.seed.unwrap_or(0))
}
