// Copyright 2026 The segwave Authors
// SPDX-License-Identifier: Apache-2.0

use segwave_core::coupling::{default_linbo3_map, CouplingMap, CouplingTable, MapSpec};
use segwave_core::noise::{correlation_matrix, sample_width_errors};
use segwave_core::optimizer::{optimize_with_map, OptimizeConfig};
use segwave_core::{CorrelationMode, GateSpec, NoiseSpec};

#[test]
fn generated_table_survives_disk() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.csv");
    let surrogate = default_linbo3_map();
    let table = surrogate.to_table(5.0).unwrap();
    assert_eq!(table.shape(), (71, 71));
    table.save(&path).unwrap();
    let back = CouplingTable::load(&path).unwrap();
    assert_eq!(back, table);
    for r in back.records().step_by(97) {
        assert_eq!(back.lookup(r.w0_nm, r.w1_nm).unwrap(), surrogate.lookup(r.w0_nm, r.w1_nm).unwrap());
    }
    assert!(back.lookup(499.0, 600.0).is_err());
}

#[test]
fn optimizer_runs_on_a_table_map() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.csv");
    default_linbo3_map().to_table(10.0).unwrap().save(&path).unwrap();
    let mut c = OptimizeConfig::new(GateSpec::named("X"), 2);
    c.map = MapSpec::Table { path: path.clone() };
    c.epochs = 150;
    c.restarts = 2;
    c.eval_samples = 10;
    let map = c.map.build().unwrap();
    assert!(!map.has_analytic_jacobian());
    let d = optimize_with_map(&c, map.as_ref()).unwrap();
    assert!(d.report.mean_f > 0.99, "{}", d.report.mean_f);
    assert_eq!(d.material, "table");
}

#[test]
fn sample_covariance_matches_correlation_model() {
    let (n, sigma, samples) = (4, 10.0, 200_000);
    for mu in [0.0, 0.5, 2.0] {
        let spec = NoiseSpec::new(sigma, CorrelationMode::CorrelationMu(mu), 21).unwrap();
        let batch = sample_width_errors(&spec, n, samples).unwrap();
        let rho = correlation_matrix(n, mu);
        for k in 0..n {
            for l in 0..n {
                let cov = batch.rows().map(|r| r[k] * r[l]).sum::<f64>() / samples as f64;
                let target = sigma * sigma * rho[(k, l)];
                assert!((cov - target).abs() < 0.02 * sigma * sigma, "μ={mu} ({k},{l}): {cov} vs {target}");
            }
        }
    }
}

#[test]
fn fully_correlated_rows_are_constant() {
    let spec = NoiseSpec::new(12.0, CorrelationMode::FullyCorrelated, 8).unwrap();
    let batch = sample_width_errors(&spec, 6, 1000).unwrap();
    assert!(batch.rows().all(|r| r.iter().all(|&v| v == r[0])));
    let var = batch.rows().map(|r| r[0] * r[0]).sum::<f64>() / 1000.0;
    assert!((var.sqrt() - 12.0).abs() < 1.0);
}

#[test]
fn same_seed_same_errors() {
    let spec = NoiseSpec::new(5.0, CorrelationMode::CorrelationMu(1.0), 3).unwrap();
    let a = sample_width_errors(&spec, 5, 100).unwrap();
    let b = sample_width_errors(&spec, 5, 100).unwrap();
    assert!(a.rows().zip(b.rows()).all(|(x, y)| x == y));
}
