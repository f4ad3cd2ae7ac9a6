// Copyright 2026 The segwave Authors
// SPDX-License-Identifier: Apache-2.0

//! Large-N scaling laws `E[F] ≈ 1 − a/N` and `σ[F] ∝ N^{−b}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingPoint {
    pub n_segments: usize,
    pub mean_f: f64,
    pub std_f: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub a: f64,
    /// Absent when fewer than two points have a positive std.
    pub b: Option<f64>,
    /// `(1 − mean_F) − a/N` per input point.
    pub residuals_a: Vec<f64>,
    /// `ln std_F − (c − b ln N)` per point with positive std.
    pub residuals_b: Vec<f64>,
}

/// Fits `a` through the origin on `(1/N, 1 − mean_F)` and `b` by log-log
/// regression of `std_F` against N.
pub fn fit_scaling_laws(points: &[ScalingPoint]) -> Result<ScalingFit> {
    if points.len() < 3 {
        return Err(Error::Degenerate(format!("scaling fit needs at least 3 points, got {}", points.len())));
    }
    let mut ns: Vec<usize> = points.iter().map(|p| p.n_segments).collect();
    ns.sort_unstable();
    ns.dedup();
    if ns.len() != points.len() || ns[0] == 0 {
        return Err(Error::Degenerate("scaling fit needs distinct positive N".into()));
    }
    if points.iter().any(|p| !(p.mean_f.is_finite() && p.std_f.is_finite())) {
        return Err(Error::Degenerate("non-finite fidelity in scaling input".into()));
    }

    let (mut sxy, mut sxx) = (0.0, 0.0);
    for p in points {
        let x = 1.0 / p.n_segments as f64;
        sxy += x * (1.0 - p.mean_f);
        sxx += x * x;
    }
    let a = sxy / sxx;
    let residuals_a = points
        .iter()
        .map(|p| (1.0 - p.mean_f) - a / p.n_segments as f64)
        .collect();

    let logs: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.std_f > 0.0)
        .map(|p| ((p.n_segments as f64).ln(), p.std_f.ln()))
        .collect();
    let (b, residuals_b) = if logs.len() >= 2 {
        let m = logs.len() as f64;
        let mx = logs.iter().map(|l| l.0).sum::<f64>() / m;
        let my = logs.iter().map(|l| l.1).sum::<f64>() / m;
        let sxx: f64 = logs.iter().map(|l| (l.0 - mx).powi(2)).sum();
        let sxy: f64 = logs.iter().map(|l| (l.0 - mx) * (l.1 - my)).sum();
        let slope = sxy / sxx;
        let intercept = my - slope * mx;
        let res = logs.iter().map(|l| l.1 - (intercept + slope * l.0)).collect();
        (Some(-slope), res)
    } else {
        (None, Vec::new())
    };

    Ok(ScalingFit { a, b, residuals_a, residuals_b })
}

#[cfg(test)]
mod tests {
    use rand::Rng;

    use super::*;
    use crate::seed::rng_from_seed;

    fn pts(mut f: impl FnMut(usize) -> (f64, f64)) -> Vec<ScalingPoint> {
        [1, 3, 5, 7, 10, 20, 50, 100]
            .into_iter()
            .map(|n| {
                let (m, s) = f(n);
                ScalingPoint { n_segments: n, mean_f: m, std_f: s }
            })
            .collect()
    }

    #[test]
    fn exact_recovery() {
        let p = pts(|n| (1.0 - 0.07 / n as f64, 0.2 * (n as f64).powf(-0.38)));
        let fit = fit_scaling_laws(&p).unwrap();
        assert!((fit.a - 0.07).abs() < 1e-10);
        assert!((fit.b.unwrap() - 0.38).abs() < 1e-10);
        assert!(fit.residuals_a.iter().all(|r| r.abs() < 1e-12));
    }

    #[test]
    fn jittered_recovery() {
        let mut rng = rng_from_seed(11);
        let p = pts(|n| (1.0 - 0.05 / n as f64 + rng.random_range(-1e-3..1e-3), 0.01));
        let fit = fit_scaling_laws(&p).unwrap();
        assert!((0.03..=0.07).contains(&fit.a), "a = {}", fit.a);
    }

    #[test]
    fn zero_std_leaves_b_absent() {
        let p = pts(|n| (1.0 - 0.1 / n as f64, 0.0));
        let fit = fit_scaling_laws(&p).unwrap();
        assert!(fit.b.is_none());
        assert!((fit.a - 0.1).abs() < 1e-12);
    }

    #[test]
    fn degenerate_inputs() {
        let p = pts(|n| (1.0 - 0.1 / n as f64, 0.01));
        assert!(fit_scaling_laws(&p[..2]).is_err());
        let dup = vec![p[0], p[0], p[1]];
        assert!(fit_scaling_laws(&dup).is_err());
    }
}
