// Copyright 2026 The segwave Authors
// SPDX-License-Identifier: Apache-2.0

//! Correlated Gaussian width-error sampling.
//!
//! Each segment receives one width error δW, applied to both of its
//! waveguides. Errors across segments are either fully correlated (one
//! draw per sample) or correlated through
//! `ρ_kl = 1 / ((|k−l| + ½)^{2μ} + 1)`.

use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::cmt::Design;
use crate::error::{Error, Result};
use crate::seed::rng_from_seed;

/// Inter-segment correlation structure.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorrelationMode {
    /// One error per sample, shared by every segment.
    #[default]
    FullyCorrelated,
    /// Covariance `σ²·ρ(μ)`.
    CorrelationMu(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    /// Standard deviation of the width error (nm).
    pub sigma: f64,
    #[serde(default)]
    pub mode: CorrelationMode,
    #[serde(default)]
    pub seed: u64,
}

impl NoiseSpec {
    pub fn new(sigma: f64, mode: CorrelationMode, seed: u64) -> Result<Self> {
        let s = NoiseSpec { sigma, mode, seed };
        s.validate()?;
        Ok(s)
    }

    pub fn noiseless() -> Self {
        NoiseSpec {
            sigma: 0.0,
            mode: CorrelationMode::FullyCorrelated,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma.is_finite() && self.sigma >= 0.0) {
            return Err(Error::Config(format!("noise sigma must be ≥ 0, got {}", self.sigma)));
        }
        if let CorrelationMode::CorrelationMu(mu) = self.mode {
            if !(mu.is_finite() && mu >= 0.0) {
                return Err(Error::Config(format!("correlation mu must be ≥ 0, got {mu}")));
            }
        }
        Ok(())
    }
}

/// Inter-segment error correlation matrix.
pub fn correlation_matrix(n: usize, mu: f64) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |k, l| {
        if k == l {
            1.0
        } else {
            let d = k.abs_diff(l) as f64 + 0.5;
            1.0 / (d.powf(2.0 * mu) + 1.0)
        }
    })
}

const CLIP_WARN: f64 = -1e-10;

/// Clip negative eigenvalues to zero and rescale to unit diagonal.
/// Returns the repaired matrix and whether anything was clipped.
pub fn repair_correlation(rho: &DMatrix<f64>) -> (DMatrix<f64>, bool) {
    let eig = SymmetricEigen::new(rho.clone());
    let min = eig.eigenvalues.min();
    if min >= 0.0 {
        return (rho.clone(), false);
    }
    if min < CLIP_WARN {
        log::warn!("correlation matrix has eigenvalue {min:.3e}; clipping to PSD");
    }
    let clipped = eig.eigenvalues.map(|v| v.max(0.0));
    let m = &eig.eigenvectors * DMatrix::from_diagonal(&clipped) * eig.eigenvectors.transpose();
    let scale = DVector::from_iterator(m.nrows(), m.diagonal().iter().map(|d| 1.0 / d.sqrt()));
    let m = DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)] * scale[i] * scale[j]);
    (m, true)
}

/// Lower Cholesky factor of a correlation matrix, adding the smallest
/// diagonal jitter that makes a (repaired) singular matrix factorable.
fn correlation_factor(rho: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let (m, _) = repair_correlation(rho);
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::NotPositiveDefinite("non-finite entries after repair".into()));
    }
    for jitter in [0.0, 1e-14, 1e-12, 1e-10, 1e-8] {
        let shifted = &m + DMatrix::identity(m.nrows(), m.ncols()) * jitter;
        if let Some(ch) = Cholesky::new(shifted) {
            if jitter > 0.0 {
                log::debug!("correlation factor needed diagonal jitter {jitter:e}");
            }
            return Ok(ch.unpack());
        }
    }
    Err(Error::NotPositiveDefinite("Cholesky failed even with 1e-8 jitter".into()))
}

/// `n_samples × n_segments` width errors (nm), row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorBatch {
    n_segments: usize,
    data: Vec<f64>,
}

impl ErrorBatch {
    pub fn zeros(n_samples: usize, n_segments: usize) -> Self {
        ErrorBatch {
            n_segments,
            data: vec![0.0; n_samples * n_segments],
        }
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n_segments = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != n_segments) {
            return Err(Error::Contract("ragged error batch".into()));
        }
        Ok(ErrorBatch {
            n_segments,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn n_samples(&self) -> usize {
        self.data.len().checked_div(self.n_segments).unwrap_or(0)
    }

    pub fn n_segments(&self) -> usize {
        self.n_segments
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n_segments..(i + 1) * self.n_segments]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.n_segments.max(1))
    }
}

/// Reusable sampler for a fixed (σ, mode, N).
#[derive(Debug, Clone)]
pub struct WidthSampler {
    sigma: f64,
    n_segments: usize,
    factor: Option<DMatrix<f64>>,
}

impl WidthSampler {
    pub fn new(sigma: f64, mode: CorrelationMode, n_segments: usize) -> Result<Self> {
        NoiseSpec { sigma, mode, seed: 0 }.validate()?;
        if n_segments == 0 {
            return Err(Error::Contract("cannot sample errors for zero segments".into()));
        }
        let factor = match mode {
            CorrelationMode::FullyCorrelated => None,
            CorrelationMode::CorrelationMu(mu) => Some(correlation_factor(&correlation_matrix(n_segments, mu))?),
        };
        Ok(WidthSampler {
            sigma,
            n_segments,
            factor,
        })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, n_samples: usize) -> ErrorBatch {
        let n = self.n_segments;
        let mut batch = ErrorBatch::zeros(n_samples, n);
        if self.sigma == 0.0 {
            return batch;
        }
        let mut z = vec![0.0; n];
        for row in batch.data.chunks_exact_mut(n) {
            match &self.factor {
                None => {
                    let e: f64 = rng.sample(StandardNormal);
                    row.fill(self.sigma * e);
                }
                Some(l) => {
                    for v in z.iter_mut() {
                        *v = rng.sample(StandardNormal);
                    }
                    for (i, out) in row.iter_mut().enumerate() {
                        let mut acc = 0.0;
                        for (j, zj) in z.iter().enumerate().take(i + 1) {
                            acc += l[(i, j)] * zj;
                        }
                        *out = self.sigma * acc;
                    }
                }
            }
        }
        batch
    }
}

/// Draw `n_samples` error vectors for an `n_segments` design, seeded by
/// `spec.seed`.
pub fn sample_width_errors(spec: &NoiseSpec, n_segments: usize, n_samples: usize) -> Result<ErrorBatch> {
    let sampler = WidthSampler::new(spec.sigma, spec.mode, n_segments)?;
    Ok(sampler.sample(&mut rng_from_seed(spec.seed), n_samples))
}

/// Noise level as a percentage of the design's mean width.
pub fn sigma_percent(design: &Design, sigma: f64) -> f64 {
    100.0 * sigma / design.mean_width()
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;
    use crate::cmt::Segment;

    #[test]
    fn mu_zero_off_diagonals_are_half() {
        let r = correlation_matrix(6, 0.0);
        for k in 0..6 {
            for l in 0..6 {
                assert_eq!(r[(k, l)], if k == l { 1.0 } else { 0.5 });
            }
        }
    }

    #[test]
    fn mu_one_neighbour_value() {
        let r = correlation_matrix(4, 1.0);
        assert!((r[(0, 1)] - 1.0 / (1.5f64.powi(2) + 1.0)).abs() < 1e-15);
        assert!((r[(2, 1)] - 0.307_692_307_692_307_7).abs() < 1e-15);
    }

    #[test]
    fn zero_sigma_gives_zero_samples() {
        for mode in [CorrelationMode::FullyCorrelated, CorrelationMode::CorrelationMu(1.0)] {
            let b = sample_width_errors(&NoiseSpec::new(0.0, mode, 3).unwrap(), 5, 100).unwrap();
            assert!(b.rows().all(|r| r.iter().all(|&v| v == 0.0)));
        }
    }

    #[test]
    fn fully_correlated_rows_are_constant() {
        let b = sample_width_errors(&NoiseSpec::new(30.0, CorrelationMode::FullyCorrelated, 11).unwrap(), 7, 200).unwrap();
        assert_eq!(b.n_samples(), 200);
        for r in b.rows() {
            assert!(r.iter().all(|&v| v == r[0]));
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let spec = NoiseSpec::new(20.0, CorrelationMode::CorrelationMu(0.7), 42).unwrap();
        assert_eq!(sample_width_errors(&spec, 8, 50).unwrap(), sample_width_errors(&spec, 8, 50).unwrap());
        let other = NoiseSpec { seed: 43, ..spec };
        assert_ne!(sample_width_errors(&spec, 8, 50).unwrap(), sample_width_errors(&other, 8, 50).unwrap());
    }

    #[test]
    fn sigma_percent_examples() {
        let d = Design::from_segments(vec![Segment::new(600.0, 600.0, 5.0).unwrap()]).unwrap();
        assert_eq!(sigma_percent(&d, 30.0), 5.0);
        let d = Design::from_segments(vec![
            Segment::new(500.0, 500.0, 5.0).unwrap(),
            Segment::new(700.0, 700.0, 5.0).unwrap(),
        ])
        .unwrap();
        assert_eq!(sigma_percent(&d, 30.0), 5.0);
        let d = Design::from_segments(vec![Segment::new(640.0, 640.0, 5.0).unwrap()]).unwrap();
        assert_eq!(sigma_percent(&d, 16.0), 100.0 * 16.0 / 640.0);
    }

    #[test]
    fn repair_restores_unit_diagonal() {
        // Indefinite "correlation" matrix.
        let m = DMatrix::from_row_slice(3, 3, &[1.0, 0.9, -0.9, 0.9, 1.0, 0.9, -0.9, 0.9, 1.0]);
        let (r, clipped) = repair_correlation(&m);
        assert!(clipped);
        for i in 0..3 {
            assert!((r[(i, i)] - 1.0).abs() < 1e-12);
        }
        assert!(SymmetricEigen::new(r.clone()).eigenvalues.min() > -1e-12);
        assert!(correlation_factor(&m).is_ok());
    }

    #[test]
    fn empirical_correlation_matches_rho_at_mu_zero() {
        let n = 10;
        let spec = NoiseSpec::new(1.0, CorrelationMode::CorrelationMu(0.0), 2024).unwrap();
        let b = sample_width_errors(&spec, n, 100_000).unwrap();
        let rho = correlation_matrix(n, 0.0);
        let m = b.n_samples() as f64;
        let means: Vec<f64> = (0..n).map(|k| b.rows().map(|r| r[k]).sum::<f64>() / m).collect();
        for k in 0..n {
            for l in 0..n {
                let cov = b.rows().map(|r| (r[k] - means[k]) * (r[l] - means[l])).sum::<f64>() / m;
                let vk = b.rows().map(|r| (r[k] - means[k]).powi(2)).sum::<f64>() / m;
                let vl = b.rows().map(|r| (r[l] - means[l]).powi(2)).sum::<f64>() / m;
                let corr = cov / (vk * vl).sqrt();
                assert!((corr - rho[(k, l)]).abs() < 0.02, "({k},{l}) {corr}");
            }
        }
    }

    #[test]
    fn marginals_have_zero_mean_and_sigma_squared_variance() {
        let sigma = 30.0;
        for mode in [CorrelationMode::FullyCorrelated, CorrelationMode::CorrelationMu(1.5)] {
            let b = sample_width_errors(&NoiseSpec::new(sigma, mode, 9).unwrap(), 6, 100_000).unwrap();
            let m = b.n_samples() as f64;
            for k in 0..6 {
                let mean = b.rows().map(|r| r[k]).sum::<f64>() / m;
                let var = b.rows().map(|r| (r[k] - mean).powi(2)).sum::<f64>() / m;
                assert!(mean.abs() < 4.0 * sigma / m.sqrt(), "{mode:?} mean {mean}");
                assert!((var / (sigma * sigma) - 1.0).abs() < 0.05, "{mode:?} var {var}");
            }
        }
    }

    #[test]
    fn noise_spec_json() {
        let s: NoiseSpec = serde_json::from_str(r#"{"sigma":30,"mode":{"correlation_mu":2.0},"seed":5}"#).unwrap();
        assert_eq!(s.mode, CorrelationMode::CorrelationMu(2.0));
        let s: NoiseSpec = serde_json::from_str(r#"{"sigma":30,"mode":"fully_correlated"}"#).unwrap();
        assert_eq!(s.mode, CorrelationMode::FullyCorrelated);
    }

    proptest! {
        #[test]
        fn rho_decreases_in_mu(d in 1usize..20, mu in 0.0f64..5.0, dmu in 0.01f64..2.0) {
            let r1 = correlation_matrix(d + 1, mu)[(0, d)];
            let r2 = correlation_matrix(d + 1, mu + dmu)[(0, d)];
            prop_assert!(r2 < r1);
        }

        #[test]
        fn rho_vanishes_for_large_mu(d in 1usize..10) {
            prop_assert!(correlation_matrix(d + 1, 40.0)[(0, d)] < 1e-6);
        }

        #[test]
        fn rho_is_symmetric(n in 1usize..15, mu in 0.0f64..4.0) {
            let r = correlation_matrix(n, mu);
            prop_assert_eq!(r.clone(), r.transpose());
        }
    }
}
