// Copyright 2026 The segwave Authors
// SPDX-License-Identifier: Apache-2.0

use serde::{Deserialize, Serialize};

use crate::cmt::{ideal_gate, Design, QubitState, SegmentCoefficients};
use crate::coupling::{lookup_clamped, CouplingMap};
use crate::error::Result;
use crate::metrics::{adiabaticity_metric, fidelity_samples, interface_transmissions};
use crate::noise::ErrorBatch;
use crate::optimizer::{OptimizeConfig, Regularizer};

/// Cost value and its parts.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CostBreakdown {
    pub total: f64,
    /// `1 − E[F]` over the batch.
    pub fidelity_loss: f64,
    /// Weighted range penalty.
    pub range: f64,
    /// Weighted regularizer (`λ_R·R` or `λ_A·A`; 0 for baseline).
    pub regularizer: f64,
    /// Unweighted R or A.
    pub regularizer_raw: f64,
}

/// Partial derivatives of a scalar with respect to every segment's two
/// widths (per nm) and length (per µm).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DesignGradient {
    pub width_0: Vec<f64>,
    pub width_1: Vec<f64>,
    pub length: Vec<f64>,
}

impl DesignGradient {
    pub fn zeros(n: usize) -> Self {
        DesignGradient {
            width_0: vec![0.0; n],
            width_1: vec![0.0; n],
            length: vec![0.0; n],
        }
    }

    pub fn len(&self) -> usize {
        self.length.len()
    }

    pub fn is_empty(&self) -> bool {
        self.length.is_empty()
    }

    /// `(W⁰_i, W¹_i, z_i)` interleaved per segment.
    pub fn to_flat(&self) -> Vec<f64> {
        (0..self.len())
            .flat_map(|i| [self.width_0[i], self.width_1[i], self.length[i]])
            .collect()
    }

    pub(crate) fn add_scaled(&mut self, other: &DesignGradient, s: f64) {
        for (a, b) in [
            (&mut self.width_0, &other.width_0),
            (&mut self.width_1, &other.width_1),
            (&mut self.length, &other.length),
        ] {
            for (x, y) in a.iter_mut().zip(b) {
                *x += s * y;
            }
        }
    }
}

/// `λ_W Σ (max(W − W_max, 0)² + max(W_min − W, 0)²)` over both waveguides.
pub fn range_penalty(design: &Design, w_min: f64, w_max: f64, lambda_w: f64) -> f64 {
    let hinge = |w: f64| (w - w_max).max(0.0).powi(2) + (w_min - w).max(0.0).powi(2);
    lambda_w
        * design
            .segments()
            .iter()
            .map(|s| hinge(s.width_0) + hinge(s.width_1))
            .sum::<f64>()
}

pub fn range_penalty_gradient(design: &Design, w_min: f64, w_max: f64, lambda_w: f64) -> DesignGradient {
    let d = |w: f64| 2.0 * lambda_w * ((w - w_max).max(0.0) - (w_min - w).max(0.0));
    let mut g = DesignGradient::zeros(design.len());
    for (i, s) in design.segments().iter().enumerate() {
        g.width_0[i] = d(s.width_0);
        g.width_1[i] = d(s.width_1);
    }
    g
}

pub(crate) fn nominal_clamped(design: &Design, map: &dyn CouplingMap) -> Vec<SegmentCoefficients> {
    design
        .segments()
        .iter()
        .map(|s| lookup_clamped(map, s.width_0, s.width_1).0)
        .collect()
}

/// Unweighted regularizer of the configured mode at nominal widths.
pub fn regularizer_value(design: &Design, map: &dyn CouplingMap, config: &OptimizeConfig) -> f64 {
    match config.regularizer {
        Regularizer::Baseline => 0.0,
        Regularizer::Adiabatic => adiabaticity_metric(design),
        Regularizer::Fresnel => {
            let coeffs = nominal_clamped(design, map);
            let lengths: Vec<f64> = design.segments().iter().map(|s| s.length_z).collect();
            let t = interface_transmissions(&lengths, &coeffs, config.fresnel_policy, &QubitState::zero());
            1.0 - t.iter().product::<f64>()
        }
    }
}

pub(crate) fn regularizer_weight(config: &OptimizeConfig) -> f64 {
    match config.regularizer {
        Regularizer::Baseline => 0.0,
        Regularizer::Fresnel => config.lambda_r,
        Regularizer::Adiabatic => config.lambda_a,
    }
}

/// `L_F + L_Ω + λ·(R or A)` with `L_F` averaged over `batch`.
pub fn total_cost(
    design: &Design,
    map: &dyn CouplingMap,
    config: &OptimizeConfig,
    batch: &ErrorBatch,
) -> Result<CostBreakdown> {
    let ideal = ideal_gate(&config.gate)?;
    let (values, _) = fidelity_samples(design, map, &ideal, batch)?;
    let mean_f = values.iter().sum::<f64>() / values.len() as f64;
    let fidelity_loss = 1.0 - mean_f;
    let range = range_penalty(design, config.w_min_nm, config.w_max_nm, config.lambda_w);
    let regularizer_raw = regularizer_value(design, map, config);
    let regularizer = regularizer_weight(config) * regularizer_raw;
    Ok(CostBreakdown {
        total: fidelity_loss + range + regularizer,
        fidelity_loss,
        range,
        regularizer,
        regularizer_raw,
    })
}
