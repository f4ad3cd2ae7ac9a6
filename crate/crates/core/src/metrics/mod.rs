// Copyright 2026 The segwave Authors
// SPDX-License-Identifier: Apache-2.0

//! Fidelity, power loss, and scaling-law metrics.

mod fidelity;
mod power;
mod report;
mod scaling;

pub use fidelity::{
    fidelity_for_batch, fidelity_samples, fidelity_statistics, gate_fidelity, realized_coefficients, FidelityStats,
};
pub use power::{
    adiabaticity_metric, asymptotic_power_loss, design_power_loss, fresnel_transmission, power_loss_for_coefficients,
    FresnelPolicy, PowerLossOptions, PowerLossReport,
};
pub(crate) use power::{adiabaticity_argmax, interface_transmissions};
pub use report::{evaluate_design, EvaluateOptions, EvaluationReport};
pub use scaling::{fit_scaling_laws, ScalingFit, ScalingPoint};
