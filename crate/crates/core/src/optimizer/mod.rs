// Copyright 2026 The segwave Authors
// SPDX-License-Identifier: Apache-2.0

//! Regularized gradient-based design optimization.

mod adam;
mod config;
mod cost;
mod feasibility;
mod gradient;
mod run;

pub use adam::{cosine_lr, Adam};
pub use config::{NoiseConfig, OptimizeConfig, Regularizer};
pub use cost::{range_penalty, range_penalty_gradient, regularizer_value, total_cost, CostBreakdown, DesignGradient};
pub use feasibility::{check_feasibility, feasibility_filter, quantize, FeasibilityVerdict, Infeasibility, MAX_SEGMENTS};
pub use gradient::{cost_gradient, finite_difference_gradient, FD_LENGTH_STEP_UM, FD_WIDTH_STEP_NM};
pub use run::{
    optimize, optimize_ensemble, optimize_with_map, report_options, OptimizedDesign, QuantizedResult, TracePoint,
};
