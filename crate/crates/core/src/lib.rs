// Copyright 2026 The segwave Authors
// SPDX-License-Identifier: Apache-2.0

//! Composite-segmented dual-rail photonic gates: coupled-mode propagation,
//! width-noise statistics, Fresnel loss, and regularized optimization.

pub mod cmt;
pub mod coupling;
pub mod error;
pub mod metrics;
pub mod noise;
pub mod optimizer;
pub mod seed;

pub use cmt::{ideal_gate, Design, GateSpec, Segment, Unitary2};
pub use coupling::{CouplingMap, MapSpec};
pub use error::{Error, Result};
pub use noise::{CorrelationMode, NoiseSpec};
