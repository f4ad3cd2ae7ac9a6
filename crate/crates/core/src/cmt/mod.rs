// Copyright 2026 The segwave Authors
// SPDX-License-Identifier: Apache-2.0

//! Designs, SU(2) propagators and state trajectories.

mod design;
mod gates;
mod matrix;
mod propagator;
mod trajectory;

pub use design::{Design, Geometry, Segment};
pub use gates::{ideal_gate, GateSpec};
pub use matrix::{Mat2, Unitary2, C64};
pub use propagator::{composite_unitary, segment_derivatives, segment_unitary, SegmentCoefficients, SegmentDerivatives};
pub use trajectory::{propagate_state, BlochTrajectory, QubitState, TrajectoryPoint};
