// Copyright 2026 The segwave Authors
// SPDX-License-Identifier: Apache-2.0

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::matrix::{Mat2, Unitary2, C64};
use crate::error::{Error, Result};

/// Target single-qubit gate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GateSpec {
    Named(String),
    /// Rotation `exp(−i (angle/2) n̂·σ)` about `axis` (normalized on use).
    AxisAngle { axis: [f64; 3], angle: f64 },
}

impl GateSpec {
    pub fn named(name: &str) -> Self {
        GateSpec::Named(name.to_string())
    }

    /// Short label used in tables and file names; aliases collapse to one
    /// spelling (`H` → `Had`, `SX` → `sqrtX`).
    pub fn label(&self) -> String {
        match self {
            GateSpec::Named(n) => match n.as_str() {
                "I" | "id" | "identity" => "I".into(),
                "X" | "x" => "X".into(),
                "H" | "h" | "Had" | "hadamard" => "Had".into(),
                "sqrtX" | "SX" | "sx" => "sqrtX".into(),
                other => other.into(),
            },
            GateSpec::AxisAngle { axis, angle } => {
                format!("R[{},{},{}]({})", axis[0], axis[1], axis[2], angle)
            }
        }
    }
}

impl fmt::Display for GateSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl FromStr for GateSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let spec = GateSpec::named(s.trim());
        ideal_gate(&spec)?;
        Ok(spec)
    }
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// The ideal unitary for a gate specification.
///
/// `sqrtX` is the principal root `(1/2)[[1+i, 1−i], [1−i, 1+i]]`.
pub fn ideal_gate(spec: &GateSpec) -> Result<Unitary2> {
    let m = match spec {
        GateSpec::Named(name) => match name.as_str() {
            "I" | "id" | "identity" => Mat2::IDENTITY,
            "X" | "x" => Mat2::X,
            "H" | "h" | "Had" | "hadamard" => {
                let r = std::f64::consts::FRAC_1_SQRT_2;
                Mat2::new(c(r, 0.0), c(r, 0.0), c(r, 0.0), c(-r, 0.0))
            }
            "sqrtX" | "SX" | "sx" => Mat2::new(c(0.5, 0.5), c(0.5, -0.5), c(0.5, -0.5), c(0.5, 0.5)),
            other => return Err(Error::UnknownGate(other.to_string())),
        },
        GateSpec::AxisAngle { axis, angle } => {
            let norm = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
            if !(norm.is_finite() && norm > 0.0 && angle.is_finite()) {
                return Err(Error::UnknownGate(spec.label()));
            }
            let [nx, ny, nz] = axis.map(|a| a / norm);
            let (s, co) = (0.5 * angle).sin_cos();
            // cos(α/2) I − i sin(α/2) (nx X + ny Y + nz Z)
            Mat2::new(
                c(co, -s * nz),
                c(-s * ny, -s * nx),
                c(s * ny, -s * nx),
                c(co, s * nz),
            )
        }
    };
    Ok(Unitary2::from_mat_unchecked(m))
}
