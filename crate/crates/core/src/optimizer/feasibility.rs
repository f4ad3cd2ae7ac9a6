// Copyright 2026 The segwave Authors
// SPDX-License-Identifier: Apache-2.0

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cmt::{Design, Segment};
use crate::error::{Error, Result};
use crate::optimizer::OptimizeConfig;

pub const MAX_SEGMENTS: usize = 200;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum Infeasibility {
    MinLength { segment: usize, length_um: f64, min_um: f64 },
    Range { segment: usize, waveguide: usize, width_nm: f64, min_nm: f64, max_nm: f64 },
    SegmentCount { n_segments: usize },
}

impl fmt::Display for Infeasibility {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Infeasibility::MinLength { segment, length_um, min_um } => {
                write!(f, "segment {segment} is {length_um:.4} µm long, below the {min_um} µm minimum")
            }
            Infeasibility::Range { segment, waveguide, width_nm, min_nm, max_nm } => write!(
                f,
                "segment {segment} waveguide {waveguide} width {width_nm:.3} nm outside [{min_nm}, {max_nm}] nm"
            ),
            Infeasibility::SegmentCount { n_segments } => {
                write!(f, "{n_segments} segments outside [1, {MAX_SEGMENTS}]")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityVerdict {
    pub feasible: bool,
    pub reasons: Vec<Infeasibility>,
}

impl FeasibilityVerdict {
    pub fn summary(&self) -> String {
        if self.feasible {
            "feasible".into()
        } else {
            self.reasons.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
        }
    }
}

/// Manufacturability check against the configured limits.
pub fn feasibility_filter(design: &Design, config: &OptimizeConfig) -> FeasibilityVerdict {
    check_feasibility(design, config.w_min_nm, config.w_max_nm, config.min_segment_length_um)
}

/// Minimum segment length, width range, and segment count.
pub fn check_feasibility(design: &Design, w_min: f64, w_max: f64, min_length: f64) -> FeasibilityVerdict {
    let mut reasons = Vec::new();
    let n = design.len();
    if !(1..=MAX_SEGMENTS).contains(&n) {
        reasons.push(Infeasibility::SegmentCount { n_segments: n });
    }
    for (i, s) in design.segments().iter().enumerate() {
        if s.length_z < min_length {
            reasons.push(Infeasibility::MinLength { segment: i, length_um: s.length_z, min_um: min_length });
        }
        for (g, w) in s.widths().into_iter().enumerate() {
            if !(w_min..=w_max).contains(&w) {
                reasons.push(Infeasibility::Range { segment: i, waveguide: g, width_nm: w, min_nm: w_min, max_nm: w_max });
            }
        }
    }
    FeasibilityVerdict { feasible: reasons.is_empty(), reasons }
}

/// Round every width to the nearest multiple of `resolution` (ties up);
/// lengths are untouched.
pub fn quantize(design: &Design, resolution: f64) -> Result<Design> {
    if !(resolution.is_finite() && resolution > 0.0) {
        return Err(Error::Contract(format!("resolution must be positive, got {resolution}")));
    }
    let q = |w: f64| (w / resolution + 0.5).floor() * resolution;
    let segs = design
        .segments()
        .iter()
        .map(|s| Segment::new(q(s.width_0), q(s.width_1), s.length_z))
        .collect::<Result<Vec<_>>>()?;
    design.with_segments(segs)
}
