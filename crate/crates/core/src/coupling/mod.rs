// Copyright 2026 The segwave Authors
// SPDX-License-Identifier: Apache-2.0

//! Width-pair → (κ, Δ, n_eff) maps.
//!
//! Two backends exist: a rectilinear lookup table with bilinear
//! interpolation (for mode-solver exports) and a closed-form surrogate
//! with analytic derivatives.

mod surrogate;
mod table;

use std::fmt;
use std::path::PathBuf;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use surrogate::{SurrogateMap, SurrogateParams};
pub use table::{CouplingTable, TableRecord};

use crate::cmt::SegmentCoefficients;
use crate::error::{Error, Result};

/// Rectangle of supported widths (nm), per waveguide.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WidthDomain {
    pub w0: (f64, f64),
    pub w1: (f64, f64),
}

impl WidthDomain {
    pub fn square(min: f64, max: f64) -> Self {
        WidthDomain {
            w0: (min, max),
            w1: (min, max),
        }
    }

    pub fn contains(&self, w0: f64, w1: f64) -> bool {
        (self.w0.0..=self.w0.1).contains(&w0) && (self.w1.0..=self.w1.1).contains(&w1)
    }

    /// Clamp into the domain, reporting which coordinates moved.
    pub fn clamp(&self, w0: f64, w1: f64) -> ([f64; 2], [bool; 2]) {
        let c0 = w0.clamp(self.w0.0, self.w0.1);
        let c1 = w1.clamp(self.w1.0, self.w1.1);
        ([c0, c1], [c0 != w0, c1 != w1])
    }

    pub(crate) fn range_error(&self, w0: f64, w1: f64) -> Error {
        let (min_nm, max_nm) = if (self.w0.0..=self.w0.1).contains(&w0) {
            self.w1
        } else {
            self.w0
        };
        Error::OutOfRange {
            w0_nm: w0,
            w1_nm: w1,
            min_nm,
            max_nm,
        }
    }
}

/// Partial derivatives of segment coefficients with respect to the two
/// widths (per nm).
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CoefficientJacobian {
    pub dkappa_dw: [f64; 2],
    pub ddelta_dw: [f64; 2],
    pub dn0_dw: [f64; 2],
    pub dn1_dw: [f64; 2],
}

/// A map from waveguide widths to segment coefficients.
pub trait CouplingMap: Send + Sync + fmt::Debug {
    fn domain(&self) -> WidthDomain;

    /// Coefficients at `(w0, w1)`; errors outside [`Self::domain`].
    fn lookup(&self, w0: f64, w1: f64) -> Result<SegmentCoefficients>;

    /// Whether [`Self::lookup_with_jacobian`] is available.
    fn has_analytic_jacobian(&self) -> bool {
        false
    }

    fn lookup_with_jacobian(&self, w0: f64, w1: f64) -> Result<(SegmentCoefficients, CoefficientJacobian)> {
        let _ = (w0, w1);
        Err(Error::Contract(format!("{self:?} has no analytic jacobian")))
    }
}

/// Look up after clamping into the domain.
pub fn lookup_clamped(map: &dyn CouplingMap, w0: f64, w1: f64) -> (SegmentCoefficients, [bool; 2]) {
    let ([c0, c1], clamped) = map.domain().clamp(w0, w1);
    let coeffs = map
        .lookup(c0, c1)
        .expect("clamped widths lie inside the map domain");
    (coeffs, clamped)
}

/// Which coupling map a run uses.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MapSpec {
    Silicon,
    #[default]
    Linbo3,
    Surrogate(SurrogateParams),
    Table { path: PathBuf },
}

impl MapSpec {
    pub fn build(&self) -> Result<Arc<dyn CouplingMap>> {
        Ok(match self {
            MapSpec::Silicon => Arc::new(default_silicon_map()),
            MapSpec::Linbo3 => Arc::new(default_linbo3_map()),
            MapSpec::Surrogate(p) => Arc::new(SurrogateMap::new(p.clone())?),
            MapSpec::Table { path } => Arc::new(CouplingTable::load(path)?),
        })
    }

    /// Material abbreviation used in design tables.
    pub fn material_label(&self) -> &'static str {
        match self {
            MapSpec::Silicon => "Si",
            MapSpec::Linbo3 => "Li",
            MapSpec::Surrogate(_) => "surrogate",
            MapSpec::Table { .. } => "table",
        }
    }
}

/// Silicon surrogate (n_core 3.48) over 500–850 nm at λ = 1.55 µm.
pub fn default_silicon_map() -> SurrogateMap {
    SurrogateMap::new(SurrogateParams::silicon()).expect("built-in silicon parameters are valid")
}

/// Lithium-niobate surrogate (n_core 2.21) over 500–850 nm at λ = 1.55 µm.
pub fn default_linbo3_map() -> SurrogateMap {
    SurrogateMap::new(SurrogateParams::linbo3()).expect("built-in LiNbO3 parameters are valid")
}
