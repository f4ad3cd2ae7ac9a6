// Copyright 2026 The segwave Authors
// SPDX-License-Identifier: Apache-2.0

//! Closed-form SU(2) propagators of the two-mode coupled-mode equations.
//!
//! Within a segment the amplitudes obey `i ∂z E = H E` with
//! `H = κ X − Δ Z`, whose propagator over length `z` is
//!
//! ```text
//! U = cos(Ωz) I − i (κ/Ω) sin(Ωz) X + i (Δ/Ω) sin(Ωz) Z,   Ω = √(κ² + Δ²).
//! ```

use serde::{Deserialize, Serialize};

use super::design::Design;
use super::matrix::{Mat2, Unitary2, C64};
use crate::error::{Error, Result};

/// Physical coefficients of one segment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SegmentCoefficients {
    /// Coupling coefficient κ (µm⁻¹), real and non-negative.
    pub kappa: f64,
    /// Mode mismatch Δ = (π/λ)(n_eff,0 − n_eff,1) (µm⁻¹).
    pub delta: f64,
    pub n_eff_0: f64,
    pub n_eff_1: f64,
}

impl SegmentCoefficients {
    /// Coefficients with no effective-index information, for
    /// propagator-only use.
    pub fn coupling(kappa: f64, delta: f64) -> Self {
        SegmentCoefficients {
            kappa,
            delta,
            n_eff_0: f64::NAN,
            n_eff_1: f64::NAN,
        }
    }

    pub fn omega(&self) -> f64 {
        self.kappa.hypot(self.delta)
    }
}

/// Below this value of Ωz the trigonometric factors switch to their
/// second-order Taylor forms.
const TAYLOR_THRESHOLD: f64 = 1e-12;
/// Below this value of Ωz, `∂(sin(Ωz)/Ω)/∂Ω` is taken from its series,
/// since the direct form cancels catastrophically.
const SERIES_THRESHOLD: f64 = 1e-3;

/// `(cos Ωz, sin(Ωz)/Ω)` with the exact Ω → 0 limit.
#[inline]
fn trig_factors(omega: f64, z: f64) -> (f64, f64) {
    let x = omega * z;
    if x < TAYLOR_THRESHOLD {
        (1.0 - 0.5 * x * x, z * (1.0 - x * x / 6.0))
    } else {
        let (s, c) = x.sin_cos();
        (c, s / omega)
    }
}

/// The generator direction `−iκX + iΔZ` (unnormalized).
#[inline]
fn generator(kappa: f64, delta: f64) -> Mat2 {
    Mat2::new(
        C64::new(0.0, delta),
        C64::new(0.0, -kappa),
        C64::new(0.0, -kappa),
        C64::new(0.0, -delta),
    )
}

#[inline]
fn build(c: f64, s: f64, kappa: f64, delta: f64) -> Mat2 {
    let g = generator(kappa, delta).scale_re(s);
    Mat2::new(
        C64::new(c, 0.0) + g.0[0][0],
        g.0[0][1],
        g.0[1][0],
        C64::new(c, 0.0) + g.0[1][1],
    )
}

/// Propagator of one segment of length `z` (µm).
pub fn segment_unitary(coeffs: &SegmentCoefficients, z: f64) -> Unitary2 {
    let (c, s) = trig_factors(coeffs.omega(), z);
    Unitary2::from_mat_unchecked(build(c, s, coeffs.kappa, coeffs.delta))
}

/// A segment propagator together with its partial derivatives.
#[derive(Debug, Clone, Copy)]
pub struct SegmentDerivatives {
    pub u: Mat2,
    pub d_kappa: Mat2,
    pub d_delta: Mat2,
    pub d_z: Mat2,
}

/// Propagator and its derivatives with respect to κ, Δ and z.
pub fn segment_derivatives(coeffs: &SegmentCoefficients, z: f64) -> SegmentDerivatives {
    let (kappa, delta) = (coeffs.kappa, coeffs.delta);
    let omega = coeffs.omega();
    let (c, s) = trig_factors(omega, z);
    let x = omega * z;
    // g = ∂s/∂Ω / Ω = (z cos Ωz − s) / Ω²
    let g = if x < SERIES_THRESHOLD {
        z * z * z * (-1.0 / 3.0 + x * x / 30.0)
    } else {
        (z * c - s) / (omega * omega)
    };
    let gen = generator(kappa, delta);
    let ident = Mat2::IDENTITY;
    let i_x = Mat2::X.scale(C64::new(0.0, -1.0));
    let i_z = Mat2::Z.scale(C64::new(0.0, 1.0));

    let d_kappa = ident.scale_re(-z * kappa * s) + gen.scale_re(g * kappa) + i_x.scale_re(s);
    let d_delta = ident.scale_re(-z * delta * s) + gen.scale_re(g * delta) + i_z.scale_re(s);
    let d_z = ident.scale_re(-omega * omega * s) + gen.scale_re(c);
    SegmentDerivatives {
        u: build(c, s, kappa, delta),
        d_kappa,
        d_delta,
        d_z,
    }
}

/// Ordered product `U_N ··· U_2 · U_1` over the design's segments, using
/// one set of realized coefficients per segment.
pub fn composite_unitary(design: &Design, realized: &[SegmentCoefficients]) -> Result<Unitary2> {
    if realized.len() != design.len() {
        return Err(Error::Contract(format!(
            "{} coefficient sets supplied for a {}-segment design",
            realized.len(),
            design.len()
        )));
    }
    Ok(composite_from_lengths(
        design.segments().iter().map(|s| s.length_z).zip(realized),
    ))
}

pub(crate) fn composite_from_lengths<'a>(
    parts: impl IntoIterator<Item = (f64, &'a SegmentCoefficients)>,
) -> Unitary2 {
    let m = parts
        .into_iter()
        .fold(Mat2::IDENTITY, |acc, (z, k)| *segment_unitary(k, z).matrix() * acc);
    Unitary2::from_mat_unchecked(m)
}
