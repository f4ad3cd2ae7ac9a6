// Copyright 2026 The segwave Authors
// SPDX-License-Identifier: Apache-2.0

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cmt::{Design, Mat2, SegmentCoefficients, Unitary2};
use crate::cmt::segment_unitary;
use crate::coupling::{lookup_clamped, CouplingMap};
use crate::error::{Error, Result};
use crate::noise::{ErrorBatch, NoiseSpec, WidthSampler};
use crate::seed::rng_from_seed;

/// `½ |Tr(U_ideal† U)|`, invariant under global phase of either argument.
pub fn gate_fidelity(ideal: &Unitary2, u: &Unitary2) -> Result<f64> {
    for m in [ideal.matrix(), u.matrix()] {
        let deviation = m.unitarity_defect();
        if deviation.is_nan() || deviation > Unitary2::TOLERANCE {
            return Err(Error::NotUnitary { deviation });
        }
    }
    Ok(fidelity_with_adjoint(&ideal.matrix().adjoint(), u.matrix()))
}

#[inline]
fn fidelity_with_adjoint(ideal_adj: &Mat2, u: &Mat2) -> f64 {
    (0.5 * ideal_adj.trace_mul(u).norm()).min(1.0)
}

/// Monte-Carlo fidelity statistics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FidelityStats {
    pub mean: f64,
    /// Population standard deviation `√(E[F²] − E[F]²)`.
    pub std: f64,
    pub stderr: f64,
    pub n_samples: usize,
    /// Fraction of realized widths clamped into the map domain.
    pub clamp_rate: f64,
}

impl FidelityStats {
    pub fn from_values(values: &[f64], clamp_rate: f64) -> Self {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|f| (f - mean) * (f - mean)).sum::<f64>() / n;
        let std = var.max(0.0).sqrt();
        FidelityStats {
            mean,
            std,
            stderr: std / n.sqrt(),
            n_samples: values.len(),
            clamp_rate,
        }
    }
}

/// Realized coefficients for one error sample: widths become
/// `clamp(W + δW)` on both waveguides. Returns the number of clamped widths.
pub fn realized_coefficients(
    design: &Design,
    map: &dyn CouplingMap,
    errors: &[f64],
    out: &mut Vec<SegmentCoefficients>,
) -> usize {
    out.clear();
    let mut clamped = 0;
    for (seg, &dw) in design.segments().iter().zip(errors) {
        let (c, flags) = lookup_clamped(map, seg.width_0 + dw, seg.width_1 + dw);
        clamped += flags.iter().filter(|f| **f).count();
        out.push(c);
    }
    clamped
}

/// Per-sample fidelities of the design against `ideal` over a fixed batch,
/// plus the total clamp count.
pub fn fidelity_samples(
    design: &Design,
    map: &dyn CouplingMap,
    ideal: &Unitary2,
    batch: &ErrorBatch,
) -> Result<(Vec<f64>, usize)> {
    if batch.n_segments() != design.len() {
        return Err(Error::Contract(format!(
            "error batch has {} segments, design has {}",
            batch.n_segments(),
            design.len()
        )));
    }
    let adj = ideal.matrix().adjoint();
    let lengths: Vec<f64> = design.segments().iter().map(|s| s.length_z).collect();
    let per_sample: Vec<(f64, usize)> = (0..batch.n_samples())
        .into_par_iter()
        .map_init(Vec::new, |buf, i| {
            let clamped = realized_coefficients(design, map, batch.row(i), buf);
            let u = lengths
                .iter()
                .zip(buf.iter())
                .fold(Mat2::IDENTITY, |acc, (z, k)| *segment_unitary(k, *z).matrix() * acc);
            (fidelity_with_adjoint(&adj, &u), clamped)
        })
        .collect();
    let clamped = per_sample.iter().map(|p| p.1).sum();
    Ok((per_sample.into_iter().map(|p| p.0).collect(), clamped))
}

/// Statistics over a caller-supplied error batch.
pub fn fidelity_for_batch(
    design: &Design,
    map: &dyn CouplingMap,
    ideal: &Unitary2,
    batch: &ErrorBatch,
) -> Result<FidelityStats> {
    if batch.n_samples() < 2 {
        return Err(Error::Contract("fidelity statistics need at least 2 samples".into()));
    }
    let (values, clamped) = fidelity_samples(design, map, ideal, batch)?;
    let rate = clamped as f64 / (2 * batch.n_samples() * design.len()) as f64;
    if rate > 0.0 {
        log::info!("clamped {:.3}% of realized widths into the map domain", 100.0 * rate);
    }
    Ok(FidelityStats::from_values(&values, rate))
}

/// Monte-Carlo estimate of E[F] and σ[F] under `noise`, seeded by
/// `noise.seed`.
pub fn fidelity_statistics(
    design: &Design,
    map: &dyn CouplingMap,
    noise: &NoiseSpec,
    ideal: &Unitary2,
    n_samples: usize,
) -> Result<FidelityStats> {
    if n_samples < 2 {
        return Err(Error::Contract("fidelity statistics need at least 2 samples".into()));
    }
    let sampler = WidthSampler::new(noise.sigma, noise.mode, design.len())?;
    let batch = sampler.sample(&mut rng_from_seed(noise.seed), n_samples);
    fidelity_for_batch(design, map, ideal, &batch)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{FRAC_PI_2, PI};

    use proptest::prelude::*;

    use super::*;
    use crate::cmt::{ideal_gate, GateSpec, Segment, C64};
    use crate::coupling::default_linbo3_map;
    use crate::noise::CorrelationMode;

    fn rx(theta: f64) -> Unitary2 {
        // exp(−iθX)
        Unitary2::try_new(Mat2::new(
            C64::new(theta.cos(), 0.0),
            C64::new(0.0, -theta.sin()),
            C64::new(0.0, -theta.sin()),
            C64::new(theta.cos(), 0.0),
        ))
        .unwrap()
    }

    #[test]
    fn trace_formula_examples() {
        let x = ideal_gate(&GateSpec::named("X")).unwrap();
        assert_eq!(gate_fidelity(&x, &x).unwrap(), 1.0);
        assert_eq!(gate_fidelity(&Unitary2::IDENTITY, &x).unwrap(), 0.0);
        assert!((gate_fidelity(&Unitary2::IDENTITY, &rx(PI / 3.0)).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn rejects_non_unitary_argument() {
        let bad = Unitary2::from_mat_unchecked(Mat2::IDENTITY.scale_re(1.01));
        assert!(matches!(gate_fidelity(&Unitary2::IDENTITY, &bad), Err(Error::NotUnitary { .. })));
        assert!(matches!(gate_fidelity(&bad, &Unitary2::IDENTITY), Err(Error::NotUnitary { .. })));
    }

    #[test]
    fn noiseless_stats_equal_nominal_fidelity() {
        let map = default_linbo3_map();
        let k = map.lookup(675.0, 675.0).unwrap().kappa;
        let d = Design::from_segments(vec![Segment::new(675.0, 675.0, 0.9 * FRAC_PI_2 / k).unwrap()]).unwrap();
        let x = ideal_gate(&GateSpec::named("X")).unwrap();
        let s = fidelity_statistics(&d, &map, &NoiseSpec::noiseless(), &x, 100).unwrap();
        assert!((s.mean - (0.9 * FRAC_PI_2).sin()).abs() < 1e-12);
        assert!(s.std < 1e-12);
        assert_eq!(s.clamp_rate, 0.0);
    }

    #[test]
    fn clamp_rate_is_reported() {
        let map = default_linbo3_map();
        let d = Design::from_segments(vec![Segment::new(845.0, 845.0, 20.0).unwrap()]).unwrap();
        let noise = NoiseSpec::new(30.0, CorrelationMode::FullyCorrelated, 1).unwrap();
        let s = fidelity_statistics(&d, &map, &noise, &Unitary2::IDENTITY, 2000).unwrap();
        assert!(s.clamp_rate > 0.3 && s.clamp_rate < 0.7, "{}", s.clamp_rate);
    }

    #[test]
    fn too_few_samples_rejected() {
        let map = default_linbo3_map();
        let d = Design::from_segments(vec![Segment::new(675.0, 675.0, 20.0).unwrap()]).unwrap();
        assert!(fidelity_statistics(&d, &map, &NoiseSpec::noiseless(), &Unitary2::IDENTITY, 1).is_err());
    }

    #[test]
    fn stderr_halves_with_four_times_samples() {
        let map = default_linbo3_map();
        let k = map.lookup(675.0, 675.0).unwrap().kappa;
        let d = Design::from_segments(vec![Segment::new(675.0, 675.0, FRAC_PI_2 / k).unwrap()]).unwrap();
        let x = ideal_gate(&GateSpec::named("X")).unwrap();
        let noise = NoiseSpec::new(30.0, CorrelationMode::FullyCorrelated, 77).unwrap();
        let a = fidelity_statistics(&d, &map, &noise, &x, 20_000).unwrap();
        let b = fidelity_statistics(&d, &map, &NoiseSpec { seed: 78, ..noise }, &x, 40_000).unwrap();
        let ratio = a.stderr / b.stderr;
        assert!((ratio / 2f64.sqrt() - 1.0).abs() < 0.1, "ratio {ratio}");
    }

    proptest! {
        #[test]
        fn global_phase_invariance(theta in -3.0f64..3.0, phi in -3.0f64..3.0, psi in -3.0f64..3.0) {
            let u = rx(theta);
            let h = ideal_gate(&GateSpec::named("H")).unwrap();
            let base = gate_fidelity(&h, &u).unwrap();
            prop_assert!((gate_fidelity(&h.with_phase(phi), &u).unwrap() - base).abs() < 1e-12);
            prop_assert!((gate_fidelity(&h, &u.with_phase(psi)).unwrap() - base).abs() < 1e-12);
        }

        #[test]
        fn fidelity_in_unit_interval(ax in -1.0f64..1.0, ay in -1.0f64..1.0, az in 0.1f64..1.0, angle in -7.0f64..7.0, theta in -4.0f64..4.0) {
            let g = ideal_gate(&GateSpec::AxisAngle { axis: [ax, ay, az], angle }).unwrap();
            let f = gate_fidelity(&g, &rx(theta)).unwrap();
            prop_assert!((0.0..=1.0).contains(&f));
        }
    }
}
