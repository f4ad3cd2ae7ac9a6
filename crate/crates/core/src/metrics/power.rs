// Copyright 2026 The segwave Authors
// SPDX-License-Identifier: Apache-2.0

//! Back-reflection loss at segment interfaces and the width-profile
//! adiabaticity metric.

use serde::{Deserialize, Serialize};

use crate::cmt::{segment_unitary, Design, QubitState, SegmentCoefficients};
use crate::coupling::{lookup_clamped, CouplingMap};
use crate::error::{Error, Result};

/// Normal-incidence Fresnel power transmission between two indices.
pub fn fresnel_transmission(n1: f64, n2: f64) -> f64 {
    let r = (n1 - n2) / (n1 + n2);
    1.0 - r * r
}

/// How the two waveguides' indices combine into one interface transmission.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FresnelPolicy {
    /// Per-waveguide transmissions weighted by the power each waveguide
    /// carries into the interface (noise-free propagation).
    #[default]
    PowerWeighted,
    /// Transmission of the mean index of the two waveguides.
    MeanIndex,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PowerLossOptions {
    pub policy: FresnelPolicy,
    /// Multiplies each interface reflection before the product when set.
    pub calibration_factor: Option<f64>,
    /// State launched into the device, used for power weighting.
    pub input_state: QubitState,
    /// Clamp widths into the map domain instead of failing.
    pub clamp_to_domain: bool,
}

impl Default for PowerLossOptions {
    fn default() -> Self {
        PowerLossOptions {
            policy: FresnelPolicy::PowerWeighted,
            calibration_factor: None,
            input_state: QubitState::zero(),
            clamp_to_domain: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerLossReport {
    /// Transmission of each interface `k → k+1`.
    pub per_transition_t: Vec<f64>,
    pub total_transmission: f64,
    /// `1 − Π T_k`.
    pub total_loss: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub calibration_factor: Option<f64>,
    /// Loss with each reflection scaled by the calibration factor.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub calibrated_loss: Option<f64>,
}

/// Interface transmissions from per-segment coefficients.
pub(crate) fn interface_transmissions(
    lengths: &[f64],
    coeffs: &[SegmentCoefficients],
    policy: FresnelPolicy,
    input: &QubitState,
) -> Vec<f64> {
    let n = coeffs.len();
    if n < 2 {
        return Vec::new();
    }
    match policy {
        FresnelPolicy::MeanIndex => coeffs
            .windows(2)
            .map(|w| {
                let a = 0.5 * (w[0].n_eff_0 + w[0].n_eff_1);
                let b = 0.5 * (w[1].n_eff_0 + w[1].n_eff_1);
                fresnel_transmission(a, b)
            })
            .collect(),
        FresnelPolicy::PowerWeighted => {
            let mut psi = input.0;
            let mut out = Vec::with_capacity(n - 1);
            for k in 0..n - 1 {
                psi = segment_unitary(&coeffs[k], lengths[k]).apply(psi);
                let p0 = psi[0].norm_sqr();
                let t0 = fresnel_transmission(coeffs[k].n_eff_0, coeffs[k + 1].n_eff_0);
                let t1 = fresnel_transmission(coeffs[k].n_eff_1, coeffs[k + 1].n_eff_1);
                out.push(p0 * t0 + (1.0 - p0) * t1);
            }
            out
        }
    }
}

fn report_from_transmissions(per_transition_t: Vec<f64>, calibration: Option<f64>) -> PowerLossReport {
    let total_transmission: f64 = per_transition_t.iter().product();
    let calibrated_loss = calibration.map(|c| {
        1.0 - per_transition_t
            .iter()
            .map(|t| (1.0 - c * (1.0 - t)).max(0.0))
            .product::<f64>()
    });
    PowerLossReport {
        total_loss: 1.0 - total_transmission,
        total_transmission,
        per_transition_t,
        calibration_factor: calibration,
        calibrated_loss,
    }
}

fn nominal_coefficients(design: &Design, map: &dyn CouplingMap, clamp: bool) -> Result<Vec<SegmentCoefficients>> {
    design
        .segments()
        .iter()
        .map(|s| {
            if clamp {
                Ok(lookup_clamped(map, s.width_0, s.width_1).0)
            } else {
                map.lookup(s.width_0, s.width_1)
            }
        })
        .collect()
}

/// Fresnel back-reflection loss of the design at nominal widths.
pub fn design_power_loss(design: &Design, map: &dyn CouplingMap, options: &PowerLossOptions) -> Result<PowerLossReport> {
    if let Some(c) = options.calibration_factor {
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::Config(format!("calibration factor must be positive, got {c}")));
        }
    }
    let coeffs = nominal_coefficients(design, map, options.clamp_to_domain)?;
    power_loss_for_coefficients(design, &coeffs, options)
}

/// Loss for explicitly realized coefficients (e.g. under a noise sample).
pub fn power_loss_for_coefficients(
    design: &Design,
    coeffs: &[SegmentCoefficients],
    options: &PowerLossOptions,
) -> Result<PowerLossReport> {
    if coeffs.len() != design.len() {
        return Err(Error::Contract("one coefficient set per segment required".into()));
    }
    let lengths: Vec<f64> = design.segments().iter().map(|s| s.length_z).collect();
    let t = interface_transmissions(&lengths, coeffs, options.policy, &options.input_state);
    Ok(report_from_transmissions(t, options.calibration_factor))
}

/// Large-N loss `1 − (1 − r_avg)^{N−1}` for a uniform per-interface
/// reflection `r_avg`.
pub fn asymptotic_power_loss(r_avg: f64, n_segments: usize) -> Result<f64> {
    if !(0.0..1.0).contains(&r_avg) || n_segments == 0 {
        return Err(Error::Contract(format!(
            "need r_avg in [0, 1) and N ≥ 1, got r_avg = {r_avg}, N = {n_segments}"
        )));
    }
    let exponent = (n_segments - 1) as f64;
    // 1 − (1 − r)^m without cancellation for small r.
    Ok(-(exponent * (-r_avg).ln_1p()).exp_m1())
}

/// Largest normalized width change rate between adjacent segments (µm⁻¹),
/// over both waveguides:
/// `|W_{i+1} − W_i| / (mean(W_i, W_{i+1}) · mean(z_i, z_{i+1}))`.
pub fn adiabaticity_metric(design: &Design) -> f64 {
    adiabaticity_argmax(design).map_or(0.0, |(_, _, a)| a)
}

/// `(waveguide, interface index, value)` of the adiabaticity maximum.
pub(crate) fn adiabaticity_argmax(design: &Design) -> Option<(usize, usize, f64)> {
    let segs = design.segments();
    let mut best: Option<(usize, usize, f64)> = None;
    for (i, pair) in segs.windows(2).enumerate() {
        let zbar = 0.5 * (pair[0].length_z + pair[1].length_z);
        for guide in 0..2 {
            let (a, b) = (pair[0].widths()[guide], pair[1].widths()[guide]);
            let v = (b - a).abs() / (0.5 * (a + b) * zbar);
            if best.is_none_or(|(_, _, m)| v > m) {
                best = Some((guide, i, v));
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;
    use crate::cmt::Segment;
    use crate::coupling::{default_linbo3_map, CouplingTable};

    /// n_eff,0 depends only on w0 and n_eff,1 only on w1: 2.0 at 500 nm,
    /// 2.1 at 600 nm.
    fn step_table() -> CouplingTable {
        let g = vec![500.0, 600.0];
        CouplingTable::from_fn(g.clone(), g, |w0, w1| SegmentCoefficients {
            kappa: 0.05,
            delta: 0.0,
            n_eff_0: if w0 < 550.0 { 2.0 } else { 2.1 },
            n_eff_1: if w1 < 550.0 { 2.0 } else { 2.1 },
        })
        .unwrap()
    }

    #[test]
    fn fresnel_examples() {
        assert_eq!(fresnel_transmission(2.3, 2.3), 1.0);
        assert_eq!(fresnel_transmission(2.0, 2.1), fresnel_transmission(2.1, 2.0));
        assert!((fresnel_transmission(2.0, 2.1) - (1.0 - (0.1f64 / 4.1).powi(2))).abs() < 1e-15);
        assert!((fresnel_transmission(2.0, 2.1) - 0.999_405_116).abs() < 1e-9);
    }

    #[test]
    fn single_segment_has_zero_loss() {
        let d = Design::from_segments(vec![Segment::new(560.0, 700.0, 30.0).unwrap()]).unwrap();
        let r = design_power_loss(&d, &default_linbo3_map(), &PowerLossOptions::default()).unwrap();
        assert_eq!(r.total_loss, 0.0);
        assert!(r.per_transition_t.is_empty());
    }

    #[test]
    fn uniform_widths_have_zero_loss() {
        let d = Design::from_segments(vec![Segment::new(640.0, 700.0, 5.0).unwrap(); 6]).unwrap();
        for policy in [FresnelPolicy::PowerWeighted, FresnelPolicy::MeanIndex] {
            let opts = PowerLossOptions { policy, ..Default::default() };
            assert_eq!(design_power_loss(&d, &default_linbo3_map(), &opts).unwrap().total_loss, 0.0);
        }
    }

    #[test]
    fn equal_per_guide_steps_make_policies_agree() {
        let d = Design::from_segments(vec![
            Segment::new(500.0, 500.0, 7.0).unwrap(),
            Segment::new(600.0, 600.0, 7.0).unwrap(),
        ])
        .unwrap();
        let expect = (0.1f64 / 4.1).powi(2);
        for policy in [FresnelPolicy::PowerWeighted, FresnelPolicy::MeanIndex] {
            let opts = PowerLossOptions { policy, ..Default::default() };
            let r = design_power_loss(&d, &step_table(), &opts).unwrap();
            assert!((r.total_loss - expect).abs() < 1e-15, "{policy:?}");
            assert!((r.total_loss - 5.949e-4).abs() < 1e-7);
        }
    }

    #[test]
    fn calibration_scales_reflection_separately() {
        let d = Design::from_segments(vec![
            Segment::new(500.0, 500.0, 7.0).unwrap(),
            Segment::new(600.0, 600.0, 7.0).unwrap(),
        ])
        .unwrap();
        let opts = PowerLossOptions { calibration_factor: Some(5.0), ..Default::default() };
        let r = design_power_loss(&d, &step_table(), &opts).unwrap();
        let base = (0.1f64 / 4.1).powi(2);
        assert!((r.total_loss - base).abs() < 1e-15);
        assert!((r.calibrated_loss.unwrap() - 5.0 * base).abs() < 1e-15);
        let bad = PowerLossOptions { calibration_factor: Some(-1.0), ..Default::default() };
        assert!(design_power_loss(&d, &step_table(), &bad).is_err());
    }

    #[test]
    fn out_of_domain_is_an_error_unless_clamping() {
        let d = Design::from_segments(vec![
            Segment::new(480.0, 600.0, 7.0).unwrap(),
            Segment::new(600.0, 600.0, 7.0).unwrap(),
        ])
        .unwrap();
        assert!(design_power_loss(&d, &default_linbo3_map(), &PowerLossOptions::default()).is_err());
        let opts = PowerLossOptions { clamp_to_domain: true, ..Default::default() };
        assert!(design_power_loss(&d, &default_linbo3_map(), &opts).is_ok());
    }

    #[test]
    fn asymptotic_examples() {
        assert_eq!(asymptotic_power_loss(0.0, 17).unwrap(), 0.0);
        assert!((asymptotic_power_loss(0.013, 2).unwrap() - 0.013).abs() < 1e-16);
        assert!((asymptotic_power_loss(0.01, 11).unwrap() - (1.0 - 0.99f64.powi(10))).abs() < 1e-15);
        assert!((asymptotic_power_loss(0.01, 11).unwrap() - 0.095_618).abs() < 1e-6);
        assert!(asymptotic_power_loss(1.0, 3).is_err());
        assert!(asymptotic_power_loss(0.1, 0).is_err());
    }

    #[test]
    fn adiabaticity_examples() {
        let uniform = Design::from_segments(vec![Segment::new(600.0, 700.0, 10.0).unwrap(); 4]).unwrap();
        assert_eq!(adiabaticity_metric(&uniform), 0.0);
        let step = Design::from_segments(vec![
            Segment::new(600.0, 700.0, 10.0).unwrap(),
            Segment::new(660.0, 700.0, 10.0).unwrap(),
        ])
        .unwrap();
        assert!((adiabaticity_metric(&step) - 60.0 / (630.0 * 10.0)).abs() < 1e-15);
        let swapped = Design::from_segments(vec![
            Segment::new(700.0, 600.0, 10.0).unwrap(),
            Segment::new(700.0, 660.0, 10.0).unwrap(),
        ])
        .unwrap();
        assert_eq!(adiabaticity_metric(&swapped), adiabaticity_metric(&step));
        let single = Design::from_segments(vec![Segment::new(600.0, 700.0, 10.0).unwrap()]).unwrap();
        assert_eq!(adiabaticity_metric(&single), 0.0);
    }

    proptest! {
        #[test]
        fn product_identity_and_bounds(widths in proptest::collection::vec((500.0f64..850.0, 500.0f64..850.0, 1.0f64..30.0), 1..12)) {
            let segs = widths.iter().map(|&(a, b, z)| Segment::new(a, b, z).unwrap()).collect();
            let d = Design::from_segments(segs).unwrap();
            for policy in [FresnelPolicy::PowerWeighted, FresnelPolicy::MeanIndex] {
                let r = design_power_loss(&d, &default_linbo3_map(), &PowerLossOptions { policy, ..Default::default() }).unwrap();
                let prod: f64 = r.per_transition_t.iter().product();
                prop_assert!(((1.0 - r.total_loss) - prod).abs() < 1e-12);
                prop_assert!(r.per_transition_t.iter().all(|t| *t > 0.0 && *t <= 1.0));
            }
        }

        #[test]
        fn adding_a_transition_never_reduces_loss(
            widths in proptest::collection::vec((500.0f64..850.0, 500.0f64..850.0, 1.0f64..30.0), 1..8),
            extra in (500.0f64..850.0, 500.0f64..850.0, 1.0f64..30.0),
        ) {
            let mut segs: Vec<Segment> = widths.iter().map(|&(a, b, z)| Segment::new(a, b, z).unwrap()).collect();
            let d = Design::from_segments(segs.clone()).unwrap();
            segs.push(Segment::new(extra.0, extra.1, extra.2).unwrap());
            let longer = Design::from_segments(segs).unwrap();
            let map = default_linbo3_map();
            let opts = PowerLossOptions::default();
            let a = design_power_loss(&d, &map, &opts).unwrap().total_loss;
            let b = design_power_loss(&longer, &map, &opts).unwrap().total_loss;
            prop_assert!(b >= a - 1e-15);
        }

        #[test]
        fn linear_asymptote(n in 2usize..200, u in 1e-4f64..0.999) {
            let r = u * 0.1 / (n - 1) as f64;
            let exact = asymptotic_power_loss(r, n).unwrap();
            let linear = (n - 1) as f64 * r;
            prop_assert!((exact - linear).abs() / linear < 0.05);
        }
    }
}
