// Copyright 2026 The segwave Authors
// SPDX-License-Identifier: Apache-2.0

use approx::assert_abs_diff_eq;
use segwave_core::cmt::{composite_unitary, propagate_state, QubitState, SegmentCoefficients};
use segwave_core::coupling::{default_linbo3_map, default_silicon_map, CouplingMap};
use segwave_core::metrics::realized_coefficients;
use segwave_core::{Design, Segment};

fn design(parts: &[(f64, f64, f64)]) -> Design {
    Design::from_segments(parts.iter().map(|&(a, b, z)| Segment::new(a, b, z).unwrap()).collect()).unwrap()
}

fn nominal(d: &Design, map: &dyn CouplingMap) -> Vec<SegmentCoefficients> {
    let mut out = Vec::new();
    realized_coefficients(d, map, &vec![0.0; d.len()], &mut out);
    out
}

#[test]
fn split_designs_compose() {
    let map = default_silicon_map();
    let d = design(&[(560.0, 700.0, 4.0), (610.0, 820.0, 7.5), (800.0, 540.0, 2.0), (650.0, 650.0, 11.0)]);
    let whole = composite_unitary(&d, &nominal(&d, &map)).unwrap();
    for at in 1..d.len() {
        let (a, b) = d.split_at(at).unwrap();
        let ua = composite_unitary(&a, &nominal(&a, &map)).unwrap();
        let ub = composite_unitary(&b, &nominal(&b, &map)).unwrap();
        let prod = *ub.matrix() * *ua.matrix();
        assert!(prod.max_abs_diff(whole.matrix()) < 1e-12);
    }
}

#[test]
fn trajectory_ends_at_composite_image() {
    let map = default_linbo3_map();
    let d = design(&[(560.0, 700.0, 14.0), (610.0, 820.0, 7.5), (800.0, 540.0, 20.0)]);
    let u = composite_unitary(&d, &nominal(&d, &map)).unwrap();
    for state in ["0", "1", "+", "-y"] {
        let psi = QubitState::parse(state).unwrap();
        let traj = propagate_state(&d, &map, &psi, 32).unwrap();
        assert_eq!(traj.len(), 3 * 32 + 1);
        let expected = QubitState(u.apply(psi.0)).bloch_vector();
        let last = traj.last().unwrap();
        for k in 0..3 {
            assert_abs_diff_eq!(last.bloch[k], expected[k], epsilon = 1e-9);
        }
        assert_abs_diff_eq!(last.z_um, d.total_length(), epsilon = 1e-12);
        for p in &traj.points {
            let r: f64 = p.bloch.iter().map(|v| v * v).sum();
            assert_abs_diff_eq!(r, 1.0, epsilon = 1e-9);
        }
    }
}

#[test]
fn unnormalized_state_rejected() {
    let map = default_linbo3_map();
    let d = design(&[(600.0, 700.0, 5.0)]);
    let psi = QubitState::parse("1,0,1,0");
    let bad = psi.and_then(|p| propagate_state(&d, &map, &p, 32));
    assert!(bad.is_err());
}

#[test]
fn design_json_round_trip() {
    let d = design(&[(560.0, 700.0, 4.0), (610.0, 820.0, 7.5)]);
    let back = Design::from_json_str(&d.to_json_pretty()).unwrap();
    assert_eq!(back, d);
    assert!(Design::from_json_str(r#"{"gap_um":1,"height_nm":220,"etch_nm":150,"wavelength_um":1.55,"segments":[{"w0_nm":600,"w1_nm":600,"dz_um":-1}]}"#).is_err());
}
