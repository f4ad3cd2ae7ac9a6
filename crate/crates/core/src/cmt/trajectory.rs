// Copyright 2026 The segwave Authors
// SPDX-License-Identifier: Apache-2.0

use std::io::Write;

use serde::{Deserialize, Serialize};

use super::design::Design;
use super::matrix::C64;
use super::propagator::segment_unitary;
use crate::coupling::CouplingMap;
use crate::error::{Error, Result};

const NORM_TOLERANCE: f64 = 1e-9;

/// A pure single-qubit state as two dual-rail amplitudes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QubitState(pub [C64; 2]);

impl QubitState {
    pub fn new(a: C64, b: C64) -> Result<Self> {
        let s = QubitState([a, b]);
        s.check_normalized()?;
        Ok(s)
    }

    pub fn zero() -> Self {
        QubitState([C64::new(1.0, 0.0), C64::new(0.0, 0.0)])
    }

    pub fn one() -> Self {
        QubitState([C64::new(0.0, 0.0), C64::new(1.0, 0.0)])
    }

    pub fn plus() -> Self {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        QubitState([C64::new(r, 0.0), C64::new(r, 0.0)])
    }

    pub fn minus() -> Self {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        QubitState([C64::new(r, 0.0), C64::new(-r, 0.0)])
    }

    pub fn plus_y() -> Self {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        QubitState([C64::new(r, 0.0), C64::new(0.0, r)])
    }

    pub fn minus_y() -> Self {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        QubitState([C64::new(r, 0.0), C64::new(0.0, -r)])
    }

    /// Parse `0`, `1`, `+`, `-`, `+y`, `-y`, or `re0,im0,re1,im1`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        Ok(match s {
            "0" => Self::zero(),
            "1" => Self::one(),
            "+" | "+x" => Self::plus(),
            "-" | "-x" => Self::minus(),
            "+y" => Self::plus_y(),
            "-y" => Self::minus_y(),
            _ => {
                let parts: Vec<f64> = s
                    .split(',')
                    .map(|p| p.trim().parse::<f64>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| Error::Config(format!("cannot parse state `{s}`")))?;
                if parts.len() != 4 {
                    return Err(Error::Config(format!("state `{s}` needs four components re0,im0,re1,im1")));
                }
                Self::new(C64::new(parts[0], parts[1]), C64::new(parts[2], parts[3]))?
            }
        })
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0[0].norm_sqr() + self.0[1].norm_sqr()
    }

    fn check_normalized(&self) -> Result<()> {
        let n = self.norm_sqr();
        if !n.is_finite() || (n - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::UnnormalizedState { norm_sqr: n });
        }
        Ok(())
    }

    /// `(⟨X⟩, ⟨Y⟩, ⟨Z⟩)`.
    pub fn bloch_vector(&self) -> [f64; 3] {
        let [a, b] = self.0;
        let ab = a.conj() * b;
        [2.0 * ab.re, 2.0 * ab.im, a.norm_sqr() - b.norm_sqr()]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub z_um: f64,
    pub bloch: [f64; 3],
}

/// Bloch-vector samples along the propagation axis.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BlochTrajectory {
    pub points: Vec<TrajectoryPoint>,
}

impl BlochTrajectory {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn last(&self) -> Option<&TrajectoryPoint> {
        self.points.last()
    }

    /// CSV with header `z_um,bx,by,bz`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["z_um", "bx", "by", "bz"])?;
        for p in &self.points {
            w.write_record(&[
                p.z_um.to_string(),
                p.bloch[0].to_string(),
                p.bloch[1].to_string(),
                p.bloch[2].to_string(),
            ])?;
        }
        w.flush().map_err(|e| Error::io("<csv writer>", e))?;
        Ok(())
    }
}

/// Propagate `initial` through the noise-free design, sampling the Bloch
/// vector at `substeps` evenly spaced points per segment (plus the input).
pub fn propagate_state(
    design: &Design,
    map: &dyn CouplingMap,
    initial: &QubitState,
    substeps: usize,
) -> Result<BlochTrajectory> {
    initial.check_normalized()?;
    if substeps == 0 {
        return Err(Error::Contract("substeps per segment must be at least 1".into()));
    }
    let mut psi = initial.0;
    let mut z = 0.0;
    let mut points = Vec::with_capacity(design.len() * substeps + 1);
    points.push(TrajectoryPoint {
        z_um: 0.0,
        bloch: initial.bloch_vector(),
    });
    for seg in design.segments() {
        let coeffs = map.lookup(seg.width_0, seg.width_1)?;
        let dz = seg.length_z / substeps as f64;
        let step = segment_unitary(&coeffs, dz);
        let z_start = z;
        for k in 1..=substeps {
            psi = step.apply(psi);
            let z_k = if k == substeps {
                z_start + seg.length_z
            } else {
                z_start + dz * k as f64
            };
            points.push(TrajectoryPoint {
                z_um: z_k,
                bloch: QubitState(psi).bloch_vector(),
            });
        }
        z = z_start + seg.length_z;
    }
    Ok(BlochTrajectory { points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cmt::{composite_unitary, Segment};
    use crate::coupling::{default_silicon_map, CouplingTable};

    fn zero_coupling_map() -> CouplingTable {
        CouplingTable::from_fn(vec![500.0, 850.0], vec![500.0, 850.0], |_, _| crate::cmt::SegmentCoefficients {
            kappa: 0.0,
            delta: 0.0,
            n_eff_0: 2.0,
            n_eff_1: 2.0,
        })
        .unwrap()
    }

    #[test]
    fn identity_design_gives_constant_trajectory() {
        let d = Design::from_segments(vec![Segment::new(600.0, 600.0, 5.0).unwrap(); 3]).unwrap();
        let t = propagate_state(&d, &zero_coupling_map(), &QubitState::plus_y(), 8).unwrap();
        assert_eq!(t.len(), 3 * 8 + 1);
        for p in &t.points {
            assert!((p.bloch[1] - 1.0).abs() < 1e-15 && p.bloch[0].abs() < 1e-15);
        }
    }

    #[test]
    fn final_point_matches_composite_and_norm_is_conserved() {
        let map = default_silicon_map();
        let d = Design::from_segments(vec![
            Segment::new(600.0, 640.0, 7.0).unwrap(),
            Segment::new(700.0, 560.0, 11.0).unwrap(),
            Segment::new(820.0, 800.0, 3.5).unwrap(),
        ])
        .unwrap();
        let init = QubitState::plus();
        let t = propagate_state(&d, &map, &init, 32).unwrap();
        let coeffs: Vec<_> = d.segments().iter().map(|s| map.lookup(s.width_0, s.width_1).unwrap()).collect();
        let expect = QubitState(composite_unitary(&d, &coeffs).unwrap().apply(init.0)).bloch_vector();
        let last = t.last().unwrap();
        for i in 0..3 {
            assert!((last.bloch[i] - expect[i]).abs() < 1e-9);
        }
        assert!((last.z_um - d.total_length()).abs() < 1e-12);
        for p in &t.points {
            let n = p.bloch.iter().map(|b| b * b).sum::<f64>().sqrt();
            assert!((n - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn rejects_unnormalized_state() {
        let d = Design::from_segments(vec![Segment::new(600.0, 600.0, 5.0).unwrap()]).unwrap();
        let bad = QubitState([C64::new(1.0, 0.0), C64::new(1.0, 0.0)]);
        assert!(matches!(
            propagate_state(&d, &zero_coupling_map(), &bad, 4),
            Err(Error::UnnormalizedState { .. })
        ));
        assert!(QubitState::parse("1,0,1,0").is_err());
        assert!(QubitState::parse("0.6,0,0,0.8").is_ok());
    }

    #[test]
    fn csv_header() {
        let t = BlochTrajectory {
            points: vec![TrajectoryPoint { z_um: 0.0, bloch: [0.0, 0.0, 1.0] }],
        };
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "z_um,bx,by,bz\n0,0,0,1\n");
    }
}
