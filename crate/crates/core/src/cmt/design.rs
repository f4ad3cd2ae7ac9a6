// Copyright 2026 The segwave Authors
// SPDX-License-Identifier: Apache-2.0

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One piecewise-constant section of the coupler.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    /// Width of waveguide 0 (nm).
    #[serde(rename = "w0_nm")]
    pub width_0: f64,
    /// Width of waveguide 1 (nm).
    #[serde(rename = "w1_nm")]
    pub width_1: f64,
    /// Propagation length (µm).
    #[serde(rename = "dz_um")]
    pub length_z: f64,
}

impl Segment {
    pub fn new(width_0: f64, width_1: f64, length_z: f64) -> Result<Self> {
        let s = Segment {
            width_0,
            width_1,
            length_z,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |v: f64| v.is_finite() && v > 0.0;
        if !ok(self.width_0) || !ok(self.width_1) {
            return Err(Error::InvalidDesign(format!(
                "segment widths must be positive, got ({}, {}) nm",
                self.width_0, self.width_1
            )));
        }
        if !ok(self.length_z) {
            return Err(Error::InvalidDesign(format!(
                "segment length must be positive, got {} µm",
                self.length_z
            )));
        }
        Ok(())
    }

    pub fn widths(&self) -> [f64; 2] {
        [self.width_0, self.width_1]
    }
}

/// Cross-section constants shared by every segment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Geometry {
    /// Center-to-center waveguide separation (µm).
    pub gap_um: f64,
    pub height_nm: f64,
    pub etch_nm: f64,
    pub wavelength_um: f64,
}

impl Default for Geometry {
    fn default() -> Self {
        Geometry {
            gap_um: 1.0,
            height_nm: 220.0,
            etch_nm: 150.0,
            wavelength_um: 1.55,
        }
    }
}

/// A segmented dual-rail coupler. Segment 0 is the first one the light enters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DesignFile", into = "DesignFile")]
pub struct Design {
    segments: Vec<Segment>,
    geometry: Geometry,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DesignFile {
    gap_um: f64,
    height_nm: f64,
    etch_nm: f64,
    wavelength_um: f64,
    segments: Vec<Segment>,
}

impl TryFrom<DesignFile> for Design {
    type Error = Error;

    fn try_from(f: DesignFile) -> Result<Self> {
        Design::new(
            f.segments,
            Geometry {
                gap_um: f.gap_um,
                height_nm: f.height_nm,
                etch_nm: f.etch_nm,
                wavelength_um: f.wavelength_um,
            },
        )
    }
}

impl From<Design> for DesignFile {
    fn from(d: Design) -> Self {
        DesignFile {
            gap_um: d.geometry.gap_um,
            height_nm: d.geometry.height_nm,
            etch_nm: d.geometry.etch_nm,
            wavelength_um: d.geometry.wavelength_um,
            segments: d.segments,
        }
    }
}

impl Design {
    pub fn new(segments: Vec<Segment>, geometry: Geometry) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::InvalidDesign("a design needs at least one segment".into()));
        }
        for s in &segments {
            s.validate()?;
        }
        let g = &geometry;
        if ![g.gap_um, g.height_nm, g.etch_nm, g.wavelength_um]
            .iter()
            .all(|v| v.is_finite() && *v > 0.0)
        {
            return Err(Error::InvalidDesign(format!("geometry constants must be positive: {g:?}")));
        }
        Ok(Design { segments, geometry })
    }

    /// Design with default geometry.
    pub fn from_segments(segments: Vec<Segment>) -> Result<Self> {
        Design::new(segments, Geometry::default())
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn geometry(&self) -> &Geometry {
        &self.geometry
    }

    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn total_length(&self) -> f64 {
        self.segments.iter().map(|s| s.length_z).sum()
    }

    /// Mean of all 2N widths (nm).
    pub fn mean_width(&self) -> f64 {
        let sum: f64 = self.segments.iter().map(|s| s.width_0 + s.width_1).sum();
        sum / (2.0 * self.segments.len() as f64)
    }

    /// Rebuild with new segments, keeping the geometry.
    pub fn with_segments(&self, segments: Vec<Segment>) -> Result<Self> {
        Design::new(segments, self.geometry)
    }

    /// Split after segment `at` (exclusive), returning both halves.
    pub fn split_at(&self, at: usize) -> Result<(Design, Design)> {
        if at == 0 || at >= self.segments.len() {
            return Err(Error::Contract(format!(
                "split point {at} must be interior to a {}-segment design",
                self.segments.len()
            )));
        }
        let (a, b) = self.segments.split_at(at);
        Ok((self.with_segments(a.to_vec())?, self.with_segments(b.to_vec())?))
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json_str(&text)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("design serialization cannot fail")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_layout_matches_interface() {
        let d = Design::from_segments(vec![Segment::new(600.0, 640.0, 12.5).unwrap()]).unwrap();
        let v: serde_json::Value = serde_json::from_str(&d.to_json_pretty()).unwrap();
        assert_eq!(v["gap_um"], 1.0);
        assert_eq!(v["height_nm"], 220.0);
        assert_eq!(v["etch_nm"], 150.0);
        assert_eq!(v["wavelength_um"], 1.55);
        assert_eq!(v["segments"][0]["w0_nm"], 600.0);
        assert_eq!(v["segments"][0]["w1_nm"], 640.0);
        assert_eq!(v["segments"][0]["dz_um"], 12.5);
        let back = Design::from_json_str(&d.to_json_pretty()).unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn rejects_empty_and_nonpositive() {
        assert!(Design::from_segments(vec![]).is_err());
        assert!(Segment::new(600.0, 600.0, 0.0).is_err());
        assert!(Segment::new(-1.0, 600.0, 1.0).is_err());
        let bad = r#"{"gap_um":1,"height_nm":220,"etch_nm":150,"wavelength_um":1.55,
                      "segments":[{"w0_nm":600,"w1_nm":600,"dz_um":-2}]}"#;
        assert!(Design::from_json_str(bad).is_err());
        let empty = r#"{"gap_um":1,"height_nm":220,"etch_nm":150,"wavelength_um":1.55,"segments":[]}"#;
        assert!(Design::from_json_str(empty).is_err());
    }

    #[test]
    fn mean_width_uses_both_waveguides() {
        let d = Design::from_segments(vec![
            Segment::new(500.0, 500.0, 1.0).unwrap(),
            Segment::new(700.0, 700.0, 1.0).unwrap(),
        ])
        .unwrap();
        assert_eq!(d.mean_width(), 600.0);
        assert_eq!(d.total_length(), 2.0);
    }
}
