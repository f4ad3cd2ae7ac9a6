// Copyright 2026 The segwave Authors
// SPDX-License-Identifier: Apache-2.0

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{CoefficientJacobian, CouplingMap, CouplingTable, WidthDomain};
use crate::cmt::SegmentCoefficients;
use crate::error::{Error, Result};

/// Parameters of the closed-form coupling surrogate.
///
/// ```text
/// n_eff(W) = n_clad + (n_core − n_clad)·(1 − exp(−(W − W_cut)/W_sat))
/// Δ        = (π/λ)·(n_eff(w0) − n_eff(w1))
/// κ        = κ₀·exp(−γ·(gap − (w0 + w1)/2))
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurrogateParams {
    pub n_core: f64,
    pub n_clad: f64,
    /// Width at which the guided index reaches the cladding index (nm).
    pub w_cut_nm: f64,
    /// Saturation width scale (nm).
    pub w_sat_nm: f64,
    /// Coupling amplitude κ₀ (µm⁻¹).
    pub kappa0_per_um: f64,
    /// Evanescent decay rate γ (µm⁻¹).
    pub gamma_per_um: f64,
    /// Center-to-center gap (µm).
    pub gap_um: f64,
    pub wavelength_um: f64,
    pub w_min_nm: f64,
    pub w_max_nm: f64,
}

impl SurrogateParams {
    pub fn silicon() -> Self {
        SurrogateParams {
            n_core: 3.48,
            n_clad: 1.44,
            w_cut_nm: 150.0,
            w_sat_nm: 250.0,
            kappa0_per_um: 0.3,
            gamma_per_um: 6.0,
            gap_um: 1.0,
            wavelength_um: 1.55,
            w_min_nm: 500.0,
            w_max_nm: 850.0,
        }
    }

    pub fn linbo3() -> Self {
        SurrogateParams {
            n_core: 2.21,
            n_clad: 1.44,
            w_cut_nm: 200.0,
            w_sat_nm: 400.0,
            kappa0_per_um: 0.2,
            gamma_per_um: 4.0,
            gap_um: 1.0,
            wavelength_um: 1.55,
            w_min_nm: 500.0,
            w_max_nm: 850.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let all_finite = [
            self.n_core,
            self.n_clad,
            self.w_cut_nm,
            self.w_sat_nm,
            self.kappa0_per_um,
            self.gamma_per_um,
            self.gap_um,
            self.wavelength_um,
            self.w_min_nm,
            self.w_max_nm,
        ]
        .iter()
        .all(|v| v.is_finite());
        let fail = |m: &str| Err(Error::Surrogate(m.to_string()));
        if !all_finite {
            return fail("all parameters must be finite");
        }
        if !(1.0 <= self.n_clad && self.n_clad < self.n_core && self.n_core < 5.0) {
            return fail("need 1 ≤ n_clad < n_core < 5");
        }
        if self.w_sat_nm <= 0.0 {
            return fail("w_sat_nm must be positive");
        }
        if !(0.0 < self.w_min_nm && self.w_min_nm < self.w_max_nm) {
            return fail("need 0 < w_min_nm < w_max_nm");
        }
        if self.w_cut_nm >= self.w_min_nm {
            return fail("w_cut_nm must lie below w_min_nm so n_eff > n_clad on the domain");
        }
        if self.kappa0_per_um <= 0.0 || self.gamma_per_um < 0.0 {
            return fail("need kappa0 > 0 and gamma ≥ 0");
        }
        if self.wavelength_um <= 0.0 {
            return fail("wavelength must be positive");
        }
        if self.gap_um * 1000.0 <= self.w_max_nm {
            return fail("center-to-center gap must exceed the widest waveguide");
        }
        Ok(())
    }
}

/// Closed-form map with analytic derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct SurrogateMap {
    params: SurrogateParams,
}

impl SurrogateMap {
    pub fn new(params: SurrogateParams) -> Result<Self> {
        params.validate()?;
        Ok(SurrogateMap { params })
    }

    pub fn params(&self) -> &SurrogateParams {
        &self.params
    }

    /// Effective index of an isolated waveguide of width `w` (nm) and its
    /// derivative per nm.
    pub fn n_eff(&self, w: f64) -> (f64, f64) {
        let p = &self.params;
        let e = (-(w - p.w_cut_nm) / p.w_sat_nm).exp();
        let span = p.n_core - p.n_clad;
        (p.n_clad + span * (1.0 - e), span * e / p.w_sat_nm)
    }

    fn eval(&self, w0: f64, w1: f64) -> (SegmentCoefficients, CoefficientJacobian) {
        let p = &self.params;
        let (n0, dn0) = self.n_eff(w0);
        let (n1, dn1) = self.n_eff(w1);
        let k = PI / p.wavelength_um;
        let mean_um = 0.5 * (w0 + w1) * 1e-3;
        let kappa = p.kappa0_per_um * (-p.gamma_per_um * (p.gap_um - mean_um)).exp();
        let dkappa = kappa * p.gamma_per_um * 0.5e-3;
        (
            SegmentCoefficients {
                kappa,
                delta: k * (n0 - n1),
                n_eff_0: n0,
                n_eff_1: n1,
            },
            CoefficientJacobian {
                dkappa_dw: [dkappa, dkappa],
                ddelta_dw: [k * dn0, -k * dn1],
                dn0_dw: [dn0, 0.0],
                dn1_dw: [0.0, dn1],
            },
        )
    }

    fn check(&self, w0: f64, w1: f64) -> Result<()> {
        let d = self.domain();
        if d.contains(w0, w1) {
            Ok(())
        } else {
            Err(d.range_error(w0, w1))
        }
    }

    /// Tabulate on a square grid with spacing `step_nm` over the domain.
    pub fn to_table(&self, step_nm: f64) -> Result<CouplingTable> {
        let p = &self.params;
        if !(step_nm.is_finite() && step_nm > 0.0) {
            return Err(Error::Table(format!("grid step must be positive, got {step_nm}")));
        }
        let cells = (p.w_max_nm - p.w_min_nm) / step_nm;
        let n = cells.round();
        if (cells - n).abs() > 1e-9 * cells.max(1.0) || n < 1.0 {
            return Err(Error::Table(format!(
                "step {step_nm} nm does not divide [{}, {}] nm",
                p.w_min_nm, p.w_max_nm
            )));
        }
        let grid: Vec<f64> = (0..=n as usize).map(|i| p.w_min_nm + i as f64 * step_nm).collect();
        CouplingTable::from_fn(grid.clone(), grid, |w0, w1| self.eval(w0, w1).0)
    }
}

impl CouplingMap for SurrogateMap {
    fn domain(&self) -> WidthDomain {
        WidthDomain::square(self.params.w_min_nm, self.params.w_max_nm)
    }

    fn lookup(&self, w0: f64, w1: f64) -> Result<SegmentCoefficients> {
        self.check(w0, w1)?;
        Ok(self.eval(w0, w1).0)
    }

    fn has_analytic_jacobian(&self) -> bool {
        true
    }

    fn lookup_with_jacobian(&self, w0: f64, w1: f64) -> Result<(SegmentCoefficients, CoefficientJacobian)> {
        self.check(w0, w1)?;
        Ok(self.eval(w0, w1))
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::FRAC_PI_2;

    use proptest::prelude::*;

    use super::*;
    use crate::coupling::{default_linbo3_map, default_silicon_map};

    #[test]
    fn equal_widths_have_no_mismatch() {
        let m = default_silicon_map();
        let c = m.lookup(675.0, 675.0).unwrap();
        assert_eq!(c.delta, 0.0);
        assert!(c.kappa > 0.0);
    }

    #[test]
    fn silicon_domain_excludes_499() {
        let m = default_silicon_map();
        assert!(matches!(m.lookup(499.0, 600.0), Err(Error::OutOfRange { .. })));
        assert!(matches!(m.lookup(600.0, 850.5), Err(Error::OutOfRange { .. })));
        assert!(m.lookup(500.0, 850.0).is_ok());
    }

    #[test]
    fn x_gate_length_at_mid_width_is_practical() {
        for m in [default_silicon_map(), default_linbo3_map()] {
            let k = m.lookup(675.0, 675.0).unwrap().kappa;
            let z = FRAC_PI_2 / k;
            assert!((10.0..=100.0).contains(&z), "{:?}: z = {z}", m.params());
        }
    }

    #[test]
    fn n_eff_strictly_increasing_on_5nm_scan() {
        for m in [default_silicon_map(), default_linbo3_map()] {
            let p = m.params().clone();
            let mut prev = f64::NEG_INFINITY;
            let mut w = p.w_min_nm;
            while w <= p.w_max_nm {
                let (n, _) = m.n_eff(w);
                assert!(n > prev);
                assert!(p.n_clad < n && n < p.n_core);
                prev = n;
                w += 5.0;
            }
        }
    }

    #[test]
    fn invalid_params_rejected() {
        let mut p = SurrogateParams::linbo3();
        p.w_cut_nm = 600.0;
        assert!(SurrogateMap::new(p).is_err());
        let mut p = SurrogateParams::linbo3();
        p.n_clad = 2.5;
        assert!(SurrogateMap::new(p).is_err());
        let mut p = SurrogateParams::silicon();
        p.kappa0_per_um = 0.0;
        assert!(SurrogateMap::new(p).is_err());
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let m = default_linbo3_map();
        let h = 1e-4;
        for (w0, w1) in [(560.0, 700.0), (800.0, 510.0), (675.0, 675.0)] {
            let (_, j) = m.lookup_with_jacobian(w0, w1).unwrap();
            let f = |a, b| m.lookup(a, b).unwrap();
            for (i, (p, q)) in [((w0 + h, w1), (w0 - h, w1)), ((w0, w1 + h), (w0, w1 - h))]
                .into_iter()
                .enumerate()
            {
                let (cp, cm) = (f(p.0, p.1), f(q.0, q.1));
                let fd = |a: f64, b: f64| (a - b) / (2.0 * h);
                assert!((fd(cp.kappa, cm.kappa) - j.dkappa_dw[i]).abs() < 1e-9);
                assert!((fd(cp.delta, cm.delta) - j.ddelta_dw[i]).abs() < 1e-9);
                assert!((fd(cp.n_eff_0, cm.n_eff_0) - j.dn0_dw[i]).abs() < 1e-9);
                assert!((fd(cp.n_eff_1, cm.n_eff_1) - j.dn1_dw[i]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn default_table_is_71_by_71() {
        let t = default_linbo3_map().to_table(5.0).unwrap();
        assert_eq!(t.shape(), (71, 71));
        assert!(default_linbo3_map().to_table(8.0).is_err());
    }

    proptest! {
        #[test]
        fn swap_negates_delta_preserves_kappa(w0 in 500.0f64..850.0, w1 in 500.0f64..850.0) {
            let m = default_silicon_map();
            let a = m.lookup(w0, w1).unwrap();
            let b = m.lookup(w1, w0).unwrap();
            prop_assert_eq!(a.kappa, b.kappa);
            prop_assert!((a.delta + b.delta).abs() <= 1e-15 * a.delta.abs().max(1.0));
        }

        #[test]
        fn slopes_are_continuous(w in 505.0f64..845.0) {
            // C¹: one-sided slopes agree within 10%.
            let m = default_linbo3_map();
            let h = 1.0;
            let f = |x: f64| m.lookup(x, 675.0).unwrap().delta;
            let left = (f(w) - f(w - h)) / h;
            let right = (f(w + h) - f(w)) / h;
            prop_assert!((left - right).abs() <= 0.1 * left.abs().max(right.abs()));
        }
    }
}
