// Copyright 2026 The segwave Authors
// SPDX-License-Identifier: Apache-2.0

//! Cost gradients: reverse-mode through the 2×2 product for maps with an
//! analytic Jacobian, central differences otherwise.

use rayon::prelude::*;

use crate::cmt::{ideal_gate, segment_derivatives, Design, Mat2, QubitState, Segment, SegmentDerivatives, C64};
use crate::coupling::{CoefficientJacobian, CouplingMap};
use crate::error::{Error, Result};
use crate::metrics::{adiabaticity_argmax, FresnelPolicy};
use crate::noise::ErrorBatch;
use crate::optimizer::cost::{range_penalty, range_penalty_gradient, regularizer_weight};
use crate::optimizer::{total_cost, CostBreakdown, DesignGradient, OptimizeConfig, Regularizer};

/// Central-difference steps: 0.5 nm for widths, 0.01 µm for lengths.
pub const FD_WIDTH_STEP_NM: f64 = 0.5;
pub const FD_LENGTH_STEP_UM: f64 = 0.01;

/// Coefficients, Jacobian (zeroed on clamped coordinates) and propagator
/// derivatives of one segment at possibly out-of-domain widths.
fn linearize(map: &dyn CouplingMap, w0: f64, w1: f64, z: f64) -> Result<(SegmentDerivatives, CoefficientJacobian)> {
    let ([c0, c1], clamped) = map.domain().clamp(w0, w1);
    let (coeffs, mut jac) = map.lookup_with_jacobian(c0, c1)?;
    for (g, moved) in clamped.iter().enumerate() {
        if *moved {
            jac.dkappa_dw[g] = 0.0;
            jac.ddelta_dw[g] = 0.0;
            jac.dn0_dw[g] = 0.0;
            jac.dn1_dw[g] = 0.0;
        }
    }
    Ok((segment_derivatives(&coeffs, z), jac))
}

/// Fidelity of one sample and the gradient of F with respect to every
/// parameter.
fn sample_fidelity_gradient(
    design: &Design,
    map: &dyn CouplingMap,
    ideal_adj: &Mat2,
    errors: &[f64],
) -> Result<(f64, DesignGradient)> {
    let segs = design.segments();
    let n = segs.len();
    let mut lin = Vec::with_capacity(n);
    for (s, &dw) in segs.iter().zip(errors) {
        lin.push(linearize(map, s.width_0 + dw, s.width_1 + dw, s.length_z)?);
    }
    // prefix[i] = U_i ··· U_1 (prefix[0] = I).
    let mut prefix = Vec::with_capacity(n + 1);
    prefix.push(Mat2::IDENTITY);
    for (d, _) in &lin {
        let p = d.u * prefix[prefix.len() - 1];
        prefix.push(p);
    }
    let t = ideal_adj.trace_mul(&prefix[n]);
    let abs_t = t.norm();
    let f = 0.5 * abs_t;
    let mut grad = DesignGradient::zeros(n);
    if abs_t < 1e-300 {
        return Ok((f, grad));
    }
    let dfdt = |dt: C64| 0.5 * (t.conj() * dt).re / abs_t;
    let mut suffix = Mat2::IDENTITY;
    for i in (0..n).rev() {
        let (d, jac) = &lin[i];
        let b = prefix[i] * *ideal_adj * suffix;
        let dk = dfdt(b.trace_mul(&d.d_kappa));
        let dd = dfdt(b.trace_mul(&d.d_delta));
        grad.length[i] = dfdt(b.trace_mul(&d.d_z));
        grad.width_0[i] = dk * jac.dkappa_dw[0] + dd * jac.ddelta_dw[0];
        grad.width_1[i] = dk * jac.dkappa_dw[1] + dd * jac.ddelta_dw[1];
        suffix = suffix * d.u;
    }
    Ok((f, grad))
}

/// `∂T/∂n₁` and `∂T/∂n₂` of the Fresnel transmission.
fn fresnel_partials(a: f64, b: f64) -> (f64, f64, f64) {
    let s = a + b;
    let r = (a - b) / s;
    let t = 1.0 - r * r;
    (t, -2.0 * r * 2.0 * b / (s * s), -2.0 * r * (-2.0 * a) / (s * s))
}

/// `R = 1 − Π T_k` at nominal widths and its gradient.
fn fresnel_gradient(design: &Design, map: &dyn CouplingMap, policy: FresnelPolicy) -> Result<(f64, DesignGradient)> {
    let segs = design.segments();
    let n = segs.len();
    let mut grad = DesignGradient::zeros(n);
    if n < 2 {
        return Ok((0.0, grad));
    }
    let mut lin = Vec::with_capacity(n);
    let mut coeffs = Vec::with_capacity(n);
    for s in segs {
        let ([c0, c1], _) = map.domain().clamp(s.width_0, s.width_1);
        coeffs.push(map.lookup(c0, c1)?);
        lin.push(linearize(map, s.width_0, s.width_1, s.length_z)?);
    }
    let m = n - 1;
    // States after each of the first N−1 segments.
    let mut psi = Vec::with_capacity(m);
    let mut state = QubitState::zero().0;
    for (d, _) in lin.iter().take(m) {
        state = d.u.apply(state);
        psi.push(state);
    }

    // Per-interface transmission with partials in (n0_k, n0_k+1, n1_k, n1_k+1)
    // and in p_k.
    let mut t = vec![0.0; m];
    let mut dt_dn = vec![[0.0; 4]; m];
    let mut dt_dp = vec![0.0; m];
    for k in 0..m {
        let (a, b) = (&coeffs[k], &coeffs[k + 1]);
        match policy {
            FresnelPolicy::PowerWeighted => {
                let p = psi[k][0].norm_sqr();
                let (t0, t0a, t0b) = fresnel_partials(a.n_eff_0, b.n_eff_0);
                let (t1, t1a, t1b) = fresnel_partials(a.n_eff_1, b.n_eff_1);
                t[k] = p * t0 + (1.0 - p) * t1;
                dt_dn[k] = [p * t0a, p * t0b, (1.0 - p) * t1a, (1.0 - p) * t1b];
                dt_dp[k] = t0 - t1;
            }
            FresnelPolicy::MeanIndex => {
                let ma = 0.5 * (a.n_eff_0 + a.n_eff_1);
                let mb = 0.5 * (b.n_eff_0 + b.n_eff_1);
                let (tk, ta, tb) = fresnel_partials(ma, mb);
                t[k] = tk;
                dt_dn[k] = [0.5 * ta, 0.5 * tb, 0.5 * ta, 0.5 * tb];
            }
        }
    }
    let pt: f64 = t.iter().product();
    let r = 1.0 - pt;
    // ∂R/∂T_k = −P_t / T_k
    let dr_dt: Vec<f64> = t.iter().map(|tk| -pt / tk).collect();

    for k in 0..m {
        let c = dr_dt[k];
        let [d0a, d0b, d1a, d1b] = dt_dn[k];
        let (ja, jb) = (&lin[k].1, &lin[k + 1].1);
        for g in 0..2 {
            let wa = c * (d0a * ja.dn0_dw[g] + d1a * ja.dn1_dw[g]);
            let wb = c * (d0b * jb.dn0_dw[g] + d1b * jb.dn1_dw[g]);
            if g == 0 {
                grad.width_0[k] += wa;
                grad.width_0[k + 1] += wb;
            } else {
                grad.width_1[k] += wa;
                grad.width_1[k + 1] += wb;
            }
        }
    }

    if policy == FresnelPolicy::PowerWeighted {
        // Adjoint λ with dR = Re(λ† dψ), swept from the last used state back.
        let mut lambda = [C64::new(0.0, 0.0); 2];
        for k in (0..m).rev() {
            lambda[0] += psi[k][0].scale(2.0 * dr_dt[k] * dt_dp[k]);
            let prev = if k == 0 { QubitState::zero().0 } else { psi[k - 1] };
            let (d, jac) = &lin[k];
            let contrib = |dm: &Mat2| {
                let v = dm.apply(prev);
                (lambda[0].conj() * v[0] + lambda[1].conj() * v[1]).re
            };
            let dk = contrib(&d.d_kappa);
            let dd = contrib(&d.d_delta);
            grad.length[k] += contrib(&d.d_z);
            grad.width_0[k] += dk * jac.dkappa_dw[0] + dd * jac.ddelta_dw[0];
            grad.width_1[k] += dk * jac.dkappa_dw[1] + dd * jac.ddelta_dw[1];
            lambda = d.u.adjoint().apply(lambda);
        }
    }
    Ok((r, grad))
}

/// Adiabaticity `A` and its (sub)gradient through the maximizing term.
fn adiabatic_gradient(design: &Design) -> (f64, DesignGradient) {
    let segs = design.segments();
    let mut grad = DesignGradient::zeros(segs.len());
    let Some((guide, i, v)) = adiabaticity_argmax(design) else {
        return (0.0, grad);
    };
    let (a, b) = (segs[i].widths()[guide], segs[i + 1].widths()[guide]);
    let zbar = 0.5 * (segs[i].length_z + segs[i + 1].length_z);
    let mean = 0.5 * (a + b);
    let s = if b >= a { 1.0 } else { -1.0 };
    let da = -s / (mean * zbar) - v / (2.0 * mean);
    let db = s / (mean * zbar) - v / (2.0 * mean);
    let target = if guide == 0 { &mut grad.width_0 } else { &mut grad.width_1 };
    target[i] += da;
    target[i + 1] += db;
    grad.length[i] = -v / (2.0 * zbar);
    grad.length[i + 1] = -v / (2.0 * zbar);
    (v, grad)
}

/// Cost over a fixed batch and its gradient with respect to every segment's
/// widths and length. Analytic for maps with a Jacobian, central
/// differences otherwise.
pub fn cost_gradient(
    design: &Design,
    map: &dyn CouplingMap,
    config: &OptimizeConfig,
    batch: &ErrorBatch,
) -> Result<(CostBreakdown, DesignGradient)> {
    if map.has_analytic_jacobian() {
        analytic_gradient(design, map, config, batch)
    } else {
        let cost = total_cost(design, map, config, batch)?;
        let grad = finite_difference_gradient(design, map, config, batch, FD_WIDTH_STEP_NM, FD_LENGTH_STEP_UM)?;
        Ok((cost, grad))
    }
}

fn analytic_gradient(
    design: &Design,
    map: &dyn CouplingMap,
    config: &OptimizeConfig,
    batch: &ErrorBatch,
) -> Result<(CostBreakdown, DesignGradient)> {
    if batch.n_segments() != design.len() {
        return Err(Error::Contract(format!(
            "error batch has {} segments, design has {}",
            batch.n_segments(),
            design.len()
        )));
    }
    let n = design.len();
    let ideal_adj = ideal_gate(&config.gate)?.matrix().adjoint();
    let per_sample: Vec<(f64, DesignGradient)> = (0..batch.n_samples())
        .into_par_iter()
        .map(|s| sample_fidelity_gradient(design, map, &ideal_adj, batch.row(s)))
        .collect::<Result<_>>()?;

    let inv = 1.0 / batch.n_samples() as f64;
    let mut grad = DesignGradient::zeros(n);
    let mut mean_f = 0.0;
    for (f, g) in &per_sample {
        mean_f += f;
        grad.add_scaled(g, -inv);
    }
    mean_f *= inv;

    let range = range_penalty(design, config.w_min_nm, config.w_max_nm, config.lambda_w);
    grad.add_scaled(&range_penalty_gradient(design, config.w_min_nm, config.w_max_nm, config.lambda_w), 1.0);

    let weight = regularizer_weight(config);
    let (regularizer_raw, reg_grad) = match config.regularizer {
        Regularizer::Baseline => (0.0, DesignGradient::zeros(n)),
        Regularizer::Fresnel => fresnel_gradient(design, map, config.fresnel_policy)?,
        Regularizer::Adiabatic => adiabatic_gradient(design),
    };
    grad.add_scaled(&reg_grad, weight);

    let fidelity_loss = 1.0 - mean_f;
    let regularizer = weight * regularizer_raw;
    Ok((
        CostBreakdown {
            total: fidelity_loss + range + regularizer,
            fidelity_loss,
            range,
            regularizer,
            regularizer_raw,
        },
        grad,
    ))
}

/// Central differences of [`total_cost`] with the given steps. Length steps
/// shrink to `z/2` for short segments.
pub fn finite_difference_gradient(
    design: &Design,
    map: &dyn CouplingMap,
    config: &OptimizeConfig,
    batch: &ErrorBatch,
    width_step: f64,
    length_step: f64,
) -> Result<DesignGradient> {
    let n = design.len();
    let mut grad = DesignGradient::zeros(n);
    let cost_with = |i: usize, which: usize, delta: f64| -> Result<f64> {
        let mut segs: Vec<Segment> = design.segments().to_vec();
        match which {
            0 => segs[i].width_0 += delta,
            1 => segs[i].width_1 += delta,
            _ => segs[i].length_z += delta,
        }
        Ok(total_cost(&design.with_segments(segs)?, map, config, batch)?.total)
    };
    for i in 0..n {
        for which in 0..3 {
            let h = match which {
                0 | 1 => width_step,
                _ => length_step.min(0.5 * design.segments()[i].length_z),
            };
            let d = (cost_with(i, which, h)? - cost_with(i, which, -h)?) / (2.0 * h);
            match which {
                0 => grad.width_0[i] = d,
                1 => grad.width_1[i] = d,
                _ => grad.length[i] = d,
            }
        }
    }
    Ok(grad)
}
