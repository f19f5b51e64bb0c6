//! Finite-difference variational derivatives of the action integrals.
//!
//! The action `A(ε) = (1/k!) ∫ g(S(F_ε), Ω_ε^k) dν_ε` is evaluated on the
//! torus for the one-parameter family of potentials `f + ε φ`; its
//! derivative at `ε = 0` is compared against the transgression pairing
//! `∫ ⟨Ξ_Q(S)(F), h_φ⟩ dν` with `h_φ` the complex Hessian of `φ` carried
//! into the pointwise unitary frame.
//!
//! The derivative side uses central differences at three nested steps
//! `{2s, s, s/2}`; two Richardson extrapolants must agree, otherwise the
//! step is flagged as inconsistent (too large for the truncation error or
//! too small against rounding) instead of reporting a bogus mismatch.

use kforge_core::models::{TorusGrid, TrigPotential};
use serde::Serialize;

use rayon::prelude::*;

use crate::quadrature::action_integral;
use crate::LabError;

/// Outcome of one Euler–Lagrange comparison.
#[derive(Clone, Debug, Serialize)]
pub struct ElReport {
    pub m: usize,
    pub k: usize,
    pub partition: Vec<u8>,
    pub grid_res: usize,
    pub step: f64,
    /// Central differences at steps `2s`, `s`, `s/2`.
    pub central_differences: Vec<f64>,
    /// Spread between the two Richardson extrapolants, relative to the value.
    pub richardson_spread: f64,
    /// Whether the extrapolants agree (a false value means the derivative is
    /// dominated by truncation or rounding and the comparison is
    /// inconclusive — the instability exit path).
    pub richardson_consistent: bool,
    /// Size of the pairing integrand, `∫ |⟨Ξ_Q(S), h⟩| dν`: the natural
    /// scale of the identity under test.
    pub integrand_scale: f64,
    /// Finite-difference derivative of the action (best extrapolant).
    pub lhs: f64,
    /// Transgression pairing integral.
    pub rhs: f64,
    pub abs_err: f64,
    pub rel_err: f64,
}

/// Central difference of the action at one step.
fn central_difference(
    partition: &[u8],
    base: &TrigPotential,
    variation: &TrigPotential,
    grid: &TorusGrid,
    h: f64,
) -> Result<f64, LabError> {
    let plus = action_integral(partition, &base.plus(variation, h), grid)?;
    let minus = action_integral(partition, &base.plus(variation, -h), grid)?;
    Ok((plus - minus) / (2.0 * h))
}

/// Compare the finite-difference derivative of the action against the
/// transgression pairing.
pub fn euler_lagrange_check(
    partition: &[u8],
    base: &TrigPotential,
    variation: &TrigPotential,
    grid: &TorusGrid,
    step: f64,
) -> Result<ElReport, LabError> {
    let m = base.m;
    let k: usize = partition.iter().map(|&x| x as usize).sum();
    // derivative side
    let d2 = central_difference(partition, base, variation, grid, 2.0 * step)?;
    let d1 = central_difference(partition, base, variation, grid, step)?;
    let dh = central_difference(partition, base, variation, grid, step / 2.0)?;
    let r1 = (4.0 * d1 - d2) / 3.0;
    let r2 = (4.0 * dh - d1) / 3.0;
    let scale = r2.abs().max(r1.abs()).max(1e-30);
    let spread = (r2 - r1).abs() / scale;
    let lhs = r2;
    // pairing side: ∫ ⟨Ξ_Q(S), h⟩ dν with h in the pointwise unitary frame
    let w = grid.weight();
    let terms: Result<Vec<(f64, f64)>, LabError> = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let xy = grid.point(i);
            let data = crate::quadrature::torus_point(base, &xy)?;
            let q = crate::quadrature::xi_q_fast(partition, &data.curvature);
            let hess_frame = frame_hessian(variation, &xy, &data.linear);
            let v = q.pair(&hess_frame)? * data.density * w;
            Ok((v, v.abs()))
        })
        .collect();
    let terms = terms?;
    let rhs: f64 = terms.iter().map(|t| t.0).sum();
    let integrand_scale: f64 = terms.iter().map(|t| t.1).sum();
    let abs_err = (lhs - rhs).abs();
    let rel_err = abs_err / lhs.abs().max(rhs.abs()).max(1e-30);
    Ok(ElReport {
        m,
        k,
        partition: partition.to_vec(),
        grid_res: grid.res,
        step,
        central_differences: vec![d2, d1, dh],
        richardson_spread: spread,
        richardson_consistent: spread <= 1e-2,
        integrand_scale,
        lhs,
        rhs,
        abs_err,
        rel_err,
    })
}

/// Theorem check on a projective space with the scaling variation
/// `g_ε = (1+ε) g`: the variation `h = g` is Kähler but not exact, so the
/// action genuinely moves and the comparison is a nondegenerate relative
/// test (the torus with potential variations pins the degree-1 action to a
/// cohomological constant, which only tests that both sides vanish).
///
/// Homogeneity collapses the integrals to origin values times the chart
/// volume (computed by radial quadrature).
pub fn scaling_variation_check(
    n: usize,
    partition: &[u8],
    step: f64,
) -> Result<ElReport, LabError> {
    use kforge_core::curvature::{curvature_from_raw, RawJets2};
    use kforge_core::models::FubiniStudy;

    let k: usize = partition.iter().map(|&x| x as usize).sum();
    assert!(k < n, "need k < n for the transgression");
    let fs = FubiniStudy { n };
    let origin = vec![kforge_core::Complex64::new(0.0, 0.0); n];
    let jets = fs.jets_at(&origin, 2)?;
    let raw = RawJets2::from_table(&jets);
    let vol0 = crate::quadrature::fs_volume_quadrature(n, 80);
    let action = |eps: f64| -> Result<f64, LabError> {
        let (r, _) = curvature_from_raw(&raw.scaled(1.0 + eps)).map_err(LabError::Jet)?;
        let value = crate::quadrature::xi_p_fast(partition, &r);
        Ok(value * (1.0 + eps).powi(n as i32) * vol0)
    };
    let diff = |h: f64| -> Result<f64, LabError> { Ok((action(h)? - action(-h)?) / (2.0 * h)) };
    let d2 = diff(2.0 * step)?;
    let d1 = diff(step)?;
    let dh = diff(step / 2.0)?;
    let r1 = (4.0 * d1 - d2) / 3.0;
    let r2 = (4.0 * dh - d1) / 3.0;
    let spread = (r2 - r1).abs() / r2.abs().max(r1.abs()).max(1e-30);
    let lhs = r2;
    // pairing side: h = g is the identity matrix in the unitary frame
    let (r0, _) = curvature_from_raw(&raw).map_err(LabError::Jet)?;
    let q = crate::quadrature::xi_q_fast(partition, &r0);
    let mut tr = 0.0;
    for a in 0..n {
        tr += q.at(a, a).re;
    }
    let rhs = tr * vol0;
    let abs_err = (lhs - rhs).abs();
    let rel_err = abs_err / lhs.abs().max(rhs.abs()).max(1e-30);
    Ok(ElReport {
        m: n,
        k,
        partition: partition.to_vec(),
        grid_res: 0,
        step,
        central_differences: vec![d2, d1, dh],
        richardson_spread: spread,
        richardson_consistent: spread <= 1e-2,
        integrand_scale: tr.abs() * vol0,
        lhs,
        rhs,
        abs_err,
        rel_err,
    })
}

/// Hessian of the variation at the point, in the unitary frame of the
/// normalized metric: `L^T · H · conj(L)` for `z = L w`.
pub fn frame_hessian(
    variation: &TrigPotential,
    xy: &[f64],
    linear: &kforge_core::linalg::Mat,
) -> kforge_core::linalg::Mat {
    let h = variation.hessian_at(xy);
    linear.transpose().mul(&h).mul(&linear.conj())
}
