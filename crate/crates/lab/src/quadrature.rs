//! Grid sweeps over the model spaces and characteristic numbers.
//!
//! Torus integrals are rectangle sums over the uniform periodic grid
//! (spectrally accurate for the trigonometric data used here), evaluated in
//! parallel with a deterministic index-order reduction. Chart integrals over
//! projective space reduce to a radial Gauss–Legendre quadrature; for the
//! homogeneous models the integrand is constant, so characteristic numbers
//! factor into (value at the origin) × (volume by quadrature).

use kforge_core::catalog::{kahler_scalar_identities, kahler_tensor_identities};
use kforge_core::curvature::{curvature_from_raw, KahlerCurvature};
use kforge_core::forms::{kahler_form, volume_form};
use kforge_core::jets::JetTable;
use kforge_core::linalg::Mat;
use kforge_core::models::{FubiniStudy, TorusGrid, TrigPotential};
use kforge_core::ring::InvariantPolynomial;
use kforge_core::transgress::HermitianTwoTensor;
use kforge_core::Complex64;
use rayon::prelude::*;

use crate::LabError;

/// Fast scalar pairing: the degree-1 and degree-2 invariants are evaluated by
/// their direct index sums (proved equal to the form-algebra pairing in the
/// identity-catalog tests), keeping the quadrature hot loop allocation-free.
pub fn xi_p_fast(partition: &[u8], r: &KahlerCurvature) -> f64 {
    let s = kahler_scalar_identities(r);
    match partition {
        [1] => s.tau_raw,
        [2] => s.p1,
        [1, 1] => s.p2,
        _ => panic!("no fast path for partition {partition:?}"),
    }
}

/// Fast transgression: catalog index sums, same degrees.
pub fn xi_q_fast(partition: &[u8], r: &KahlerCurvature) -> HermitianTwoTensor {
    let t = kahler_tensor_identities(r);
    match partition {
        [1] => t.q1,
        [2] => t.q21,
        [1, 1] => t.q22,
        _ => panic!("no fast path for partition {partition:?}"),
    }
}

/// Everything the pointwise pipeline produces at one torus grid point.
pub struct PointData {
    pub curvature: KahlerCurvature,
    /// Linear part of the normalizing change, `z = linear · w`.
    pub linear: Mat,
    /// Riemannian volume density `2^m det g` in the torus coordinates.
    pub density: f64,
}

/// Raw jets → unitary-frame curvature at one torus point (direct formula,
/// no series normalization; validated against the full route in the tests).
pub fn torus_point(pot: &TrigPotential, xy: &[f64]) -> Result<PointData, LabError> {
    let raw = pot.raw_jets_at(xy);
    let d = kforge_core::linalg::det(&raw.g).re * (2.0f64).powi(raw.m as i32);
    if d <= 0.0 || !d.is_finite() {
        return Err(LabError::Model(kforge_core::models::ModelError::NotPositiveDefinite));
    }
    let (curvature, linear) = curvature_from_raw(&raw).map_err(LabError::Jet)?;
    Ok(PointData { curvature, linear, density: d })
}

/// Weighted sum of `field × density` over the torus grid; the reduction runs
/// in grid-index order regardless of thread count.
pub fn integrate_torus<F>(pot: &TrigPotential, grid: &TorusGrid, field: F) -> Result<f64, LabError>
where
    F: Fn(&PointData) -> Result<f64, LabError> + Sync,
{
    let w = grid.weight();
    let values: Result<Vec<f64>, LabError> = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let data = torus_point(pot, &grid.point(i))?;
            Ok(field(&data)? * data.density * w)
        })
        .collect();
    Ok(values?.iter().sum())
}

/// The action integral `(1/k!) ∫ g(S(F), Ω^k) dν` over the torus model,
/// for a single partition monomial.
pub fn action_integral(
    partition: &[u8],
    pot: &TrigPotential,
    grid: &TorusGrid,
) -> Result<f64, LabError> {
    integrate_torus(pot, grid, |data| Ok(xi_p_fast(partition, &data.curvature)))
}

/// Scalar ratio `S(F) / dν` of top forms at a point, a frame-invariant
/// function whose integral against the volume density is the characteristic
/// number (with the standard complex orientation).
pub fn top_ratio(s: &InvariantPolynomial, r: &KahlerCurvature) -> Result<f64, LabError> {
    let m = r.m;
    let sf = s.eval_forms(&r.form_matrix());
    let key: Vec<u8> = (0..m as u8).collect();
    let dv = volume_form(&kahler_form(&Mat::identity(m)));
    let ratio = sf.coeff(&key, &key) / dv.coeff(&key, &key);
    if ratio.im.abs() > 1e-9 * (1.0 + ratio.re.abs()) {
        return Err(LabError::Transgress(
            kforge_core::transgress::TransgressError::NotReal { im: ratio.im },
        ));
    }
    Ok(ratio.re)
}

/// `∫_M S(F)` over the torus (degree of `S` must equal the dimension). The
/// `(-1)^m` converts from the volume-form orientation to the standard
/// complex orientation of the coordinates.
pub fn torus_char_number(
    s: &InvariantPolynomial,
    pot: &TrigPotential,
    grid: &TorusGrid,
    normalized: bool,
) -> Result<f64, LabError> {
    let m = pot.m;
    let scale = chern_scale(s.k, normalized);
    let sign = if m.is_multiple_of(2) { 1.0 } else { -1.0 };
    let raw = integrate_torus(pot, grid, |data| top_ratio(s, &data.curvature))?;
    Ok(sign * scale * raw)
}

fn chern_scale(k: usize, normalized: bool) -> f64 {
    if normalized {
        (2.0 * std::f64::consts::PI).powi(-(k as i32))
    } else {
        1.0
    }
}

// ── projective spaces and products ───────────────────────────────────────

/// Gauss–Legendre nodes and weights on `[0, 1]`.
pub fn gauss_legendre_unit(n: usize) -> Vec<(f64, f64)> {
    // Newton iteration on Legendre polynomials over [-1, 1], then affine map.
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        // Chebyshev-like initial guess
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push(((x + 1.0) / 2.0, w / 2.0));
    }
    out.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    out
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let pk = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = pk;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Chart volume of `CP^n` by radial quadrature with `r = t/(1-t)`.
pub fn fs_volume_quadrature(n: usize, nodes: usize) -> f64 {
    let fs = FubiniStudy { n };
    // ∫ 2^n (1+r²)^{-(n+1)} dV = S_{2n-1} ∫ 2^n r^{2n-1} (1+r²)^{-(n+1)} dr
    let sphere_area = unit_sphere_area(2 * n);
    let mut acc = 0.0;
    for (t, w) in gauss_legendre_unit(nodes) {
        let r = t / (1.0 - t);
        let jac = 1.0 / ((1.0 - t) * (1.0 - t));
        let mut z = vec![Complex64::new(0.0, 0.0); n];
        z[0] = Complex64::new(r, 0.0);
        let dens = fs.density_at(&z);
        acc += w * dens * r.powi(2 * n as i32 - 1) * jac;
    }
    acc * sphere_area
}

/// Surface area of the unit sphere `S^{d-1}` in `R^d` (even `d` here).
fn unit_sphere_area(d: usize) -> f64 {
    // d = 2n: area = 2 π^n / (n-1)!
    let n = d / 2;
    let mut fact = 1.0;
    for i in 2..n {
        fact *= i as f64;
    }
    2.0 * std::f64::consts::PI.powi(n as i32) / fact
}

/// A compact model assembled from homogeneous factors: `CP^{ν_1} × ··· `.
pub struct ProjectiveProduct {
    pub factors: Vec<usize>,
}

impl ProjectiveProduct {
    pub fn m(&self) -> usize {
        self.factors.iter().sum()
    }

    /// Jets of the product metric at the origin of the product chart.
    pub fn jets_at_origin(&self, max_order: usize) -> Result<JetTable, LabError> {
        let mut acc: Option<JetTable> = None;
        for &n in &self.factors {
            let fs = FubiniStudy { n };
            let block = fs.jets_at(&vec![Complex64::new(0.0, 0.0); n], max_order)?;
            acc = Some(match acc {
                None => block,
                Some(prev) => prev.product(&block),
            });
        }
        Ok(acc.expect("at least one factor"))
    }

    /// Volume of the product (radial quadrature per factor).
    pub fn volume(&self, nodes: usize) -> f64 {
        self.factors.iter().map(|&n| fs_volume_quadrature(n, nodes)).product()
    }

    /// `∫ S(F)` using homogeneity: constant integrand × volume.
    pub fn char_number(
        &self,
        s: &InvariantPolynomial,
        normalized: bool,
        nodes: usize,
    ) -> Result<f64, LabError> {
        let m = self.m();
        assert_eq!(s.k, m, "degree must match the dimension");
        let jets = self.jets_at_origin(2)?;
        let r = KahlerCurvature::from_normalized_jets(&jets);
        let ratio = top_ratio(s, &r)?;
        let sign = if m.is_multiple_of(2) { 1.0 } else { -1.0 };
        Ok(sign * chern_scale(s.k, normalized) * ratio * self.volume(nodes))
    }
}
