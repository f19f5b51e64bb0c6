//! Scalar pairings of characteristic forms with powers of the Kähler form,
//! and their transgressions to Hermitian 2-tensors.
//!
//! For an invariant polynomial `S` of degree `k` and the curvature matrix
//! `F` of `(1,1)`-forms (see [`crate::curvature`]), working in the unitary
//! frame of normalized jets:
//!
//! * the scalar pairing is `(1/k!) g(S(F), Ω^k)`;
//! * the transgression wedges in a coframe pair before pairing one power
//!   higher: component `(a, b̄)` is `(1/(k+1)!) g(S(F) ∧ w^{ab}, Ω^{k+1})`
//!   with `w^{ab} = -i dz^a ∧ dz̄^b`.
//!
//! The `-i` on the coframe pair mirrors the `-i` of the curvature matrix:
//! each makes one anti-real `(1,1)` factor real, so both outputs are real
//! (Hermitian) for real coefficients. With these two factors frozen, the
//! top-degree identity `(1/m!) g(S(F), Ω^m) dν = S(F)` holds exactly, the
//! degree-1 transgression of `Tr_1` reproduces the Einstein combination
//! `ρ - τ/2 g`, and the degree-2 scalars reproduce their printed index
//! formulas; those cross-checks live in the identity catalog tests.

use core::fmt;

use num_complex::Complex64;

use crate::curvature::KahlerCurvature;
use crate::forms::{inner_product, kahler_form, power, wedge, PQForm};
use crate::linalg::Mat;
use crate::ring::InvariantPolynomial;

/// Tolerance on imaginary residue of quantities that must come out real.
const IM_TOL: f64 = 1e-9;

/// Normalization of the duality `⟨e_a ∘ ē_b, h⟩ = h[a][b̄]`: the pairing of a
/// transgression tensor with a potential Hessian is the plain coefficient
/// contraction. Fixed once by the degree-1 variational experiment and then
/// frozen for the degree-2 one.
pub const PAIRING_NORMALIZATION: f64 = 1.0;

#[derive(Clone, Debug, PartialEq)]
pub enum TransgressError {
    /// `k > m` for the scalar pairing, or `k + 1 > m` for the transgression.
    DegreeExceedsDimension { k: usize, m: usize },
    /// A quantity that must be real carried a large imaginary part; this
    /// signals a convention bug upstream, not a numerical artifact.
    NotReal { im: f64 },
}

impl fmt::Display for TransgressError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TransgressError::DegreeExceedsDimension { k, m } => {
                write!(f, "degree {k} invariant not pairable in complex dimension {m}")
            }
            TransgressError::NotReal { im } => write!(f, "imaginary residue {im} on a real quantity"),
        }
    }
}

/// A Hermitian symmetric 2-tensor in the unitary frame, stored as the matrix
/// of coefficients against `e_a ∘ ē_b`.
#[derive(Clone, Debug)]
pub struct HermitianTwoTensor {
    pub m: usize,
    mat: Mat,
}

impl HermitianTwoTensor {
    pub fn zero(m: usize) -> Self {
        HermitianTwoTensor { m, mat: Mat::zeros(m, m) }
    }

    pub fn from_mat(mat: Mat) -> Self {
        assert_eq!(mat.rows, mat.cols);
        HermitianTwoTensor { m: mat.rows, mat }
    }

    /// The identity matrix: the metric itself as an element of this space.
    pub fn metric(m: usize) -> Self {
        HermitianTwoTensor { m, mat: Mat::identity(m) }
    }

    #[inline]
    pub fn at(&self, a: usize, b: usize) -> Complex64 {
        self.mat[(a, b)]
    }

    pub fn mat(&self) -> &Mat {
        &self.mat
    }

    pub fn set(&mut self, a: usize, b: usize, v: Complex64) {
        self.mat[(a, b)] = v;
    }

    pub fn hermitian_defect(&self) -> f64 {
        self.mat.hermitian_defect()
    }

    pub fn max_abs(&self) -> f64 {
        self.mat.max_abs()
    }

    pub fn max_abs_diff(&self, other: &HermitianTwoTensor) -> f64 {
        self.mat.max_abs_diff(&other.mat)
    }

    pub fn add(&self, other: &HermitianTwoTensor) -> HermitianTwoTensor {
        assert_eq!(self.m, other.m);
        let mat = Mat::from_fn(self.m, self.m, |i, j| self.mat[(i, j)] + other.mat[(i, j)]);
        HermitianTwoTensor { m: self.m, mat }
    }

    pub fn scale(&self, f: f64) -> HermitianTwoTensor {
        let mat = Mat::from_fn(self.m, self.m, |i, j| self.mat[(i, j)] * f);
        HermitianTwoTensor { m: self.m, mat }
    }

    /// Covariance under a constant unitary change `z = U w`: coefficients
    /// transform by `U^H H U`.
    pub fn unitary_transform(&self, u: &Mat) -> HermitianTwoTensor {
        HermitianTwoTensor { m: self.m, mat: u.adjoint().mul(&self.mat).mul(u) }
    }

    /// Drop rows and columns past `n` (the pull-back along a product with a
    /// flat factor).
    pub fn restrict(&self, n: usize) -> HermitianTwoTensor {
        HermitianTwoTensor { m: n, mat: Mat::from_fn(n, n, |i, j| self.mat[(i, j)]) }
    }

    /// Duality pairing with a potential Hessian `h[a][b̄]` expressed in the
    /// same unitary frame; real for Hermitian inputs.
    pub fn pair(&self, hessian: &Mat) -> Result<f64, TransgressError> {
        assert_eq!(hessian.rows, self.m);
        let mut acc = Complex64::new(0.0, 0.0);
        for a in 0..self.m {
            for b in 0..self.m {
                acc += self.mat[(a, b)] * hessian[(a, b)];
            }
        }
        let scale = self.max_abs().max(hessian.max_abs()).max(1.0);
        if acc.im.abs() > IM_TOL * scale {
            return Err(TransgressError::NotReal { im: acc.im });
        }
        Ok(PAIRING_NORMALIZATION * acc.re)
    }
}

/// `Ω^k` for the flat unitary-frame metric, the only Kähler form that ever
/// enters the pointwise pairings (jets are normalized first).
pub fn flat_omega_power(m: usize, k: usize) -> PQForm {
    power(&kahler_form(&Mat::identity(m)), k)
}

/// The scalar pairing `(1/k!) g(S(F), Ω^k)`; real-valued for real
/// coefficients, with the imaginary residue asserted small.
pub fn xi_p(s: &InvariantPolynomial, r: &KahlerCurvature) -> Result<f64, TransgressError> {
    let (m, k) = (r.m, s.k);
    if k > m {
        return Err(TransgressError::DegreeExceedsDimension { k, m });
    }
    let sf = s.eval_forms(&r.form_matrix());
    let omega_k = flat_omega_power(m, k);
    let v = inner_product(&sf, &omega_k, None).expect("matching dimension") / factorial(k);
    let scale = sf.max_abs().max(1.0);
    if v.im.abs() > IM_TOL * scale {
        return Err(TransgressError::NotReal { im: v.im });
    }
    Ok(v.re)
}

/// The transgression `(1/(k+1)!) g(S(F) ∧ w^{ab}, Ω^{k+1}) e_a ∘ ē_b`.
pub fn xi_q(s: &InvariantPolynomial, r: &KahlerCurvature) -> Result<HermitianTwoTensor, TransgressError> {
    let (m, k) = (r.m, s.k);
    if k + 1 > m {
        return Err(TransgressError::DegreeExceedsDimension { k: k + 1, m });
    }
    let sf = s.eval_forms(&r.form_matrix());
    let omega_k1 = flat_omega_power(m, k + 1);
    let fact = factorial(k + 1);
    let minus_i = Complex64::new(0.0, -1.0);
    let mut out = Mat::zeros(m, m);
    for a in 0..m {
        for b in 0..m {
            let coframe = PQForm::monomial(m, &[a as u8], &[b as u8], minus_i);
            let wedged = wedge(&sf, &coframe).expect("matching dimension");
            out[(a, b)] = inner_product(&wedged, &omega_k1, None).expect("matching dimension") / fact;
        }
    }
    let t = HermitianTwoTensor::from_mat(out);
    let scale = t.max_abs().max(1.0);
    if t.hermitian_defect() > IM_TOL * scale {
        return Err(TransgressError::NotReal { im: t.hermitian_defect() });
    }
    Ok(t)
}

fn factorial(n: usize) -> f64 {
    let mut f = 1.0;
    for i in 2..=n {
        f *= i as f64;
    }
    f
}
