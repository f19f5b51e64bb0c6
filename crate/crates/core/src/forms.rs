//! Complexified exterior algebra in `(p, q)` bidegree.
//!
//! A [`PQForm`] is a linear combination of monomials `dz^I ∧ dz̄^J` with `I`
//! and `J` strictly increasing index sets; the parity sign of reordering a
//! product into this canonical shape (all `dz` factors before all `dz̄`
//! factors) is absorbed into the stored coefficient.
//!
//! The inner product on forms is the complex-bilinear determinant-rule
//! extension of the metric. In a unitary frame `g(dz^a, dz̄^b) = δ_ab` and
//! `g(dz^a, dz^b) = g(dz̄^a, dz̄^b) = 0`, which collapses the Gram
//! determinant of two canonical monomials to a pure permutation sign:
//!
//! ```text
//! g(dz^I ∧ dz̄^J, dz^K ∧ dz̄^L) = (-1)^{pq} δ_{I,L} δ_{J,K}
//! ```
//!
//! so the pairing couples `(I, J)` against `(J, I)` — the "off-diagonal"
//! coupling visible already in `g(dz^1 ∧ dz̄^1, dz^1 ∧ dz̄^1) = -1`.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;

use crate::linalg::Mat;

/// Strictly increasing set of 0-based axis indices.
pub type IndexSet = Vec<u8>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FormError {
    DimMismatch,
    BidegreeMismatch,
}

impl fmt::Display for FormError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FormError::DimMismatch => write!(f, "forms live on different dimensions"),
            FormError::BidegreeMismatch => write!(f, "bidegree mismatch"),
        }
    }
}

/// A `(p, q)`-form on C^m with canonical sorted monomial keys.
#[derive(Clone, Debug, PartialEq)]
pub struct PQForm {
    pub m: usize,
    pub p: usize,
    pub q: usize,
    coeffs: BTreeMap<(IndexSet, IndexSet), Complex64>,
}

const EPS_DROP: f64 = 0.0; // keep exact zeros out, nothing else

impl PQForm {
    pub fn zero(m: usize, p: usize, q: usize) -> Self {
        PQForm { m, p, q, coeffs: BTreeMap::new() }
    }

    /// The constant function 1 viewed as a (0,0)-form.
    pub fn one(m: usize) -> Self {
        let mut f = PQForm::zero(m, 0, 0);
        f.coeffs.insert((vec![], vec![]), Complex64::new(1.0, 0.0));
        f
    }

    /// Single monomial `c · dz^I ∧ dz̄^J`; `I`, `J` must be strictly increasing.
    pub fn monomial(m: usize, i: &[u8], j: &[u8], c: Complex64) -> Self {
        debug_assert!(i.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(j.windows(2).all(|w| w[0] < w[1]));
        let mut f = PQForm::zero(m, i.len(), j.len());
        if c != Complex64::new(0.0, 0.0) {
            f.coeffs.insert((i.to_vec(), j.to_vec()), c);
        }
        f
    }

    pub fn coeff(&self, i: &[u8], j: &[u8]) -> Complex64 {
        self.coeffs
            .get(&(i.to_vec(), j.to_vec()))
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(IndexSet, IndexSet), &Complex64)> {
        self.coeffs.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.values().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn scale(&self, factor: Complex64) -> PQForm {
        let mut out = self.clone();
        if factor == Complex64::new(0.0, 0.0) {
            out.coeffs.clear();
            return out;
        }
        for v in out.coeffs.values_mut() {
            *v *= factor;
        }
        out
    }

    pub fn add(&self, other: &PQForm) -> Result<PQForm, FormError> {
        if self.m != other.m {
            return Err(FormError::DimMismatch);
        }
        if (self.p, self.q) != (other.p, other.q) && !self.is_zero() && !other.is_zero() {
            return Err(FormError::BidegreeMismatch);
        }
        let mut out = self.clone();
        if out.is_zero() {
            out.p = other.p;
            out.q = other.q;
        }
        for (k, v) in &other.coeffs {
            let entry = out.coeffs.entry(k.clone()).or_insert(Complex64::new(0.0, 0.0));
            *entry += v;
            if entry.norm() <= EPS_DROP {
                out.coeffs.remove(k);
            }
        }
        Ok(out)
    }

    pub fn max_abs_diff(&self, other: &PQForm) -> f64 {
        let mut worst = 0.0f64;
        for (k, v) in &self.coeffs {
            let w = other.coeffs.get(k).copied().unwrap_or(Complex64::new(0.0, 0.0));
            worst = worst.max((v - w).norm());
        }
        for (k, w) in &other.coeffs {
            if !self.coeffs.contains_key(k) {
                worst = worst.max(w.norm());
            }
        }
        worst
    }

    /// Complex conjugate form: `conj(dz^I ∧ dz̄^J) = (-1)^{pq} dz^J ∧ dz̄^I`.
    pub fn conj(&self) -> PQForm {
        let sign = if (self.p * self.q).is_multiple_of(2) { 1.0 } else { -1.0 };
        let mut out = PQForm::zero(self.m, self.q, self.p);
        for ((i, j), v) in &self.coeffs {
            out.coeffs.insert((j.clone(), i.clone()), v.conj() * sign);
        }
        out
    }

    /// Deviation from reality (a real form equals its own conjugate).
    pub fn reality_defect(&self) -> f64 {
        self.conj().max_abs_diff(self)
    }
}

/// Sign of merging two strictly increasing index sets; `None` on overlap.
fn merge_sign(a: &[u8], b: &[u8]) -> Option<(IndexSet, f64)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let mut inversions = 0usize;
    let (mut ia, mut ib) = (0usize, 0usize);
    while ia < a.len() && ib < b.len() {
        if a[ia] == b[ib] {
            return None;
        }
        if a[ia] < b[ib] {
            out.push(a[ia]);
            ia += 1;
        } else {
            // b[ib] jumps over the remaining elements of a
            inversions += a.len() - ia;
            out.push(b[ib]);
            ib += 1;
        }
    }
    out.extend_from_slice(&a[ia..]);
    out.extend_from_slice(&b[ib..]);
    Some((out, if inversions.is_multiple_of(2) { 1.0 } else { -1.0 }))
}

/// Exterior product. Bidegrees add; overflow past `(m, m)` gives zero.
pub fn wedge(a: &PQForm, b: &PQForm) -> Result<PQForm, FormError> {
    if a.m != b.m {
        return Err(FormError::DimMismatch);
    }
    let m = a.m;
    let (p, q) = (a.p + b.p, a.q + b.q);
    let mut out = PQForm::zero(m, p, q);
    if p > m || q > m {
        return Ok(out);
    }
    // Moving b's dz block through a's dz̄ block costs (-1)^{q_a p_b}.
    let cross = if (a.q * b.p).is_multiple_of(2) { 1.0 } else { -1.0 };
    for ((ia, ja), va) in &a.coeffs {
        for ((ib, jb), vb) in &b.coeffs {
            let Some((i, si)) = merge_sign(ia, ib) else { continue };
            let Some((j, sj)) = merge_sign(ja, jb) else { continue };
            let term = va * vb * (cross * si * sj);
            *out.coeffs.entry((i, j)).or_insert(Complex64::new(0.0, 0.0)) += term;
        }
    }
    out.coeffs.retain(|_, v| *v != Complex64::new(0.0, 0.0));
    Ok(out)
}

/// Bilinear determinant-rule inner product of two forms in a unitary frame.
///
/// Nonzero only between bidegrees `(p, q)` and `(q, p)`; canonical monomials
/// couple "off-diagonally" with the closed-form sign derived in the module
/// docs. An optional inverse-metric matrix generalizes away from the unitary
/// frame (Gram determinant with `g(dz^a, dz̄^b) = ginv[a][b]`).
pub fn inner_product(a: &PQForm, b: &PQForm, ginv: Option<&Mat>) -> Result<Complex64, FormError> {
    if a.m != b.m {
        return Err(FormError::DimMismatch);
    }
    if a.is_zero() || b.is_zero() {
        return Ok(Complex64::new(0.0, 0.0));
    }
    if (b.p, b.q) != (a.q, a.p) {
        // Orthogonal by index-type counting.
        return Ok(Complex64::new(0.0, 0.0));
    }
    let mut acc = Complex64::new(0.0, 0.0);
    match ginv {
        None => {
            let sign = if (a.p * a.q).is_multiple_of(2) { 1.0 } else { -1.0 };
            for ((i, j), va) in &a.coeffs {
                if let Some(vb) = b.coeffs.get(&(j.clone(), i.clone())) {
                    acc += va * vb * sign;
                }
            }
        }
        Some(g) => {
            // Full Gram determinant; rows from a's monomial, cols from b's.
            for ((ia, ja), va) in &a.coeffs {
                for ((ib, jb), vb) in &b.coeffs {
                    let n = ia.len() + ja.len();
                    let mut gram = Mat::zeros(n, n);
                    for (r, one) in ia.iter().map(|&x| (true, x)).chain(ja.iter().map(|&x| (false, x))).enumerate() {
                        for (cidx, two) in ib.iter().map(|&x| (true, x)).chain(jb.iter().map(|&x| (false, x))).enumerate() {
                            gram[(r, cidx)] = match (one, two) {
                                ((true, x), (false, y)) => g[(x as usize, y as usize)],
                                ((false, x), (true, y)) => g[(y as usize, x as usize)],
                                _ => Complex64::new(0.0, 0.0),
                            };
                        }
                    }
                    acc += va * vb * crate::linalg::det(&gram);
                }
            }
        }
    }
    Ok(acc)
}

/// The Kähler form `Ω = -i Σ g_{ab̄} dz^a ∧ dz̄^b` for a given order-0 block.
pub fn kahler_form(metric: &Mat) -> PQForm {
    let m = metric.rows;
    let mut f = PQForm::zero(m, 1, 1);
    for a in 0..m {
        for b in 0..m {
            let c = Complex64::new(0.0, -1.0) * metric[(a, b)];
            if c != Complex64::new(0.0, 0.0) {
                f.coeffs.insert((vec![a as u8], vec![b as u8]), c);
            }
        }
    }
    f
}

/// `Ω^k` by repeated wedge; `k = 0` gives the constant 1.
pub fn power(omega: &PQForm, k: usize) -> PQForm {
    let mut acc = PQForm::one(omega.m);
    for _ in 0..k {
        acc = wedge(&acc, omega).expect("same dimension");
    }
    acc
}

/// The volume form `Ω^m / m!`.
pub fn volume_form(omega: &PQForm) -> PQForm {
    let m = omega.m;
    let mut fact = 1.0;
    for i in 2..=m {
        fact *= i as f64;
    }
    power(omega, m).scale(Complex64::new(1.0 / fact, 0.0))
}

/// An `m x m` matrix of `(1,1)`-forms (the curvature operator as a matrix of
/// 2-forms; entries commute, so traces of wedge powers are unambiguous).
#[derive(Clone, Debug)]
pub struct FormMatrix {
    pub m: usize,
    entries: Vec<PQForm>,
}

impl FormMatrix {
    pub fn zero(m: usize) -> Self {
        FormMatrix { m, entries: vec![PQForm::zero(m, 1, 1); m * m] }
    }

    pub fn entry(&self, i: usize, j: usize) -> &PQForm {
        &self.entries[i * self.m + j]
    }

    pub fn entry_mut(&mut self, i: usize, j: usize) -> &mut PQForm {
        &mut self.entries[i * self.m + j]
    }

    pub fn trace(&self) -> PQForm {
        let mut acc = PQForm::zero(self.m, 1, 1);
        for i in 0..self.m {
            acc = acc.add(self.entry(i, i)).expect("trace bidegrees agree");
        }
        acc
    }

    /// Matrix product where scalar multiplication is the wedge product.
    pub fn wedge_mul(&self, other: &FormMatrix) -> FormMatrix {
        assert_eq!(self.m, other.m);
        let m = self.m;
        let bid_p = self.entries[0].p + other.entries[0].p;
        let bid_q = self.entries[0].q + other.entries[0].q;
        let mut out = FormMatrix {
            m,
            entries: vec![PQForm::zero(m, bid_p, bid_q); m * m],
        };
        for i in 0..m {
            for j in 0..m {
                let mut acc = PQForm::zero(m, bid_p, bid_q);
                for k in 0..m {
                    let term = wedge(self.entry(i, k), other.entry(k, j)).expect("same m");
                    acc = acc.add(&term).expect("same bidegree");
                }
                *out.entry_mut(i, j) = acc;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn dz(m: usize, a: u8) -> PQForm {
        PQForm::monomial(m, &[a], &[], c(1.0, 0.0))
    }

    fn dzbar(m: usize, a: u8) -> PQForm {
        PQForm::monomial(m, &[], &[a], c(1.0, 0.0))
    }

    #[test]
    fn dz_wedge_dz_is_zero() {
        let f = wedge(&dz(2, 0), &dz(2, 0)).unwrap();
        assert!(f.is_zero());
    }

    #[test]
    fn one_one_forms_commute() {
        let m = 2;
        let a = wedge(&dz(m, 0), &dzbar(m, 0)).unwrap();
        let b = wedge(&dz(m, 1), &dzbar(m, 1)).unwrap();
        let ab = wedge(&a, &b).unwrap();
        let ba = wedge(&b, &a).unwrap();
        assert!(ab.max_abs_diff(&ba) < 1e-15);
        assert!(!ab.is_zero());
    }

    #[test]
    fn odd_forms_anticommute() {
        let m = 2;
        let ab = wedge(&dz(m, 0), &dz(m, 1)).unwrap();
        let ba = wedge(&dz(m, 1), &dz(m, 0)).unwrap();
        assert!(ab.max_abs_diff(&ba.scale(c(-1.0, 0.0))) < 1e-15);
    }

    #[test]
    fn wedge_associativity_on_pseudo_random_forms() {
        let m = 3;
        let mut mk = |seed: u64, p: usize, q: usize| {
            let mut f = PQForm::zero(m, p, q);
            // deterministic "random" (1,1) content
            for a in 0..m as u8 {
                for b in 0..m as u8 {
                    let k = (seed as f64) + (a as f64) * 2.3 + (b as f64) * 7.1;
                    f = f
                        .add(&PQForm::monomial(m, &[a], &[b], c(libm::sin(k), libm::cos(1.3 * k))))
                        .unwrap();
                }
            }
            f
        };
        let a = mk(1, 1, 1);
        let b = mk(2, 1, 1);
        let d = mk(3, 1, 1);
        let left = wedge(&wedge(&a, &b).unwrap(), &d).unwrap();
        let right = wedge(&a, &wedge(&b, &d).unwrap()).unwrap();
        assert!(left.max_abs_diff(&right) < 1e-12);
    }

    #[test]
    fn unitary_pairing_signs() {
        let m = 2;
        let f11 = wedge(&dz(m, 0), &dzbar(m, 0)).unwrap();
        let v = inner_product(&f11, &f11, None).unwrap();
        assert!((v - c(-1.0, 0.0)).norm() < 1e-15, "got {v}");
        // orthogonal index sets pair to zero
        let f12 = wedge(&dz(m, 0), &dzbar(m, 1)).unwrap();
        let z = inner_product(&f11, &f12, None).unwrap();
        assert_eq!(z, c(0.0, 0.0));
        // off-diagonal coupling
        let f21 = wedge(&dz(m, 1), &dzbar(m, 0)).unwrap();
        let w = inner_product(&f12, &f21, None).unwrap();
        assert!((w - c(-1.0, 0.0)).norm() < 1e-15, "got {w}");
    }

    #[test]
    fn gram_determinant_oracle_matches_unitary_shortcut() {
        // The combinatorial sign path must agree with the explicit Gram
        // determinant evaluated with ginv = identity.
        let m = 3;
        let a = PQForm::monomial(m, &[0, 2], &[1, 2], c(1.0, 0.0));
        let b = PQForm::monomial(m, &[1, 2], &[0, 2], c(1.0, 0.0));
        let fast = inner_product(&a, &b, None).unwrap();
        let slow = inner_product(&a, &b, Some(&Mat::identity(m))).unwrap();
        assert!((fast - slow).norm() < 1e-14);
        assert!(fast.norm() > 0.5);
    }

    #[test]
    fn omega_is_real_and_top_power_vanishes() {
        let m = 3;
        let mut g = Mat::identity(m);
        g[(0, 1)] = c(0.2, 0.1);
        g[(1, 0)] = c(0.2, -0.1);
        let omega = kahler_form(&g);
        assert!(omega.reality_defect() < 1e-15);
        let top_plus_one = power(&omega, m + 1);
        assert!(top_plus_one.is_zero() || top_plus_one.max_abs() < 1e-15);
    }

    #[test]
    fn flat_volume_form_m1_and_m2() {
        // flat m=1: dν = Ω = -i dz ∧ dz̄
        let omega1 = kahler_form(&Mat::identity(1));
        let vol1 = volume_form(&omega1);
        assert!((vol1.coeff(&[0], &[0]) - c(0.0, -1.0)).norm() < 1e-15);
        // flat m=2: Ω²/2 has coefficient -1 on dz^{12} ∧ dz̄^{12} … actually
        // (-i)^2 times the interleave sign; assert against the wedge engine.
        let omega2 = kahler_form(&Mat::identity(2));
        let vol2 = volume_form(&omega2);
        let direct = wedge(&omega2, &omega2).unwrap().scale(c(0.5, 0.0));
        assert!(vol2.max_abs_diff(&direct) < 1e-15);
        // Ω²/2! = (−i)² dz¹∧dz̄¹∧dz²∧dz̄², i.e. +1 on the sorted key after
        // the interleave sign (−1) is absorbed: coefficient +1 … verify sign
        // explicitly: (−i)² = −1, interleave dz¹dz̄¹dz²dz̄² → dz^{12}dz̄^{12}
        // costs one swap, so the stored coefficient is +1.
        assert!((vol2.coeff(&[0, 1], &[0, 1]) - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn product_omega_additivity() {
        // On a product with a flat line, (1/(k+1)!) Ω^{k+1} restricted to the
        // top mixed component equals (1/k!) Ω_N^k ∧ Ω_T.
        for k in 1..=2usize {
            let m = k + 1;
            let mut g_n = Mat::zeros(m, m);
            let mut g_t = Mat::zeros(m, m);
            for a in 0..k {
                g_n[(a, a)] = c(1.0, 0.0);
            }
            g_t[(k, k)] = c(1.0, 0.0);
            let omega_n = kahler_form(&g_n);
            let omega_t = kahler_form(&g_t);
            let omega = omega_n.add(&omega_t).unwrap();
            let mut fact_k1 = 1.0;
            for i in 2..=(k + 1) {
                fact_k1 *= i as f64;
            }
            let mut fact_k = 1.0;
            for i in 2..=k {
                fact_k *= i as f64;
            }
            let lhs = power(&omega, k + 1).scale(c(1.0 / fact_k1, 0.0));
            let rhs = wedge(&power(&omega_n, k).scale(c(1.0 / fact_k, 0.0)), &omega_t).unwrap();
            assert!(lhs.max_abs_diff(&rhs) < 1e-12, "k={k}");
        }
    }

    #[test]
    fn volume_form_scales_with_determinant() {
        // random Hermitian positive g, m=2: Ω²/2 = det(g) · flat top form
        let mut g = Mat::identity(2);
        g[(0, 0)] = c(1.3, 0.0);
        g[(1, 1)] = c(0.8, 0.0);
        g[(0, 1)] = c(0.25, 0.4);
        g[(1, 0)] = c(0.25, -0.4);
        let vol = volume_form(&kahler_form(&g));
        let detg = (g[(0, 0)] * g[(1, 1)] - g[(0, 1)] * g[(1, 0)]).re;
        let flat = volume_form(&kahler_form(&Mat::identity(2)));
        assert!(vol.max_abs_diff(&flat.scale(c(detg, 0.0))) < 1e-14);
    }
}
