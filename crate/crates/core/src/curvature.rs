//! Curvature of a Kähler metric, read off the normalized jets.
//!
//! At a point with normalized coordinates the curvature tensor is literally
//! the order-2 jet block,
//!
//! ```text
//! R(∂_{z_a}, ∂_{z̄_b}, ∂_{z̄_c}, ∂_{z_d}) = g({a,d};{b,c}),
//! ```
//!
//! and the first covariant derivative is the `(|A|, |B|) = (3, 2)` block.
//! The array is stored with slots `(hol, antihol, antihol, hol)` in exactly
//! this order.
//!
//! [`KahlerCurvature::form_matrix`] presents the curvature operator as a
//! matrix of `(1,1)`-forms in the unitary frame:
//!
//! ```text
//! F[α][β] = -i Σ_{γδ} R[γ][δ̄][ᾱ][β] dz^γ ∧ dz̄^δ .
//! ```
//!
//! The `-i` makes traces of powers of `F` pair with powers of the Kähler
//! form to real scalars; with this convention the trace of `F` integrates
//! over the projective line (after the `1/2π` Chern scaling) to `+2`, and
//! the degree-2 scalar invariants come out with the signs of their printed
//! index formulas. See the calibration tests in the `transgress` module.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::forms::{FormMatrix, PQForm};
use crate::jets::{JetError, JetTable};
use crate::linalg::{cholesky, invert_lower, Mat};
use crate::tensor::{AxisRole, LabeledTensor};

/// Raw 2-jet data of a metric in arbitrary holomorphic coordinates, as dense
/// arrays: the order-0 block, the first jets `d1[a][q][d] = ∂_d g_{aq̄}` and
/// the second jets `s2[a][b][c][d] = ∂_d ∂̄_c g_{ab̄}`.
#[derive(Clone, Debug)]
pub struct RawJets2 {
    pub m: usize,
    pub g: Mat,
    pub d1: Vec<Complex64>,
    pub s2: Vec<Complex64>,
}

impl RawJets2 {
    pub fn zeros(m: usize) -> Self {
        RawJets2 {
            m,
            g: Mat::zeros(m, m),
            d1: vec![Complex64::new(0.0, 0.0); m * m * m],
            s2: vec![Complex64::new(0.0, 0.0); m * m * m * m],
        }
    }

    #[inline]
    pub fn d1_at(&self, a: usize, q: usize, d: usize) -> Complex64 {
        self.d1[(a * self.m + q) * self.m + d]
    }

    #[inline]
    pub fn d1_set(&mut self, a: usize, q: usize, d: usize, v: Complex64) {
        self.d1[(a * self.m + q) * self.m + d] = v;
    }

    #[inline]
    pub fn s2_at(&self, a: usize, b: usize, c: usize, d: usize) -> Complex64 {
        self.s2[((a * self.m + b) * self.m + c) * self.m + d]
    }

    #[inline]
    pub fn s2_set(&mut self, a: usize, b: usize, c: usize, d: usize, v: Complex64) {
        self.s2[((a * self.m + b) * self.m + c) * self.m + d] = v;
    }

    /// The raw jets of the conformally scaled metric `λ g`.
    pub fn scaled(&self, f: f64) -> RawJets2 {
        let mut out = self.clone();
        out.g = Mat::from_fn(self.m, self.m, |i, j| self.g[(i, j)] * f);
        for v in out.d1.iter_mut() {
            *v *= f;
        }
        for v in out.s2.iter_mut() {
            *v *= f;
        }
        out
    }

    /// Extract the raw arrays from a jet table (any frame).
    pub fn from_table(j: &JetTable) -> RawJets2 {
        let m = j.m();
        let mut raw = RawJets2::zeros(m);
        raw.g = j.order0();
        for a in 0..m as u8 {
            for q in 0..m as u8 {
                for d in 0..m as u8 {
                    raw.d1_set(a as usize, q as usize, d as usize, j.entry(&[a, d], &[q]));
                }
            }
        }
        for a in 0..m as u8 {
            for b in 0..m as u8 {
                for c in 0..m as u8 {
                    for d in 0..m as u8 {
                        raw.s2_set(a as usize, b as usize, c as usize, d as usize, j.entry(&[a, d], &[b, c]));
                    }
                }
            }
        }
        raw
    }
}

/// Curvature directly from raw 2-jets in an arbitrary frame:
///
/// ```text
/// R̃[a][b̄][c̄][d] = ∂_d ∂̄_c g_{ab̄} - Σ_{p,q} (∂_d g_{aq̄}) g^{qp} (∂̄_c g_{pb̄})
/// ```
///
/// followed by the tensor transform into the unitary frame `z = L w` of the
/// Gram–Schmidt linear change (`L^T g L̄ = 1`). The higher normalizing
/// changes fix jets, not the curvature value at the point, so this agrees
/// with the full normalization route (tested against it) at a fraction of
/// the cost. Returns the curvature and `L` (needed to carry variation
/// Hessians into the same frame).
pub fn curvature_from_raw(raw: &RawJets2) -> Result<(KahlerCurvature, Mat), JetError> {
    let m = raw.m;
    let chol = cholesky(&raw.g)?;
    let cinv = invert_lower(&chol);
    let linear = cinv.transpose(); // z = linear · w
    let ginv = cinv.adjoint().mul(&cinv); // g^{-1} = (C C^H)^{-1} = C^{-H} C^{-1}
    let mut rt = vec![Complex64::new(0.0, 0.0); m * m * m * m];
    for a in 0..m {
        for b in 0..m {
            for c in 0..m {
                for d in 0..m {
                    let mut v = raw.s2_at(a, b, c, d);
                    for q in 0..m {
                        let da = raw.d1_at(a, q, d);
                        if da == Complex64::new(0.0, 0.0) {
                            continue;
                        }
                        for p in 0..m {
                            v -= da * ginv[(q, p)] * raw.d1_at(b, p, c).conj();
                        }
                    }
                    rt[((a * m + b) * m + c) * m + d] = v;
                }
            }
        }
    }
    // transform one slot at a time: hol slots with L, antihol with conj(L)
    let lc = linear.conj();
    let idx = |a: usize, b: usize, c: usize, d: usize| ((a * m + b) * m + c) * m + d;
    let mut next = vec![Complex64::new(0.0, 0.0); m * m * m * m];
    // slot 0 (hol)
    for out_a in 0..m {
        for b in 0..m {
            for c in 0..m {
                for d in 0..m {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for a in 0..m {
                        acc += linear[(a, out_a)] * rt[idx(a, b, c, d)];
                    }
                    next[idx(out_a, b, c, d)] = acc;
                }
            }
        }
    }
    core::mem::swap(&mut rt, &mut next);
    // slot 1 (antihol)
    for a in 0..m {
        for out_b in 0..m {
            for c in 0..m {
                for d in 0..m {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for b in 0..m {
                        acc += lc[(b, out_b)] * rt[idx(a, b, c, d)];
                    }
                    next[idx(a, out_b, c, d)] = acc;
                }
            }
        }
    }
    core::mem::swap(&mut rt, &mut next);
    // slot 2 (antihol)
    for a in 0..m {
        for b in 0..m {
            for out_c in 0..m {
                for d in 0..m {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for c in 0..m {
                        acc += lc[(c, out_c)] * rt[idx(a, b, c, d)];
                    }
                    next[idx(a, b, out_c, d)] = acc;
                }
            }
        }
    }
    core::mem::swap(&mut rt, &mut next);
    // slot 3 (hol)
    for a in 0..m {
        for b in 0..m {
            for c in 0..m {
                for out_d in 0..m {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for d in 0..m {
                        acc += linear[(d, out_d)] * rt[idx(a, b, c, d)];
                    }
                    next[idx(a, b, c, out_d)] = acc;
                }
            }
        }
    }
    Ok((KahlerCurvature { m, r: next, dr: None }, linear))
}

/// The `(2,2)`-index curvature array `R[a][b̄][c̄][d]`, plus optionally the
/// rank-5 array for its first covariant derivative.
#[derive(Clone, Debug)]
pub struct KahlerCurvature {
    pub m: usize,
    r: Vec<Complex64>,
    dr: Option<Vec<Complex64>>,
}

impl KahlerCurvature {
    /// Extract curvature from a table already in normalized form.
    ///
    /// Panics if the table is not normalized; use [`KahlerCurvature::from_jets`]
    /// for the normalizing wrapper.
    pub fn from_normalized_jets(j: &JetTable) -> KahlerCurvature {
        assert!(j.is_normalized(), "curvature extraction needs normalized jets");
        assert!(j.max_order() >= 2);
        let m = j.m();
        let mut r = vec![Complex64::new(0.0, 0.0); m * m * m * m];
        for a in 0..m as u8 {
            for b in 0..m as u8 {
                for c in 0..m as u8 {
                    for d in 0..m as u8 {
                        r[idx4(m, a, b, c, d)] = j.entry(&[a, d], &[b, c]);
                    }
                }
            }
        }
        let dr = if j.max_order() >= 3 {
            let mut v = vec![Complex64::new(0.0, 0.0); m * m * m * m * m];
            for a in 0..m as u8 {
                for b in 0..m as u8 {
                    for c in 0..m as u8 {
                        for d in 0..m as u8 {
                            for e in 0..m as u8 {
                                v[idx5(m, a, b, c, d, e)] = j.entry(&[a, d, e], &[b, c]);
                            }
                        }
                    }
                }
            }
            Some(v)
        } else {
            None
        };
        KahlerCurvature { m, r, dr }
    }

    /// Curvature of an arbitrary table; returns `true` in the second slot if
    /// the input had to be normalized first.
    pub fn from_jets(j: &JetTable) -> Result<(KahlerCurvature, bool), JetError> {
        if j.is_normalized() {
            Ok((KahlerCurvature::from_normalized_jets(j), false))
        } else {
            let (norm, _) = j.normalize()?;
            Ok((KahlerCurvature::from_normalized_jets(&norm), true))
        }
    }

    /// Component `R(∂_{z_a}, ∂_{z̄_b}, ∂_{z̄_c}, ∂_{z_d})`.
    #[inline]
    pub fn at(&self, a: usize, b: usize, c: usize, d: usize) -> Complex64 {
        self.r[((a * self.m + b) * self.m + c) * self.m + d]
    }

    pub fn has_derivative(&self) -> bool {
        self.dr.is_some()
    }

    /// Component `∇R(∂_{z_a}, ∂_{z̄_b}, ∂_{z̄_c}, ∂_{z_d}; ∂_{z_e})`.
    #[inline]
    pub fn dr_at(&self, a: usize, b: usize, c: usize, d: usize, e: usize) -> Complex64 {
        let m = self.m;
        self.dr.as_ref().expect("order-3 jets not available")[(((a * m + b) * m + c) * m + d) * m + e]
    }

    pub fn max_abs(&self) -> f64 {
        self.r.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Worst violation of the pair symmetries `a↔d`, `b̄↔c̄`.
    pub fn symmetry_defect(&self) -> f64 {
        let m = self.m;
        let mut worst = 0.0f64;
        for a in 0..m {
            for b in 0..m {
                for c in 0..m {
                    for d in 0..m {
                        let v = self.at(a, b, c, d);
                        worst = worst.max((v - self.at(d, b, c, a)).norm());
                        worst = worst.max((v - self.at(a, c, b, d)).norm());
                    }
                }
            }
        }
        worst
    }

    /// Worst violation of `conj R[a][b̄][c̄][d] = R[b][ā][d̄][c]`.
    pub fn hermitian_defect(&self) -> f64 {
        let m = self.m;
        let mut worst = 0.0f64;
        for a in 0..m {
            for b in 0..m {
                for c in 0..m {
                    for d in 0..m {
                        let v = self.at(a, b, c, d).conj();
                        worst = worst.max((v - self.at(b, a, d, c)).norm());
                    }
                }
            }
        }
        worst
    }

    /// The curvature operator as a matrix of `(1,1)`-forms in the unitary
    /// frame (see module docs for the sign convention).
    pub fn form_matrix(&self) -> FormMatrix {
        let m = self.m;
        let minus_i = Complex64::new(0.0, -1.0);
        let mut f = FormMatrix::zero(m);
        for alpha in 0..m {
            for beta in 0..m {
                let mut entry = PQForm::zero(m, 1, 1);
                for gamma in 0..m {
                    for delta in 0..m {
                        let c = minus_i * self.at(gamma, delta, alpha, beta);
                        if c != Complex64::new(0.0, 0.0) {
                            entry = entry
                                .add(&PQForm::monomial(m, &[gamma as u8], &[delta as u8], c))
                                .expect("bidegree (1,1)");
                        }
                    }
                }
                *f.entry_mut(alpha, beta) = entry;
            }
        }
        f
    }

    /// View as a role-tagged tensor `(hol, antihol, antihol, hol)`, all
    /// slots lower.
    pub fn as_tensor(&self) -> LabeledTensor {
        use AxisRole::*;
        LabeledTensor::from_fn(self.m, &[HolLower, AntiHolLower, AntiHolLower, HolLower], |i| {
            self.at(i[0], i[1], i[2], i[3])
        })
    }
}

#[inline]
fn idx4(m: usize, a: u8, b: u8, c: u8, d: u8) -> usize {
    ((a as usize * m + b as usize) * m + c as usize) * m + d as usize
}

#[inline]
fn idx5(m: usize, a: u8, b: u8, c: u8, d: u8, e: u8) -> usize {
    (((a as usize * m + b as usize) * m + c as usize) * m + d as usize) * m + e as usize
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jets::PotentialModel;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn flat_curvature_vanishes() {
        let t = JetTable::flat(2, 2);
        let r = KahlerCurvature::from_normalized_jets(&t);
        assert_eq!(r.max_abs(), 0.0);
    }

    #[test]
    fn fubini_study_m1_curvature() {
        let mut p = PotentialModel::new(1, false);
        p.add_real_term(&[0], &[0], c(1.0, 0.0));
        p.add_real_term(&[0, 0], &[0, 0], c(-0.5, 0.0));
        p.add_real_term(&[0, 0, 0], &[0, 0, 0], c(1.0 / 3.0, 0.0));
        let t = p.jets_at(&[c(0.0, 0.0)], 2).unwrap();
        let (r, renormalized) = KahlerCurvature::from_jets(&t).unwrap();
        assert!(!renormalized); // already normal at the origin
        assert!((r.at(0, 0, 0, 0) - c(-2.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn symmetries_hold_by_construction() {
        let t = JetTable::random(3, 3, 9, 0.8);
        let r = KahlerCurvature::from_normalized_jets(&t);
        assert_eq!(r.symmetry_defect(), 0.0);
        assert_eq!(r.hermitian_defect(), 0.0);
        assert!(r.has_derivative());
    }

    #[test]
    fn prescription_reaches_any_symmetric_array() {
        // prescribing the matching jets reproduces a target array exactly
        let target = |a: usize, b: usize, cc: usize, d: usize| {
            c(
                (a + d) as f64 * 0.3 + (b * cc) as f64 * 0.11,
                (a as f64 - d as f64) * 0.0 + (b as f64 - cc as f64) * 0.07,
            )
        };
        // symmetric in (a,d) and (b,c); hermitian requires conj-mirror, so
        // prescribe from the jet side instead and read back.
        let m = 2;
        let mut vals = Vec::new();
        for a in 0..m as u8 {
            for d in a..m as u8 {
                for b in 0..m as u8 {
                    for cc in b..m as u8 {
                        let v = target(a as usize, b as usize, cc as usize, d as usize);
                        vals.push((vec![a, d], vec![b, cc], v));
                    }
                }
            }
        }
        // keep only one representative per conjugate pair
        let t = JetTable::prescribe(m, 2, &vals);
        // the ad-hoc target above need not satisfy conjugate symmetry; if
        // prescribe rejects it, symmetrize by construction instead
        let t = match t {
            Ok(t) => t,
            Err(_) => {
                let mut sym_vals = Vec::new();
                for (a, b, v) in vals {
                    if (a.clone(), b.clone()) <= (b.clone(), a.clone()) {
                        sym_vals.push((a, b, v));
                    }
                }
                JetTable::prescribe(m, 2, &sym_vals).unwrap()
            }
        };
        let r = KahlerCurvature::from_normalized_jets(&t);
        for a in 0..m {
            for b in 0..m {
                for cc in 0..m {
                    for d in 0..m {
                        assert_eq!(r.at(a, b, cc, d), t.entry(&[a as u8, d as u8], &[b as u8, cc as u8]));
                    }
                }
            }
        }
        assert_eq!(r.symmetry_defect(), 0.0);
    }

    #[test]
    fn direct_curvature_matches_the_normalization_route() {
        // oracle: full series normalization, then jet read-off
        let mut p = PotentialModel::new(2, true);
        p.add_real_term(&[0, 0], &[1], c(0.21, -0.4));
        p.add_real_term(&[0, 1], &[0, 1], c(0.3, 0.0));
        p.add_real_term(&[0], &[1], c(0.05, 0.02));
        p.add_real_term(&[1, 1], &[0, 0], c(-0.12, 0.2));
        let t = p.jets_at(&[c(0.12, -0.3), c(-0.2, 0.31)], 2).unwrap();
        let (norm, change) = t.normalize().unwrap();
        let slow = KahlerCurvature::from_normalized_jets(&norm);
        let raw = RawJets2::from_table(&t);
        let (fast, linear) = curvature_from_raw(&raw).unwrap();
        assert!(linear.max_abs_diff(&change.linear) < 1e-12);
        let mut worst = 0.0f64;
        for a in 0..2 {
            for b in 0..2 {
                for cc in 0..2 {
                    for d in 0..2 {
                        worst = worst.max((fast.at(a, b, cc, d) - slow.at(a, b, cc, d)).norm());
                    }
                }
            }
        }
        assert!(worst < 1e-10, "direct formula deviates by {worst}");
    }

    #[test]
    fn two_random_tables_give_distinct_curvature() {
        let t1 = JetTable::random(2, 2, 1, 0.5);
        let t2 = JetTable::random(2, 2, 2, 0.5);
        let r1 = KahlerCurvature::from_normalized_jets(&t1);
        let r2 = KahlerCurvature::from_normalized_jets(&t2);
        let mut diff = 0.0f64;
        for a in 0..2 {
            for b in 0..2 {
                for cc in 0..2 {
                    for d in 0..2 {
                        diff = diff.max((r1.at(a, b, cc, d) - r2.at(a, b, cc, d)).norm());
                    }
                }
            }
        }
        assert!(diff > 1e-3, "independent draws collapsed");
    }
}
