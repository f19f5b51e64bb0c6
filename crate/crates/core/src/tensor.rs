//! Dense complex multi-index tensors with role-tagged axes.
//!
//! Every axis of a [`LabeledTensor`] carries an [`AxisRole`] recording whether
//! it transforms as a holomorphic or anti-holomorphic index and whether it is
//! an upper or lower slot. Contraction is only permitted between compatible
//! roles: a lower against an upper slot of the same holomorphy type, or (in a
//! unitary frame, where the metric is the identity) a holomorphic-lower
//! against an anti-holomorphic-lower slot and dually for upper slots.
//!
//! Storage is dense row-major keyed by mixed-radix offsets; all axes share a
//! common extent `dim`. At desk scale (`dim <= 6`, rank `<= 12`) dense
//! storage beats anything clever.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;

/// Transformation role of one tensor axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AxisRole {
    HolLower,
    AntiHolLower,
    HolUpper,
    AntiHolUpper,
    Real,
}

impl AxisRole {
    /// Whether two roles may be contracted against each other.
    ///
    /// Lower pairs with upper of the same type; in a unitary frame lower
    /// holomorphic also pairs with lower anti-holomorphic (and dually for
    /// upper slots). Real axes pair among themselves.
    pub fn contractible_with(self, other: AxisRole) -> bool {
        use AxisRole::*;
        matches!(
            (self, other),
            (HolLower, HolUpper)
                | (HolUpper, HolLower)
                | (AntiHolLower, AntiHolUpper)
                | (AntiHolUpper, AntiHolLower)
                | (HolLower, AntiHolLower)
                | (AntiHolLower, HolLower)
                | (HolUpper, AntiHolUpper)
                | (AntiHolUpper, HolUpper)
                | (Real, Real)
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TensorError {
    /// Contraction requested between axes whose roles are incompatible.
    RoleMismatch { a: AxisRole, b: AxisRole },
    /// Factors or operands disagree on the per-axis extent.
    DimMismatch { a: usize, b: usize },
    /// Axis index out of range, or an axis used twice in one spec.
    BadAxis(usize),
    /// Symmetrization over axes of unequal role.
    MixedRoles,
}

impl fmt::Display for TensorError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TensorError::RoleMismatch { a, b } => {
                write!(f, "axis roles {a:?} and {b:?} cannot be contracted")
            }
            TensorError::DimMismatch { a, b } => write!(f, "axis extents differ: {a} vs {b}"),
            TensorError::BadAxis(ax) => write!(f, "axis {ax} out of range or repeated"),
            TensorError::MixedRoles => write!(f, "symmetrized axes must share one role"),
        }
    }
}

/// Dense complex tensor with equal extent along every axis.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledTensor {
    dim: usize,
    roles: Vec<AxisRole>,
    data: Vec<Complex64>,
}

impl LabeledTensor {
    pub fn zeros(dim: usize, roles: &[AxisRole]) -> Self {
        let len = dim.pow(roles.len() as u32);
        LabeledTensor { dim, roles: roles.to_vec(), data: vec![Complex64::new(0.0, 0.0); len] }
    }

    /// Rank-0 tensor holding a single scalar.
    pub fn scalar(value: Complex64) -> Self {
        LabeledTensor { dim: 1, roles: Vec::new(), data: vec![value] }
    }

    pub fn from_fn(dim: usize, roles: &[AxisRole], mut f: impl FnMut(&[usize]) -> Complex64) -> Self {
        let mut t = LabeledTensor::zeros(dim, roles);
        let rank = roles.len();
        let mut idx = vec![0usize; rank];
        for off in 0..t.data.len() {
            t.unravel(off, &mut idx);
            t.data[off] = f(&idx);
        }
        t
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.roles.len()
    }

    pub fn roles(&self) -> &[AxisRole] {
        &self.roles
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    fn offset(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.roles.len());
        let mut off = 0;
        for &i in idx {
            debug_assert!(i < self.dim);
            off = off * self.dim + i;
        }
        off
    }

    fn unravel(&self, mut off: usize, idx: &mut [usize]) {
        for slot in idx.iter_mut().rev() {
            *slot = off % self.dim;
            off /= self.dim;
        }
    }

    pub fn get(&self, idx: &[usize]) -> Complex64 {
        self.data[self.offset(idx)]
    }

    pub fn set(&mut self, idx: &[usize], value: Complex64) {
        let off = self.offset(idx);
        self.data[off] = value;
    }

    pub fn add_assign(&mut self, idx: &[usize], value: Complex64) {
        let off = self.offset(idx);
        self.data[off] += value;
    }

    pub fn scale(&self, factor: Complex64) -> LabeledTensor {
        let mut out = self.clone();
        for v in &mut out.data {
            *v *= factor;
        }
        out
    }

    pub fn add(&self, other: &LabeledTensor) -> Result<LabeledTensor, TensorError> {
        if self.dim != other.dim {
            return Err(TensorError::DimMismatch { a: self.dim, b: other.dim });
        }
        if self.roles != other.roles {
            return Err(TensorError::MixedRoles);
        }
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(other.data.iter()) {
            *a += b;
        }
        Ok(out)
    }

    /// Entrywise sup-norm of the difference; used by every vanishing test.
    pub fn max_abs_diff(&self, other: &LabeledTensor) -> Result<f64, TensorError> {
        if self.dim != other.dim || self.roles.len() != other.roles.len() {
            return Err(TensorError::DimMismatch { a: self.dim, b: other.dim });
        }
        Ok(self
            .data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Reorder axes by `perm`: axis `i` of the result is axis `perm[i]` of `self`.
    pub fn permute_axes(&self, perm: &[usize]) -> LabeledTensor {
        assert_eq!(perm.len(), self.roles.len());
        let roles: Vec<AxisRole> = perm.iter().map(|&p| self.roles[p]).collect();
        let mut out = LabeledTensor::zeros(self.dim, &roles);
        let rank = perm.len();
        let mut idx = vec![0usize; rank];
        let mut src = vec![0usize; rank];
        for off in 0..out.data.len() {
            out.unravel(off, &mut idx);
            for (i, &p) in perm.iter().enumerate() {
                src[p] = idx[i];
            }
            out.data[off] = self.get(&src);
        }
        out
    }

    /// Average over all permutations of the listed axes. Idempotent; the
    /// listed axes must share a single role.
    pub fn symmetrize(&self, axes: &[usize]) -> Result<LabeledTensor, TensorError> {
        if axes.is_empty() {
            return Ok(self.clone());
        }
        let role = self.roles[axes[0]];
        for &ax in axes {
            if ax >= self.roles.len() {
                return Err(TensorError::BadAxis(ax));
            }
            if self.roles[ax] != role {
                return Err(TensorError::MixedRoles);
            }
        }
        let mut perms: Vec<Vec<usize>> = Vec::new();
        let mut base: Vec<usize> = axes.to_vec();
        heap_permutations(&mut base, &mut perms);
        let mut out = LabeledTensor::zeros(self.dim, &self.roles);
        let rank = self.rank();
        let mut idx = vec![0usize; rank];
        let mut src = vec![0usize; rank];
        let weight = 1.0 / perms.len() as f64;
        for off in 0..out.data.len() {
            out.unravel(off, &mut idx);
            let mut acc = Complex64::new(0.0, 0.0);
            for perm in &perms {
                src.copy_from_slice(&idx);
                for (pos, &ax) in axes.iter().enumerate() {
                    src[ax] = idx[perm[pos]];
                }
                acc += self.get(&src);
            }
            out.data[off] = acc * weight;
        }
        Ok(out)
    }

    /// Deviation from Hermitian symmetry under the axis permutation `perm`
    /// (which should swap holomorphic with anti-holomorphic slots):
    /// `max |t[idx] - conj(t[perm(idx)])|`.
    pub fn hermitian_defect(&self, perm: &[usize]) -> f64 {
        let rank = self.rank();
        let mut idx = vec![0usize; rank];
        let mut swapped = vec![0usize; rank];
        let mut worst = 0.0f64;
        for off in 0..self.data.len() {
            self.unravel(off, &mut idx);
            for (i, &p) in perm.iter().enumerate() {
                swapped[i] = idx[p];
            }
            let d = (self.data[off] - self.get(&swapped).conj()).norm();
            worst = worst.max(d);
        }
        worst
    }
}

fn heap_permutations(items: &mut [usize], out: &mut Vec<Vec<usize>>) {
    let n = items.len();
    if n <= 1 {
        out.push(items.to_vec());
        return;
    }
    // Heap's algorithm, iterative.
    let mut c = vec![0usize; n];
    out.push(items.to_vec());
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                items.swap(0, i);
            } else {
                items.swap(c[i], i);
            }
            out.push(items.to_vec());
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

/// One contraction pairing inside a multi-factor contraction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AxisRef {
    pub factor: usize,
    pub axis: usize,
}

/// A pairing of axes across (or within) a list of factors, plus the ordering
/// of the remaining free axes in the result.
#[derive(Clone, Debug, Default)]
pub struct ContractionSpec {
    pub pairs: Vec<(AxisRef, AxisRef)>,
    /// Free axes of the result, in order. Must list every unpaired axis once.
    pub free: Vec<AxisRef>,
}

/// Full sum over all paired indices of the factors, free axes in spec order.
///
/// Executed by pair-at-a-time reduction: factors are first self-traced over
/// internal pairs, then folded left to right, contracting at each step the
/// pairs connecting the accumulated tensor with the incoming factor.
pub fn contract(factors: &[&LabeledTensor], spec: &ContractionSpec) -> Result<LabeledTensor, TensorError> {
    let dim = factors.first().map(|t| t.dim()).unwrap_or(1);
    for f in factors {
        if f.dim() != dim {
            return Err(TensorError::DimMismatch { a: dim, b: f.dim() });
        }
    }
    // Validate role compatibility and that each axis appears exactly once.
    let mut seen: Vec<Vec<u8>> = factors.iter().map(|f| vec![0u8; f.rank()]).collect();
    let mut mark = |r: AxisRef| -> Result<(), TensorError> {
        if r.factor >= factors.len() || r.axis >= factors[r.factor].rank() {
            return Err(TensorError::BadAxis(r.axis));
        }
        if seen[r.factor][r.axis] != 0 {
            return Err(TensorError::BadAxis(r.axis));
        }
        seen[r.factor][r.axis] = 1;
        Ok(())
    };
    for &(a, b) in &spec.pairs {
        mark(a)?;
        mark(b)?;
        let ra = factors[a.factor].roles()[a.axis];
        let rb = factors[b.factor].roles()[b.axis];
        if !ra.contractible_with(rb) {
            return Err(TensorError::RoleMismatch { a: ra, b: rb });
        }
    }
    for &r in &spec.free {
        mark(r)?;
    }
    for (fi, marks) in seen.iter().enumerate() {
        if marks.contains(&0) {
            return Err(TensorError::BadAxis(fi));
        }
    }

    // Fold. `origin[i]` tracks which (factor, axis) each axis of `acc` came from.
    let mut acc = LabeledTensor::scalar(Complex64::new(1.0, 0.0));
    let mut origin: Vec<AxisRef> = Vec::new();
    for (fi, factor) in factors.iter().enumerate() {
        // Internal pairs of this factor.
        let internal: Vec<(usize, usize)> = spec
            .pairs
            .iter()
            .filter(|(a, b)| a.factor == fi && b.factor == fi)
            .map(|(a, b)| (a.axis, b.axis))
            .collect();
        let (traced, kept_axes) = self_trace(factor, &internal);
        // Pairs connecting the accumulated tensor with this factor.
        let mut cross: Vec<(usize, usize)> = Vec::new();
        for &(a, b) in &spec.pairs {
            let (from_acc, from_new) = if b.factor == fi && a.factor < fi {
                (a, b)
            } else if a.factor == fi && b.factor < fi {
                (b, a)
            } else {
                continue;
            };
            let acc_pos = origin.iter().position(|o| *o == from_acc).ok_or(TensorError::BadAxis(from_acc.axis))?;
            let new_pos = kept_axes.iter().position(|&k| k == from_new.axis).ok_or(TensorError::BadAxis(from_new.axis))?;
            cross.push((acc_pos, new_pos));
        }
        let (merged, acc_keep, new_keep) = contract_pair(&acc, &traced, &cross);
        let mut new_origin = Vec::with_capacity(acc_keep.len() + new_keep.len());
        for &p in &acc_keep {
            new_origin.push(origin[p]);
        }
        for &p in &new_keep {
            new_origin.push(AxisRef { factor: fi, axis: kept_axes[p] });
        }
        acc = merged;
        origin = new_origin;
    }
    // Final permutation into the requested free-axis order.
    let perm: Vec<usize> = spec
        .free
        .iter()
        .map(|want| origin.iter().position(|o| o == want).expect("free axis lost in fold"))
        .collect();
    Ok(acc.permute_axes(&perm))
}

/// Trace `t` over the listed internal axis pairs. Returns the traced tensor
/// and the original positions of the surviving axes, in order.
pub fn self_trace(t: &LabeledTensor, pairs: &[(usize, usize)]) -> (LabeledTensor, Vec<usize>) {
    if pairs.is_empty() {
        return (t.clone(), (0..t.rank()).collect());
    }
    let rank = t.rank();
    let mut paired = vec![false; rank];
    for &(a, b) in pairs {
        paired[a] = true;
        paired[b] = true;
    }
    let kept: Vec<usize> = (0..rank).filter(|&i| !paired[i]).collect();
    let roles: Vec<AxisRole> = kept.iter().map(|&i| t.roles()[i]).collect();
    let mut out = LabeledTensor::zeros(t.dim(), &roles);
    let dim = t.dim();
    let np = pairs.len();
    let mut out_idx = vec![0usize; kept.len()];
    let mut src = vec![0usize; rank];
    for off in 0..out.data.len() {
        out.unravel(off, &mut out_idx);
        let mut acc = Complex64::new(0.0, 0.0);
        let mut sum_idx = vec![0usize; np];
        loop {
            for (slot, &axis) in kept.iter().enumerate() {
                src[axis] = out_idx[slot];
            }
            for (p, &(a, b)) in pairs.iter().enumerate() {
                src[a] = sum_idx[p];
                src[b] = sum_idx[p];
            }
            acc += t.get(&src);
            // increment mixed-radix counter over the summed indices
            let mut carry = true;
            for slot in sum_idx.iter_mut() {
                if carry {
                    *slot += 1;
                    if *slot == dim {
                        *slot = 0;
                    } else {
                        carry = false;
                    }
                }
            }
            if carry {
                break;
            }
        }
        out.data[off] = acc;
    }
    (out, kept)
}

/// Contract two tensors over the given `(axis of a, axis of b)` pairs.
/// Returns the result together with the kept axis positions of `a` and `b`
/// (result axes are: kept axes of `a` in order, then kept axes of `b`).
pub fn contract_pair(
    a: &LabeledTensor,
    b: &LabeledTensor,
    pairs: &[(usize, usize)],
) -> (LabeledTensor, Vec<usize>, Vec<usize>) {
    let dim = if a.rank() == 0 { b.dim() } else { a.dim() };
    let mut a_paired = vec![false; a.rank()];
    let mut b_paired = vec![false; b.rank()];
    for &(pa, pb) in pairs {
        a_paired[pa] = true;
        b_paired[pb] = true;
    }
    let a_keep: Vec<usize> = (0..a.rank()).filter(|&i| !a_paired[i]).collect();
    let b_keep: Vec<usize> = (0..b.rank()).filter(|&i| !b_paired[i]).collect();
    let mut roles: Vec<AxisRole> = a_keep.iter().map(|&i| a.roles()[i]).collect();
    roles.extend(b_keep.iter().map(|&i| b.roles()[i]));
    let mut out = LabeledTensor::zeros(dim, &roles);
    let mut out_idx = vec![0usize; roles.len()];
    let mut ia = vec![0usize; a.rank()];
    let mut ib = vec![0usize; b.rank()];
    let np = pairs.len();
    for off in 0..out.data.len() {
        out.unravel(off, &mut out_idx);
        for (slot, &ax) in a_keep.iter().enumerate() {
            ia[ax] = out_idx[slot];
        }
        for (slot, &ax) in b_keep.iter().enumerate() {
            ib[ax] = out_idx[a_keep.len() + slot];
        }
        let mut acc = Complex64::new(0.0, 0.0);
        let mut sum_idx = vec![0usize; np];
        loop {
            for (p, &(pa, pb)) in pairs.iter().enumerate() {
                ia[pa] = sum_idx[p];
                ib[pb] = sum_idx[p];
            }
            acc += a.get(&ia) * b.get(&ib);
            let mut carry = true;
            for slot in sum_idx.iter_mut() {
                if carry {
                    *slot += 1;
                    if *slot == dim {
                        *slot = 0;
                    } else {
                        carry = false;
                    }
                }
            }
            if carry {
                break;
            }
        }
        out.data[off] = acc;
    }
    (out, a_keep, b_keep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use AxisRole::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_contracts_to_vector() {
        // contract δ^a_b with v_a → v_b
        let dim = 3;
        let delta = LabeledTensor::from_fn(dim, &[HolUpper, HolLower], |i| {
            if i[0] == i[1] { c(1.0, 0.0) } else { c(0.0, 0.0) }
        });
        let v = LabeledTensor::from_fn(dim, &[HolLower], |i| c(i[0] as f64 + 1.0, -(i[0] as f64)));
        let spec = ContractionSpec {
            pairs: vec![(AxisRef { factor: 0, axis: 0 }, AxisRef { factor: 1, axis: 0 })],
            free: vec![AxisRef { factor: 0, axis: 1 }],
        };
        let out = contract(&[&delta, &v], &spec).unwrap();
        assert_eq!(out.rank(), 1);
        assert!(out.max_abs_diff(&v).unwrap() < 1e-15);
    }

    #[test]
    fn zero_tensor_contracts_to_zero() {
        let z = LabeledTensor::zeros(2, &[HolLower, AntiHolLower]);
        let v = LabeledTensor::from_fn(2, &[AntiHolUpper], |i| c(1.0 + i[0] as f64, 0.5));
        let spec = ContractionSpec {
            pairs: vec![(AxisRef { factor: 0, axis: 1 }, AxisRef { factor: 1, axis: 0 })],
            free: vec![AxisRef { factor: 0, axis: 0 }],
        };
        let out = contract(&[&z, &v], &spec).unwrap();
        assert!(out.max_abs() == 0.0);
    }

    #[test]
    fn role_mismatch_is_rejected() {
        let a = LabeledTensor::zeros(2, &[HolLower]);
        let b = LabeledTensor::zeros(2, &[HolLower]);
        let spec = ContractionSpec {
            pairs: vec![(AxisRef { factor: 0, axis: 0 }, AxisRef { factor: 1, axis: 0 })],
            free: vec![],
        };
        match contract(&[&a, &b], &spec) {
            Err(TensorError::RoleMismatch { .. }) => {}
            other => panic!("expected role mismatch, got {other:?}"),
        }
    }

    #[test]
    fn full_self_pairing_matches_loop_nest() {
        // random 2x2x2x2 tensor fully self-paired two ways vs. a brute-force
        // nested-loop sum written independently below.
        let dim = 2;
        let t = LabeledTensor::from_fn(dim, &[HolLower, AntiHolLower, HolUpper, AntiHolUpper], |i| {
            let k = (i[0] * 27 + i[1] * 9 + i[2] * 3 + i[3]) as f64;
            c(libm::sin(k * 1.7) + 0.3, libm::cos(k * 0.9) - 0.1)
        });
        // pairing A: (0,2), (1,3)
        let spec_a = ContractionSpec {
            pairs: vec![
                (AxisRef { factor: 0, axis: 0 }, AxisRef { factor: 0, axis: 2 }),
                (AxisRef { factor: 0, axis: 1 }, AxisRef { factor: 0, axis: 3 }),
            ],
            free: vec![],
        };
        let got_a = contract(&[&t], &spec_a).unwrap().get(&[]);
        let mut want_a = c(0.0, 0.0);
        for x in 0..dim {
            for y in 0..dim {
                want_a += t.get(&[x, y, x, y]);
            }
        }
        assert!((got_a - want_a).norm() < 1e-13);

        // pairing B: unitary-frame pairs (0,1) and (2,3)
        let spec_b = ContractionSpec {
            pairs: vec![
                (AxisRef { factor: 0, axis: 0 }, AxisRef { factor: 0, axis: 1 }),
                (AxisRef { factor: 0, axis: 2 }, AxisRef { factor: 0, axis: 3 }),
            ],
            free: vec![],
        };
        let got_b = contract(&[&t], &spec_b).unwrap().get(&[]);
        let mut want_b = c(0.0, 0.0);
        for x in 0..dim {
            for y in 0..dim {
                want_b += t.get(&[x, x, y, y]);
            }
        }
        assert!((got_b - want_b).norm() < 1e-13);
    }

    #[test]
    fn two_factor_contraction_matches_loop_nest() {
        let dim = 3;
        let a = LabeledTensor::from_fn(dim, &[HolLower, AntiHolLower], |i| {
            c((i[0] * 3 + i[1]) as f64 * 0.37 - 1.0, (i[0] + i[1]) as f64 * 0.21)
        });
        let b = LabeledTensor::from_fn(dim, &[AntiHolUpper, HolLower], |i| {
            c(libm::sin(i[0] as f64 + 2.0 * i[1] as f64), 0.11 * i[1] as f64)
        });
        let spec = ContractionSpec {
            pairs: vec![(AxisRef { factor: 0, axis: 1 }, AxisRef { factor: 1, axis: 0 })],
            free: vec![AxisRef { factor: 1, axis: 1 }, AxisRef { factor: 0, axis: 0 }],
        };
        let out = contract(&[&a, &b], &spec).unwrap();
        for j in 0..dim {
            for i in 0..dim {
                let mut want = c(0.0, 0.0);
                for s in 0..dim {
                    want += a.get(&[i, s]) * b.get(&[s, j]);
                }
                assert!((out.get(&[j, i]) - want).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn symmetrize_matches_permutation_oracle_rank3() {
        let dim = 2;
        let t = LabeledTensor::from_fn(dim, &[HolLower, HolLower, HolLower], |i| {
            c((i[0] * 4 + i[1] * 2 + i[2]) as f64 * 0.5 - 1.2, (i[0] + 2 * i[1]) as f64 * 0.3)
        });
        let sym = t.symmetrize(&[0, 1, 2]).unwrap();
        // independent oracle: explicit average over all 6 arrangements
        for a in 0..dim {
            for b in 0..dim {
                for cc in 0..dim {
                    let want = (t.get(&[a, b, cc])
                        + t.get(&[a, cc, b])
                        + t.get(&[b, a, cc])
                        + t.get(&[b, cc, a])
                        + t.get(&[cc, a, b])
                        + t.get(&[cc, b, a]))
                        / 6.0;
                    assert!((sym.get(&[a, b, cc]) - want).norm() < 1e-14);
                }
            }
        }
        // idempotence
        let twice = sym.symmetrize(&[0, 1, 2]).unwrap();
        assert!(twice.max_abs_diff(&sym).unwrap() < 1e-15);
    }

    #[test]
    fn symmetrize_kills_antisymmetric_pair() {
        let dim = 3;
        let t = LabeledTensor::from_fn(dim, &[Real, Real], |i| {
            c(i[0] as f64 - i[1] as f64, 2.0 * (i[0] as f64 - i[1] as f64))
        });
        let sym = t.symmetrize(&[0, 1]).unwrap();
        assert!(sym.max_abs() < 1e-15);
    }

    #[test]
    fn max_abs_diff_basics() {
        let t = LabeledTensor::from_fn(2, &[Real], |i| c(1.0 + i[0] as f64, -0.5));
        assert_eq!(t.max_abs_diff(&t).unwrap(), 0.0);
        let neg = t.scale(c(-1.0, 0.0));
        let d = t.max_abs_diff(&neg).unwrap();
        assert!((d - 2.0 * t.max_abs()).abs() < 1e-15);
    }
}
