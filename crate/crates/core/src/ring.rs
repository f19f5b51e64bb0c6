//! The ring of conjugation-invariant polynomials `C[Tr_1, .., Tr_m]`.
//!
//! An [`InvariantPolynomial`] is a linear combination of partition-indexed
//! monomials: the partition `(n_1, .., n_l)` denotes `Tr_{n_1} ··· Tr_{n_l}`.
//! The graded piece of degree `k` has the partitions of `k` with parts
//! `<= m` as a basis, hence dimension `ρ(k)` as soon as `k <= m`.
//!
//! Restriction to a smaller matrix algebra acts as the identity on the
//! generators, `r(Tr_i) = Tr_i`; a monomial carrying a part larger than the
//! target size is re-expressed through Newton's identities (for an `n x n`
//! matrix the elementary symmetric functions above degree `n` vanish, which
//! closes the power sums `Tr_{j>n}` over `Tr_1, .., Tr_n`). The rewrite is
//! validated against direct substitution `B ↦ B ⊕ 0` in the tests.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::forms::{wedge, FormMatrix, PQForm};
use crate::linalg::Mat;

/// Non-increasing positive parts summing to the degree.
pub type Partition = Vec<u8>;

/// All partitions of `k`, largest first part first.
pub fn partitions(k: usize) -> Vec<Partition> {
    partitions_bounded(k, k)
}

/// Partitions of `k` with every part `<= max_part`.
pub fn partitions_bounded(k: usize, max_part: usize) -> Vec<Partition> {
    fn rec(rem: usize, cap: usize, cur: &mut Partition, out: &mut Vec<Partition>) {
        if rem == 0 {
            out.push(cur.clone());
            return;
        }
        let top = rem.min(cap);
        for part in (1..=top).rev() {
            cur.push(part as u8);
            rec(rem - part, part, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k == 0 {
        out.push(vec![]);
        return out;
    }
    let mut cur = Vec::new();
    rec(k, max_part, &mut cur, &mut out);
    out
}

/// The partition function `ρ(k)`.
pub fn rho(k: usize) -> usize {
    partitions(k).len()
}

/// `dim 𝔖_{m,k}`: partitions of `k` with parts `<= m`; equals `ρ(k)` for `k <= m`.
pub fn dim_s(m: usize, k: usize) -> usize {
    partitions_bounded(k, m).len()
}

/// Element of the degree-`k` graded piece over `m x m` matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct InvariantPolynomial {
    pub m: usize,
    pub k: usize,
    coeffs: BTreeMap<Partition, Complex64>,
}

impl InvariantPolynomial {
    pub fn zero(m: usize, k: usize) -> Self {
        InvariantPolynomial { m, k, coeffs: BTreeMap::new() }
    }

    /// The basis monomial `Tr_{π_1} ··· Tr_{π_l}`.
    pub fn monomial(m: usize, partition: &[u8]) -> Self {
        let mut p = partition.to_vec();
        p.sort_unstable_by(|a, b| b.cmp(a));
        let k = p.iter().map(|&x| x as usize).sum();
        assert!(p.iter().all(|&x| x >= 1 && (x as usize) <= m), "part exceeds matrix size");
        let mut poly = InvariantPolynomial::zero(m, k);
        poly.coeffs.insert(p, Complex64::new(1.0, 0.0));
        poly
    }

    /// `Tr_j` as an element over `m x m` matrices.
    pub fn tr(m: usize, j: usize) -> Self {
        InvariantPolynomial::monomial(m, &[j as u8])
    }

    pub fn coeff(&self, partition: &[u8]) -> Complex64 {
        self.coeffs.get(partition).copied().unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Partition, &Complex64)> {
        self.coeffs.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn scale(&self, f: Complex64) -> Self {
        let mut out = self.clone();
        if f == Complex64::new(0.0, 0.0) {
            out.coeffs.clear();
            return out;
        }
        for v in out.coeffs.values_mut() {
            *v *= f;
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.k, other.k, "mixed degrees");
        let mut out = self.clone();
        for (p, v) in &other.coeffs {
            *out.coeffs.entry(p.clone()).or_insert(Complex64::new(0.0, 0.0)) += v;
        }
        out.coeffs.retain(|_, v| *v != Complex64::new(0.0, 0.0));
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = InvariantPolynomial::zero(self.m.max(other.m), self.k + other.k);
        for (p, v) in &self.coeffs {
            for (q, w) in &other.coeffs {
                let mut merged: Partition = p.iter().chain(q.iter()).copied().collect();
                merged.sort_unstable_by(|a, b| b.cmp(a));
                *out.coeffs.entry(merged).or_insert(Complex64::new(0.0, 0.0)) += v * w;
            }
        }
        out
    }

    /// Evaluate on a complex matrix by `Tr_j(B) = Tr(B^j)`; the oracle side
    /// of every restriction test.
    pub fn eval_matrix(&self, b: &Mat) -> Complex64 {
        let max_part = self.coeffs.keys().flat_map(|p| p.iter()).copied().max().unwrap_or(0);
        let mut powers: Vec<Mat> = Vec::with_capacity(max_part as usize + 1);
        powers.push(Mat::identity(b.rows));
        for j in 1..=max_part as usize {
            let next = powers[j - 1].mul(b);
            powers.push(next);
        }
        let trace = |j: usize| -> Complex64 {
            let mut t = Complex64::new(0.0, 0.0);
            for i in 0..b.rows {
                t += powers[j][(i, i)];
            }
            t
        };
        let mut acc = Complex64::new(0.0, 0.0);
        for (p, v) in &self.coeffs {
            let mut prod = *v;
            for &part in p {
                prod *= trace(part as usize);
            }
            acc += prod;
        }
        acc
    }

    /// Evaluate on a matrix of `(1,1)`-forms: `Tr_μ` becomes the trace of the
    /// `μ`-fold wedge power, monomials multiply by wedge. Bidegree overflow
    /// past `(m, m)` collapses to the zero form.
    pub fn eval_forms(&self, f: &FormMatrix) -> PQForm {
        let mf = f.m;
        let max_part = self.coeffs.keys().flat_map(|p| p.iter()).copied().max().unwrap_or(0);
        let mut powers: Vec<FormMatrix> = Vec::with_capacity(max_part as usize + 1);
        let mut traces: Vec<PQForm> = Vec::with_capacity(max_part as usize + 1);
        for j in 1..=max_part as usize {
            let next = if j == 1 { f.clone() } else { powers.last().unwrap().wedge_mul(f) };
            traces.push(next.trace());
            powers.push(next);
        }
        let mut acc = PQForm::zero(mf, self.k, self.k);
        for (p, v) in &self.coeffs {
            let mut prod = PQForm::one(mf).scale(*v);
            for &part in p {
                prod = wedge(&prod, &traces[part as usize - 1]).expect("same dimension");
            }
            acc = acc.add(&prod).expect("homogeneous degree");
        }
        acc
    }
}

/// `Tr_j` of an `n x n` matrix rewritten over `Tr_1, .., Tr_n` via Newton's
/// identities (valid for any `j`; nontrivial only for `j > n`).
pub fn tr_reduction(j: usize, n: usize) -> InvariantPolynomial {
    assert!(n >= 1);
    if j <= n {
        return InvariantPolynomial::tr(n, j);
    }
    // elementary symmetric functions e_1..e_n in terms of power sums
    let mut es: Vec<InvariantPolynomial> = Vec::with_capacity(n + 1);
    es.push(InvariantPolynomial { m: n, k: 0, coeffs: BTreeMap::from([(vec![], Complex64::new(1.0, 0.0))]) });
    for i in 1..=n {
        // e_i = (1/i) Σ_{r=1..i} (-1)^{r-1} e_{i-r} p_r
        let mut acc = InvariantPolynomial::zero(n, i);
        for r in 1..=i {
            let sign = if r % 2 == 1 { 1.0 } else { -1.0 };
            let term = es[i - r].mul(&InvariantPolynomial::tr(n, r)).scale(Complex64::new(sign, 0.0));
            acc = acc.add(&term);
        }
        es.push(acc.scale(Complex64::new(1.0 / i as f64, 0.0)));
    }
    // p_j = Σ_{i=1..n} (-1)^{i-1} e_i p_{j-i} for j > n, ascending
    let mut ps: Vec<InvariantPolynomial> = Vec::with_capacity(j + 1);
    ps.push(InvariantPolynomial { m: n, k: 0, coeffs: BTreeMap::new() }); // p_0 unused
    for jj in 1..=j {
        if jj <= n {
            ps.push(InvariantPolynomial::tr(n, jj));
            continue;
        }
        let mut acc = InvariantPolynomial::zero(n, jj);
        for i in 1..=n {
            let sign = if i % 2 == 1 { 1.0 } else { -1.0 };
            let term = es[i].mul(&ps[jj - i]).scale(Complex64::new(sign, 0.0));
            acc = acc.add(&term);
        }
        ps.push(acc);
    }
    ps.pop().unwrap()
}

/// The restriction map induced by `B ↦ B ⊕ 0`: generators map identically,
/// parts larger than `n` are re-expressed in the target basis.
pub fn restrict_poly(p: &InvariantPolynomial, n: usize) -> InvariantPolynomial {
    assert!(n >= 1 && n < p.m, "restriction target must shrink the algebra");
    let mut out = InvariantPolynomial::zero(n, p.k);
    for (part, v) in p.iter() {
        let mut term = InvariantPolynomial { m: n, k: 0, coeffs: BTreeMap::from([(vec![], *v)]) };
        for &piece in part {
            term = term.mul(&tr_reduction(piece as usize, n));
        }
        out = out.add(&term);
    }
    out
}
