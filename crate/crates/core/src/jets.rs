//! The local model of a Kähler metric at a point.
//!
//! A [`JetTable`] holds the jet variables `g(A;B)`: the mixed partial
//! derivatives `∂^{A∖a₁} ∂̄^{B∖b₁} g_{a₁ b̄₁}` of the metric components at a
//! point, keyed by multisets of holomorphic (`A`) and anti-holomorphic (`B`)
//! indices. Closedness of the Kähler form makes these symmetric within `A`
//! and within `B`, which the multiset keys enforce structurally; conjugate
//! symmetry `g(B;A) = conj g(A;B)` is enforced on every write.
//!
//! A table in *normalized form* has `g_{ab̄} = δ_ab` and `g(A;b) = 0` for
//! `2 <= |A|`: the coordinates are normal up to the unitary group, and the
//! remaining entries transform as tensors. [`JetTable::normalize`] brings any
//! table with positive definite order-0 block into this form by a linear
//! Gram–Schmidt change followed by order-by-order elimination, mechanized
//! with truncated power series.
//!
//! Indices are 0-based internally; the JSON interfaces of the companion
//! crate use 1-based indices.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::linalg::{cholesky, invert_lower, LinalgError, Mat};
use crate::series::{invert_near_identity, Series};

/// Sorted multiset of 0-based indices.
pub type IdxMultiset = Vec<u8>;

#[derive(Clone, Debug, PartialEq)]
pub enum JetError {
    /// `entry(B;A)` was supplied inconsistently with `conj entry(A;B)`.
    ConjugateSymmetry { a: IdxMultiset, b: IdxMultiset },
    /// Order-0 block is not Hermitian positive definite.
    NotPositiveDefinite,
    /// Entry key outside `1 <= |A|, |B| <= max_order` or index `>= m`.
    BadKey { a: IdxMultiset, b: IdxMultiset },
    /// Potential coefficients do not define a real-valued function.
    PotentialNotReal,
    /// Normalization failed to reach the normal form.
    Degenerate,
}

impl fmt::Display for JetError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            JetError::ConjugateSymmetry { a, b } => {
                write!(f, "conjugate symmetry violated at entry ({a:?};{b:?})")
            }
            JetError::NotPositiveDefinite => write!(f, "order-0 metric block is not positive definite"),
            JetError::BadKey { a, b } => write!(f, "entry key ({a:?};{b:?}) out of range"),
            JetError::PotentialNotReal => write!(f, "potential is not real-valued"),
            JetError::Degenerate => write!(f, "coordinate normalization failed"),
        }
    }
}

impl From<LinalgError> for JetError {
    fn from(_: LinalgError) -> Self {
        JetError::NotPositiveDefinite
    }
}

/// Multiplicity factor `ε(A) = ∂^A z^A`, the product of factorials of the
/// index multiplicities.
pub fn eps(a: &[u8]) -> f64 {
    let mut prod = 1.0f64;
    let mut run = 1u32;
    for w in 1..=a.len() {
        if w < a.len() && a[w] == a[w - 1] {
            run += 1;
        } else {
            let mut f = 1.0;
            for k in 2..=run {
                f *= k as f64;
            }
            prod *= f;
            run = 1;
        }
    }
    prod
}

/// All multisets of the given size over `0..m`, lexicographically ordered.
pub fn multisets(m: usize, size: usize) -> Vec<IdxMultiset> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(size);
    fn rec(m: usize, size: usize, start: u8, cur: &mut IdxMultiset, out: &mut Vec<IdxMultiset>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for x in start..m as u8 {
            cur.push(x);
            rec(m, size, x, cur, out);
            cur.pop();
        }
    }
    rec(m, size, 0, &mut cur, &mut out);
    out
}

fn sorted(v: &[u8]) -> IdxMultiset {
    let mut s = v.to_vec();
    s.sort_unstable();
    s
}

/// Jet variables of a Kähler metric at a point.
#[derive(Clone, Debug, PartialEq)]
pub struct JetTable {
    m: usize,
    max_order: usize,
    entries: BTreeMap<(IdxMultiset, IdxMultiset), Complex64>,
    normalized: bool,
}

impl JetTable {
    /// Flat normalized table: `g = δ`, all higher entries zero.
    pub fn flat(m: usize, max_order: usize) -> Self {
        let mut t = JetTable { m, max_order, entries: BTreeMap::new(), normalized: true };
        for a in 0..m as u8 {
            t.entries.insert((vec![a], vec![a]), Complex64::new(1.0, 0.0));
        }
        t
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// Jet value `g(A;B)`; input order is irrelevant, missing entries are 0.
    pub fn entry(&self, a: &[u8], b: &[u8]) -> Complex64 {
        self.entries
            .get(&(sorted(a), sorted(b)))
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    /// Insert `g(A;B) = v` together with its conjugate mirror `g(B;A)`.
    fn put(&mut self, a: IdxMultiset, b: IdxMultiset, v: Complex64) {
        if v == Complex64::new(0.0, 0.0) {
            self.entries.remove(&(b.clone(), a.clone()));
            self.entries.remove(&(a, b));
            return;
        }
        self.entries.insert((b.clone(), a.clone()), v.conj());
        self.entries.insert((a, b), v);
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(IdxMultiset, IdxMultiset), &Complex64)> {
        self.entries.iter()
    }

    /// Order-0 block `g_{ab̄}` as a matrix.
    pub fn order0(&self) -> Mat {
        Mat::from_fn(self.m, self.m, |a, b| self.entry(&[a as u8], &[b as u8]))
    }

    /// Largest deviation from the normalized form (order-0 block from δ and
    /// the `(|A| >= 2, |B| = 1)` entries from zero).
    pub fn normal_form_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        let ident = Mat::identity(self.m);
        worst = worst.max(self.order0().max_abs_diff(&ident));
        for ord in 2..=self.max_order {
            for a in multisets(self.m, ord) {
                for b in 0..self.m as u8 {
                    worst = worst.max(self.entry(&a, &[b]).norm());
                }
            }
        }
        worst
    }

    /// Worst violation of `g(B;A) = conj g(A;B)` over stored entries.
    pub fn conjugate_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for ((a, b), v) in &self.entries {
            let mirror = self.entry(b, a);
            worst = worst.max((mirror - v.conj()).norm());
        }
        worst
    }

    /// Prescribe jets at a point (the pointwise content of the statement that
    /// the jet variables carry no hidden relations). Unspecified entries
    /// default to zero and the order-0 block to δ; each supplied value is
    /// mirrored to its conjugate entry, and an explicitly supplied mirror
    /// must agree with the conjugate of its partner.
    pub fn prescribe(
        m: usize,
        max_order: usize,
        values: &[(IdxMultiset, IdxMultiset, Complex64)],
    ) -> Result<Self, JetError> {
        let mut t = JetTable::flat(m, max_order);
        let mut seen: BTreeMap<(IdxMultiset, IdxMultiset), Complex64> = BTreeMap::new();
        for (a0, b0, v) in values {
            let a = sorted(a0);
            let b = sorted(b0);
            let ok_range = |x: &IdxMultiset| {
                !x.is_empty() && x.len() <= max_order && x.iter().all(|&i| (i as usize) < m)
            };
            if !ok_range(&a) || !ok_range(&b) {
                return Err(JetError::BadKey { a, b });
            }
            if let Some(prev) = seen.get(&(b.clone(), a.clone())) {
                if (prev.conj() - v).norm() > 1e-12 {
                    return Err(JetError::ConjugateSymmetry { a, b });
                }
            }
            if let Some(prev) = seen.get(&(a.clone(), b.clone())) {
                if (prev - v).norm() > 1e-12 {
                    return Err(JetError::ConjugateSymmetry { a, b });
                }
            }
            seen.insert((a.clone(), b.clone()), *v);
            t.put(a, b, *v);
        }
        // order-0 block must stay Hermitian positive definite
        let g0 = t.order0();
        if g0.hermitian_defect() > 1e-12 {
            return Err(JetError::NotPositiveDefinite);
        }
        cholesky(&g0)?;
        t.normalized = t.normal_form_defect() == 0.0;
        Ok(t)
    }

    /// Build a table from already-computed entries (an exact-differentiation
    /// source): conjugate symmetry is re-imposed by averaging against
    /// rounding, and the order-0 block is checked positive definite.
    pub fn from_raw_entries(
        m: usize,
        max_order: usize,
        values: &[(IdxMultiset, IdxMultiset, Complex64)],
    ) -> Result<Self, JetError> {
        let mut t = JetTable { m, max_order, entries: BTreeMap::new(), normalized: false };
        for (a, b, v) in values {
            t.entries.insert((a.clone(), b.clone()), *v);
        }
        t.resymmetrize();
        cholesky(&t.order0())?;
        t.normalized = t.normal_form_defect() == 0.0;
        Ok(t)
    }

    /// Seeded random table in normalized form: order-0 = δ, `(|A| >= 2, 1)`
    /// entries zero, and i.i.d. complex Gaussian entries of the given scale
    /// for `2 <= |A|, |B| <= max_order`, conjugate-completed.
    pub fn random(m: usize, max_order: usize, seed: u64, scale: f64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut t = JetTable::flat(m, max_order);
        let normal = StandardNormal;
        let mut keys: Vec<(IdxMultiset, IdxMultiset)> = Vec::new();
        for oa in 2..=max_order {
            for ob in 2..=max_order {
                for a in multisets(m, oa) {
                    for b in multisets(m, ob) {
                        keys.push((a.clone(), b));
                    }
                }
            }
        }
        keys.sort();
        let mut done: BTreeSet<(IdxMultiset, IdxMultiset)> = BTreeSet::new();
        for (a, b) in keys {
            if done.contains(&(a.clone(), b.clone())) {
                continue;
            }
            if a == b {
                let x: f64 = normal.sample(&mut rng);
                t.put(a.clone(), b.clone(), Complex64::new(scale * x, 0.0));
                done.insert((a, b));
            } else {
                let x: f64 = normal.sample(&mut rng);
                let y: f64 = normal.sample(&mut rng);
                let v = Complex64::new(x, y) * (scale / libm::sqrt(2.0));
                t.put(a.clone(), b.clone(), v);
                done.insert((b.clone(), a.clone()));
                done.insert((a, b));
            }
        }
        t.normalized = true;
        t
    }

    /// Pad with a flat torus factor: dimension grows by `extra`, every entry
    /// touching one of the new indices vanishes except the extended δ block.
    pub fn product_with_torus(&self, extra: usize) -> JetTable {
        let m = self.m + extra;
        let mut t = JetTable { m, max_order: self.max_order, entries: BTreeMap::new(), normalized: self.normalized };
        for ((a, b), v) in &self.entries {
            t.entries.insert((a.clone(), b.clone()), *v);
        }
        for a in 0..m as u8 {
            t.entries.insert((vec![a], vec![a]), Complex64::new(1.0, 0.0));
        }
        t
    }

    /// Block product with another table: the metric of a product of the two
    /// models, with vanishing cross jets.
    pub fn product(&self, other: &JetTable) -> JetTable {
        let m = self.m + other.m;
        let shift = self.m as u8;
        let max_order = self.max_order.min(other.max_order);
        let mut t = JetTable { m, max_order, entries: BTreeMap::new(), normalized: false };
        for ((a, b), v) in &self.entries {
            if a.len() <= max_order && b.len() <= max_order {
                t.entries.insert((a.clone(), b.clone()), *v);
            }
        }
        for ((a, b), v) in &other.entries {
            if a.len() <= max_order && b.len() <= max_order {
                let aa: IdxMultiset = a.iter().map(|&x| x + shift).collect();
                let bb: IdxMultiset = b.iter().map(|&x| x + shift).collect();
                t.entries.insert((aa, bb), *v);
            }
        }
        t.normalized = self.normalized && other.normalized;
        t
    }

    /// Transform under a constant unitary change of coordinates `z = U w`.
    /// Only meaningful on normalized tables, whose residual structure group
    /// is exactly `U(m)`.
    pub fn unitary_transform(&self, u: &Mat) -> JetTable {
        assert_eq!(u.rows, self.m);
        let m = self.m;
        let mut t = JetTable { m, max_order: self.max_order, entries: BTreeMap::new(), normalized: self.normalized };
        let mut keys: BTreeSet<(usize, usize)> = BTreeSet::new();
        for (a, b) in self.entries.keys() {
            keys.insert((a.len(), b.len()));
        }
        // Always include the order-0 block.
        keys.insert((1, 1));
        for (oa, ob) in keys {
            for a in multisets(m, oa) {
                for b in multisets(m, ob) {
                    let mut acc = Complex64::new(0.0, 0.0);
                    // sum over ordered preimage tuples
                    let mut ta = vec![0u8; oa];
                    loop {
                        let mut facu = Complex64::new(1.0, 0.0);
                        for (i, &ai) in a.iter().enumerate() {
                            facu *= u[(ta[i] as usize, ai as usize)];
                        }
                        if facu != Complex64::new(0.0, 0.0) {
                            let mut tb = vec![0u8; ob];
                            loop {
                                let mut fac = facu;
                                for (j, &bj) in b.iter().enumerate() {
                                    fac *= u[(tb[j] as usize, bj as usize)].conj();
                                }
                                if fac != Complex64::new(0.0, 0.0) {
                                    acc += self.entry(&ta, &tb) * fac;
                                }
                                if !incr(&mut tb, m) {
                                    break;
                                }
                            }
                        }
                        if !incr(&mut ta, m) {
                            break;
                        }
                    }
                    if acc.norm() > 1e-300 {
                        t.entries.insert((a.clone(), b.clone()), acc);
                    }
                }
            }
        }
        // Re-impose exact conjugate symmetry against rounding.
        t.resymmetrize();
        t
    }

    fn resymmetrize(&mut self) {
        let keys: Vec<(IdxMultiset, IdxMultiset)> = self.entries.keys().cloned().collect();
        let mut canon: BTreeMap<(IdxMultiset, IdxMultiset), Complex64> = BTreeMap::new();
        for (a, b) in keys {
            if canon.contains_key(&(a.clone(), b.clone())) {
                continue;
            }
            let v = self.entry(&a, &b);
            let w = self.entry(&b, &a);
            let avg = (v + w.conj()) * 0.5;
            canon.insert((b.clone(), a.clone()), avg.conj());
            canon.insert((a, b), avg);
        }
        canon.retain(|_, v| *v != Complex64::new(0.0, 0.0));
        self.entries = canon;
    }

    // ── coordinate normalization ────────────────────────────────────────

    /// Metric component series `g_{ab̄}(z, z̄)` to bidegree `(n-1, n-1)`.
    fn metric_series(&self) -> Vec<Series> {
        let m = self.m;
        let cap = self.max_order - 1;
        let mut out = vec![Series::zero(m, cap, cap); m * m];
        for a in 0..m {
            for b in 0..m {
                let s = &mut out[a * m + b];
                for da in 0..=cap {
                    for db in 0..=cap {
                        for ea in multisets(m, da) {
                            let mut aa: IdxMultiset = ea.clone();
                            aa.push(a as u8);
                            aa.sort_unstable();
                            for eb in multisets(m, db) {
                                let mut bb: IdxMultiset = eb.clone();
                                bb.push(b as u8);
                                bb.sort_unstable();
                                let v = self.entry(&aa, &bb);
                                if v == Complex64::new(0.0, 0.0) {
                                    continue;
                                }
                                let scale = 1.0 / (eps(&ea) * eps(&eb));
                                s.set(expo_of(&ea, m), expo_of(&eb, m), v * scale);
                            }
                        }
                    }
                }
            }
        }
        out
    }

    fn from_series(series: &[Series], m: usize, max_order: usize) -> JetTable {
        let mut t = JetTable { m, max_order, entries: BTreeMap::new(), normalized: false };
        for oa in 1..=max_order {
            for ob in 1..=max_order {
                for a in multisets(m, oa) {
                    for b in multisets(m, ob) {
                        let a1 = a[0] as usize;
                        let b1 = b[0] as usize;
                        let ea = &a[1..];
                        let eb = &b[1..];
                        let v = series[a1 * m + b1].coeff(&expo_of(ea, m), &expo_of(eb, m))
                            * eps(ea)
                            * eps(eb);
                        if v != Complex64::new(0.0, 0.0) {
                            t.entries.insert((a.clone(), b.clone()), v);
                        }
                    }
                }
            }
        }
        t.resymmetrize();
        t
    }

    /// Normal coordinates per the order-by-order elimination: a Gram–Schmidt
    /// linear change brings the order-0 block to δ, then for each order
    /// `n = 2, ..` the change `v = w + Σ c_A w^A` with `ε(A) c_A^b = g(A;b)`
    /// kills the `(|A| = n, |B| = 1)` entries. Returns the normalized table
    /// and the composed change.
    pub fn normalize(&self) -> Result<(JetTable, CoordinateChange), JetError> {
        let m = self.m;
        let n = self.max_order;
        let g0 = self.order0();
        if g0.hermitian_defect() > 1e-9 {
            return Err(JetError::NotPositiveDefinite);
        }
        let c = cholesky(&g0)?;
        let linear = invert_lower(&c).transpose(); // z = linear · w
        let mut series = self.metric_series();
        // coordinate changes carry one degree more than the metric series
        let chg_cap = n;
        let phi_lin: Vec<Series> = (0..m)
            .map(|alpha| {
                let mut s = Series::zero(m, chg_cap, 0);
                for mu in 0..m {
                    if linear[(alpha, mu)] != Complex64::new(0.0, 0.0) {
                        let mut e = vec![0u8; m];
                        e[mu] = 1;
                        s.set(e, vec![0; m], linear[(alpha, mu)]);
                    }
                }
                s
            })
            .collect();
        series = transform_metric(&series, &phi_lin, m);
        let mut steps: Vec<BTreeMap<(IdxMultiset, u8), Complex64>> = Vec::new();
        for ord in 2..=n {
            // current g(A; b) for |A| = ord, read off the series
            let mut cmap: BTreeMap<(IdxMultiset, u8), Complex64> = BTreeMap::new();
            for a in multisets(m, ord) {
                for b in 0..m as u8 {
                    let a1 = a[0] as usize;
                    let ea = &a[1..];
                    let v = series[a1 * m + b as usize].coeff(&expo_of(ea, m), &vec![0u8; m]) * eps(ea);
                    if v.norm() > 1e-15 {
                        cmap.insert((a.clone(), b), v / eps(&a));
                    }
                }
            }
            if cmap.is_empty() {
                steps.push(cmap);
                continue;
            }
            // v = w + Σ c_A^b w^A ; re-express the metric in v
            let phi_step: Vec<Series> = (0..m)
                .map(|beta| {
                    let mut s = Series::variable(m, beta, chg_cap, 0);
                    for ((a, b), cv) in &cmap {
                        if *b as usize == beta {
                            let mut term = Series::constant(m, chg_cap, 0, *cv);
                            for &ai in a {
                                term = term.mul(&Series::variable(m, ai as usize, chg_cap, 0));
                            }
                            s = s.add(&term);
                        }
                    }
                    s
                })
                .collect();
            let psi = invert_near_identity(&phi_step, chg_cap);
            series = transform_metric(&series, &psi, m);
            steps.push(cmap);
        }
        let mut out = JetTable::from_series(&series, m, n);
        // Snap the normal form exactly; anything above tolerance is a failure.
        if out.normal_form_defect() > 1e-9 {
            return Err(JetError::Degenerate);
        }
        for a in 0..m as u8 {
            for b in 0..m as u8 {
                let v = if a == b { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) };
                if v == Complex64::new(0.0, 0.0) {
                    out.entries.remove(&(vec![a], vec![b]));
                } else {
                    out.entries.insert((vec![a], vec![b]), v);
                }
            }
        }
        for ord in 2..=n {
            for a in multisets(m, ord) {
                for b in 0..m as u8 {
                    out.entries.remove(&(a.clone(), vec![b]));
                    out.entries.remove(&(vec![b], a.clone()));
                }
            }
        }
        out.normalized = true;
        Ok((out, CoordinateChange { linear, steps }))
    }
}

fn incr(idx: &mut [u8], m: usize) -> bool {
    for slot in idx.iter_mut() {
        *slot += 1;
        if (*slot as usize) < m {
            return true;
        }
        *slot = 0;
    }
    false
}

fn expo_of(multiset: &[u8], m: usize) -> Vec<u8> {
    let mut e = vec![0u8; m];
    for &i in multiset {
        e[i as usize] += 1;
    }
    e
}

/// `S^new[μν] = Σ J[α][μ] conj(J[β][ν]) S[αβ] ∘ φ` for a holomorphic change
/// `z = φ(w)`.
fn transform_metric(series: &[Series], phi: &[Series], m: usize) -> Vec<Series> {
    let phi_hol: Vec<Series> = phi
        .iter()
        .map(|s| {
            // strip any z̄ caps so composition treats φ as holomorphic
            let mut h = Series::zero(m, s.deg_z, 0);
            for ((ez, ezb), v) in s.iter() {
                if ezb.iter().all(|&x| x == 0) {
                    h.set(ez.clone(), vec![0; m], *v);
                }
            }
            h
        })
        .collect();
    let jac: Vec<Vec<Series>> = (0..m)
        .map(|alpha| (0..m).map(|mu| phi_hol[alpha].diff_z(mu)).collect())
        .collect();
    let jac_bar: Vec<Vec<Series>> = (0..m)
        .map(|beta| (0..m).map(|nu| jac[beta][nu].conj()).collect())
        .collect();
    let composed: Vec<Series> = series.iter().map(|s| s.compose_holomorphic(&phi_hol)).collect();
    let caps = (series[0].deg_z, series[0].deg_zb);
    let mut out = vec![Series::zero(m, caps.0, caps.1); m * m];
    for mu in 0..m {
        for nu in 0..m {
            let mut acc = Series::zero(m, caps.0, caps.1);
            for alpha in 0..m {
                for beta in 0..m {
                    // widen jacobian factors to the metric caps
                    let mut ja = Series::zero(m, caps.0, caps.1);
                    for ((ez, _), v) in jac[alpha][mu].iter() {
                        ja.set(ez.clone(), vec![0; m], *v);
                    }
                    let mut jb = Series::zero(m, caps.0, caps.1);
                    for ((_, ezb), v) in jac_bar[beta][nu].iter() {
                        jb.set(vec![0; m], ezb.clone(), *v);
                    }
                    let term = ja.mul(&jb).mul(&composed[alpha * m + beta]);
                    acc = acc.add(&term);
                }
            }
            out[mu * m + nu] = acc;
        }
    }
    out
}

/// Haar-ish random unitary matrix (Gram–Schmidt of a seeded complex
/// Gaussian draw); the frame changes of the covariance tests.
pub fn random_unitary(m: usize, seed: u64) -> Mat {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = StandardNormal;
    let a = Mat::from_fn(m, m, |_, _| {
        let re: f64 = normal.sample(&mut rng);
        let im: f64 = normal.sample(&mut rng);
        Complex64::new(re, im)
    });
    let mut q = a;
    for j in 0..m {
        for k in 0..j {
            let mut dot = Complex64::new(0.0, 0.0);
            for i in 0..m {
                dot += q[(i, k)].conj() * q[(i, j)];
            }
            for i in 0..m {
                let sub = dot * q[(i, k)];
                q[(i, j)] -= sub;
            }
        }
        let mut nrm = 0.0;
        for i in 0..m {
            nrm += q[(i, j)].norm_sqr();
        }
        let nrm = libm::sqrt(nrm);
        for i in 0..m {
            q[(i, j)] /= nrm;
        }
    }
    q
}

/// Record of the normalizing change of coordinates: the initial linear change
/// `z = linear · w` followed by one elimination map per order, each storing
/// the coefficients `c_A^b` of `v^b = w^b + Σ_A c_A^b w^A`.
#[derive(Clone, Debug)]
pub struct CoordinateChange {
    pub linear: Mat,
    pub steps: Vec<BTreeMap<(IdxMultiset, u8), Complex64>>,
}

impl CoordinateChange {
    pub fn is_identity(&self, tol: f64) -> bool {
        self.linear.max_abs_diff(&Mat::identity(self.linear.rows)) <= tol
            && self.steps.iter().all(|s| s.values().all(|c| c.norm() <= tol))
    }
}

// ── potentials ──────────────────────────────────────────────────────────

/// A polynomial Kähler potential `f = Σ c · z^A z̄^B`, plus an optional flat
/// background, generating the metric `g_{ab̄} = base + ∂_a ∂̄_b f`.
#[derive(Clone, Debug)]
pub struct PotentialModel {
    pub m: usize,
    pub terms: Vec<(IdxMultiset, IdxMultiset, Complex64)>,
    /// Order-0 background added to the potential Hessian: `δ_ab` for
    /// `euclidean`, nothing for `none`.
    pub euclidean_base: bool,
}

impl PotentialModel {
    pub fn new(m: usize, euclidean_base: bool) -> Self {
        PotentialModel { m, terms: Vec::new(), euclidean_base }
    }

    /// Add the monomial `c z^A z̄^B` together with its conjugate, keeping the
    /// potential real.
    pub fn add_real_term(&mut self, a: &[u8], b: &[u8], c: Complex64) {
        let a = sorted(a);
        let b = sorted(b);
        if a == b && c.im == 0.0 {
            self.terms.push((a, b, c));
        } else {
            self.terms.push((a.clone(), b.clone(), c * 0.5));
            self.terms.push((b, a, c.conj() * 0.5));
        }
    }

    fn reality_defect(&self) -> f64 {
        let mut sums: BTreeMap<(IdxMultiset, IdxMultiset), Complex64> = BTreeMap::new();
        for (a, b, c) in &self.terms {
            *sums.entry((a.clone(), b.clone())).or_insert(Complex64::new(0.0, 0.0)) += c;
        }
        let mut worst = 0.0f64;
        for ((a, b), c) in &sums {
            let mirror = sums.get(&(b.clone(), a.clone())).copied().unwrap_or(Complex64::new(0.0, 0.0));
            worst = worst.max((mirror - c.conj()).norm());
        }
        worst
    }

    /// Jets of the generated metric at `point`, by exact term-wise
    /// differentiation: `g(A;B) = ∂^A ∂̄^B f` plus the flat background.
    pub fn jets_at(&self, point: &[Complex64], max_order: usize) -> Result<JetTable, JetError> {
        if self.reality_defect() > 1e-12 {
            return Err(JetError::PotentialNotReal);
        }
        let m = self.m;
        let mut t = JetTable { m, max_order, entries: BTreeMap::new(), normalized: false };
        for oa in 1..=max_order {
            for ob in 1..=max_order {
                for a in multisets(m, oa) {
                    for b in multisets(m, ob) {
                        let mut v = Complex64::new(0.0, 0.0);
                        if oa == 1 && ob == 1 && self.euclidean_base && a[0] == b[0] {
                            v += 1.0;
                        }
                        let da = expo_of(&a, m);
                        let db = expo_of(&b, m);
                        for (ta, tb, c) in &self.terms {
                            let ea = expo_of(ta, m);
                            let eb = expo_of(tb, m);
                            let dz = monomial_derivative(&ea, &da, point, false);
                            if dz == Complex64::new(0.0, 0.0) {
                                continue;
                            }
                            let dzb = monomial_derivative(&eb, &db, point, true);
                            v += c * dz * dzb;
                        }
                        if v != Complex64::new(0.0, 0.0) {
                            t.entries.insert((a.clone(), b.clone()), v);
                        }
                    }
                }
            }
        }
        t.resymmetrize();
        let g0 = t.order0();
        cholesky(&g0)?;
        t.normalized = t.normal_form_defect() == 0.0;
        Ok(t)
    }
}

/// `∂^D z^E` evaluated at `point` (or the conjugate version when `bar`).
fn monomial_derivative(e: &[u8], d: &[u8], point: &[Complex64], bar: bool) -> Complex64 {
    let mut acc = Complex64::new(1.0, 0.0);
    for a in 0..e.len() {
        if d[a] > e[a] {
            return Complex64::new(0.0, 0.0);
        }
        let mut fall = 1.0f64;
        for k in 0..d[a] {
            fall *= (e[a] - k) as f64;
        }
        acc *= fall;
        let rem = (e[a] - d[a]) as i32;
        if rem > 0 {
            let z = if bar { point[a].conj() } else { point[a] };
            acc *= z.powi(rem);
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn eps_counts_multiplicities() {
        assert_eq!(eps(&[0, 0]), 2.0);
        assert_eq!(eps(&[0, 1]), 1.0);
        assert_eq!(eps(&[0, 0, 0]), 6.0);
        assert_eq!(eps(&[0, 0, 1, 1, 1]), 12.0);
        assert_eq!(eps(&[]), 1.0);
    }

    #[test]
    fn flat_potential_gives_flat_jets() {
        let p = PotentialModel::new(2, true);
        let t = p.jets_at(&[c(0.3, -0.2), c(1.0, 0.5)], 3).unwrap();
        assert_eq!(t.entry(&[0], &[0]), c(1.0, 0.0));
        assert_eq!(t.entry(&[0], &[1]), c(0.0, 0.0));
        assert_eq!(t.entry(&[0, 1], &[0, 1]), c(0.0, 0.0));
        assert!(t.is_normalized());
    }

    #[test]
    fn fubini_study_m1_jets_at_origin() {
        // f = log(1 + |z|^2) expanded to polynomial order 6:
        // f = u - u²/2 + u³/3 with u = z z̄ gives g = 1 - 2|z|² + 3|z|⁴ ...
        // and the curvature-order entry g((1,1);(1̄,1̄)) = ∂²∂̄²f = -2.
        let mut p = PotentialModel::new(1, false);
        p.add_real_term(&[0], &[0], c(1.0, 0.0));
        p.add_real_term(&[0, 0], &[0, 0], c(-0.5, 0.0));
        p.add_real_term(&[0, 0, 0], &[0, 0, 0], c(1.0 / 3.0, 0.0));
        let t = p.jets_at(&[c(0.0, 0.0)], 3).unwrap();
        assert_eq!(t.entry(&[0], &[0]), c(1.0, 0.0));
        assert_eq!(t.entry(&[0, 0], &[0, 0]), c(-2.0, 0.0));
        // symmetry of the stored table is exact
        assert_eq!(t.conjugate_defect(), 0.0);
    }

    #[test]
    fn mixed_polynomial_potential_term() {
        // f = Re(z_1² z̄_2²): the (A;B) = ({1,1};{2,2}) jet is ∂₁²∂̄₂²f = 2,
        // i.e. 4 · (the real-part half-weight).
        let mut p = PotentialModel::new(2, true);
        p.add_real_term(&[0, 0], &[1, 1], c(1.0, 0.0));
        let t = p.jets_at(&[c(0.0, 0.0), c(0.0, 0.0)], 2).unwrap();
        assert_eq!(t.entry(&[0, 0], &[1, 1]), c(2.0, 0.0));
        assert_eq!(t.entry(&[1, 1], &[0, 0]), c(2.0, 0.0));
        assert_eq!(t.entry(&[0, 1], &[0, 1]), c(0.0, 0.0));
    }

    #[test]
    fn potential_reality_is_enforced() {
        let mut p = PotentialModel::new(1, true);
        p.terms.push((vec![0], vec![0], c(0.0, 1.0))); // i·|z|² is not real
        assert_eq!(p.jets_at(&[c(0.0, 0.0)], 2), Err(JetError::PotentialNotReal));
    }

    #[test]
    fn prescribe_roundtrip_and_conjugate_check() {
        let vals = vec![
            (vec![0, 0], vec![0, 1], c(0.3, -0.7)),
            (vec![0, 1], vec![1, 1], c(-0.2, 0.15)),
        ];
        let t = JetTable::prescribe(2, 2, &vals).unwrap();
        assert_eq!(t.entry(&[0, 0], &[0, 1]), c(0.3, -0.7));
        assert_eq!(t.entry(&[0, 1], &[0, 0]), c(0.3, 0.7));
        assert_eq!(t.entry(&[1, 1], &[0, 1]), c(-0.2, -0.15));
        // inconsistent mirror is rejected
        let bad = vec![
            (vec![0, 0], vec![0, 1], c(0.3, -0.7)),
            (vec![0, 1], vec![0, 0], c(0.3, -0.7)),
        ];
        assert!(matches!(
            JetTable::prescribe(2, 2, &bad),
            Err(JetError::ConjugateSymmetry { .. })
        ));
    }

    #[test]
    fn random_jets_are_deterministic_and_normalized() {
        let a = JetTable::random(2, 3, 42, 0.5);
        let b = JetTable::random(2, 3, 42, 0.5);
        assert_eq!(a, b);
        assert_eq!(a.normal_form_defect(), 0.0);
        assert_eq!(a.conjugate_defect(), 0.0);
        let z = JetTable::random(2, 3, 7, 0.0);
        assert_eq!(z, JetTable::flat(2, 3));
    }

    #[test]
    fn random_jets_scale_statistics() {
        // Sample variance of the (real) diagonal entry over 100 seeds should
        // sit within 20% of scale² — the Monte-Carlo oracle at 3σ slack.
        let scale = 0.7;
        let mut sum = 0.0;
        let mut sumsq = 0.0;
        let n = 400usize;
        for seed in 0..n as u64 {
            let t = JetTable::random(2, 2, seed, scale);
            let v = t.entry(&[0, 0], &[0, 0]).re;
            sum += v;
            sumsq += v * v;
        }
        let mean = sum / n as f64;
        let var = sumsq / n as f64 - mean * mean;
        assert!(
            (var - scale * scale).abs() < 0.2 * scale * scale,
            "variance {var} vs scale² {}",
            scale * scale
        );
    }

    #[test]
    fn torus_padding_extends_delta_block() {
        let t = JetTable::random(1, 2, 3, 0.4);
        let p = t.product_with_torus(2);
        assert_eq!(p.m(), 3);
        assert_eq!(p.entry(&[2], &[2]), c(1.0, 0.0));
        assert_eq!(p.entry(&[0, 0], &[0, 0]), t.entry(&[0, 0], &[0, 0]));
        assert_eq!(p.entry(&[0, 2], &[0, 2]), c(0.0, 0.0));
        assert_eq!(p.normal_form_defect(), 0.0);
    }

    #[test]
    fn normalize_is_identity_on_normalized_tables() {
        let t = JetTable::random(2, 3, 11, 0.3);
        let (out, change) = t.normalize().unwrap();
        assert!(change.is_identity(1e-12));
        let mut worst = 0.0f64;
        for ((a, b), v) in t.iter() {
            worst = worst.max((out.entry(a, b) - v).norm());
        }
        assert!(worst < 1e-12);
    }

    #[test]
    fn normalize_single_equation_m1() {
        // f = |z|² + Re(z² z̄): g = 1 + z + z̄, so g((1,1); 1̄) = 1 before and
        // 0 after, with c_{(1,1)}^1 = g((1,1);1̄)/ε = 1/2.
        let mut p = PotentialModel::new(1, false);
        p.add_real_term(&[0], &[0], c(1.0, 0.0));
        p.add_real_term(&[0, 0], &[0], c(1.0, 0.0));
        let t = p.jets_at(&[c(0.0, 0.0)], 3).unwrap();
        assert_eq!(t.entry(&[0, 0], &[0]), c(1.0, 0.0));
        let (out, change) = t.normalize().unwrap();
        assert_eq!(out.entry(&[0, 0], &[0]), c(0.0, 0.0));
        assert_eq!(out.entry(&[0], &[0]), c(1.0, 0.0));
        let c11 = change.steps[0].get(&(vec![0, 0], 0)).copied().unwrap();
        assert!((c11 - c(0.5, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn normalize_is_idempotent() {
        let mut p = PotentialModel::new(2, true);
        p.add_real_term(&[0, 0], &[1], c(0.21, -0.4));
        p.add_real_term(&[0, 1], &[0, 1], c(0.3, 0.0));
        p.add_real_term(&[0], &[1], c(0.05, 0.02));
        let t = p.jets_at(&[c(0.1, 0.0), c(-0.2, 0.3)], 3).unwrap();
        let (n1, _) = t.normalize().unwrap();
        let (n2, change) = n1.normalize().unwrap();
        assert!(change.is_identity(1e-10));
        let mut worst = 0.0f64;
        for ((a, b), v) in n1.iter() {
            worst = worst.max((n2.entry(a, b) - v).norm());
        }
        assert!(worst < 1e-12, "second normalization moved entries by {worst}");
        assert_eq!(n1.normal_form_defect(), 0.0);
    }

    #[test]
    fn unitary_transform_preserves_normal_form() {
        let t = JetTable::random(2, 2, 5, 0.4);
        let u = random_unitary(2, 99);
        assert!(u.adjoint().mul(&u).max_abs_diff(&Mat::identity(2)) < 1e-12);
        let tt = t.unitary_transform(&u);
        assert!(tt.normal_form_defect() < 1e-12);
        assert_eq!(tt.conjugate_defect(), 0.0);
    }
}
