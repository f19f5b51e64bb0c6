//! Contraction-pattern invariants and the numerical kernel experiments.
//!
//! A monomial invariant of homogeneity `2k` is a product of jet variables
//! `g(A_1;B_1)···g(A_l;B_l)` — optionally times a frame pair `e_a ∘ ē_b` in
//! the tensor-valued case — with every holomorphic slot contracted against an
//! anti-holomorphic slot. A [`ContractionPattern`] records the factor profile
//! (all `(2,2)` by default; a single `(3,3)` factor realizes the same
//! homogeneity through one higher jet) and the slot matching, reduced to a
//! canonical representative under the slot symmetries (swaps within each
//! `A_i` and `B_i`, permutation of identical factors).
//!
//! Because every slot is matched holomorphic-against-anti-holomorphic, each
//! index appears equally often barred and unbarred — the weight condition of
//! unitary invariance holds structurally for every enumerated pattern.
//!
//! Span and kernel dimensions are computed numerically: patterns are
//! evaluated on seeded random jet tables, the matrix rank is read off the
//! singular values with a documented cutoff, and the kernel of restriction
//! (evaluation on tables supported on a lower-dimensional block) is the rank
//! drop. Genericity of random jets makes numerical rank equal algebraic
//! dimension with probability one; the cutoff is audited by rerunning a
//! decade up and down, and sample draws are cross-checked over two seeds.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;

use crate::curvature::KahlerCurvature;
use crate::jets::JetTable;
use crate::linalg::{lstsq, rank_from_singular_values, svd, Mat, Svd};
use crate::ring::{partitions_bounded, InvariantPolynomial};
use crate::transgress::{xi_p, xi_q};

/// Relative singular-value cutoff for every rank decision in this module.
pub const RANK_CUTOFF: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Valued {
    Scalar,
    Tensor,
}

#[derive(Clone, Debug, PartialEq)]
pub enum PatternError {
    /// Pattern enumeration is capped at desk scale.
    UnsupportedK { k: usize, valued: Valued },
    /// Rank changed under a ten-fold cutoff perturbation or across seeds.
    RankUnstable,
    /// An order-3 pattern was evaluated on a table without order-3 jets.
    MissingOrder3,
    /// Not enough samples for a trustworthy rank.
    TooFewSamples,
}

impl fmt::Display for PatternError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PatternError::UnsupportedK { k, valued } => {
                write!(f, "pattern enumeration not supported for k={k} ({valued:?})")
            }
            PatternError::RankUnstable => write!(f, "numerical rank is unstable (inconclusive)"),
            PatternError::MissingOrder3 => write!(f, "order-3 pattern needs max_order >= 3 jets"),
            PatternError::TooFewSamples => write!(f, "need at least 2 samples per pattern"),
        }
    }
}

/// A pairing of holomorphic with anti-holomorphic index slots across the
/// factors of one monomial.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct ContractionPattern {
    /// Per-factor jet profile `(|A_i|, |B_i|)`.
    pub profile: Vec<(u8, u8)>,
    pub valued: Valued,
    /// `matching[h] = t`: holomorphic slot `h` pairs with anti-holomorphic
    /// slot `t`. Factor slots come first (factor by factor), the free frame
    /// slot (tensor case) last.
    pub matching: Vec<u8>,
}

impl Valued {
    fn free_slots(self) -> usize {
        match self {
            Valued::Scalar => 0,
            Valued::Tensor => 1,
        }
    }
}

impl ContractionPattern {
    fn hol_slots(&self) -> usize {
        self.profile.iter().map(|p| p.0 as usize).sum::<usize>() + self.valued.free_slots()
    }

    /// Whether the pattern involves any factor beyond the 2-jet profile.
    pub fn uses_higher_jets(&self) -> bool {
        self.profile.iter().any(|&(a, b)| a != 2 || b != 2)
    }

    /// Canonical representative: lexicographically minimal matching over the
    /// slot-symmetry group (A-swaps, B-swaps, permutations of identical
    /// factors).
    fn canonicalize(&self) -> ContractionPattern {
        let mut best: Option<Vec<u8>> = None;
        let nf = self.profile.len();
        let mut perm: Vec<usize> = (0..nf).collect();
        let mut factor_perms = Vec::new();
        heap_perms(&mut perm, &mut factor_perms);
        let a_offsets = offsets(self.profile.iter().map(|p| p.0 as usize));
        let b_offsets = offsets(self.profile.iter().map(|p| p.1 as usize));
        let total_h = self.hol_slots();
        let a_sizes: Vec<usize> = self.profile.iter().map(|p| p.0 as usize).collect();
        let b_sizes: Vec<usize> = self.profile.iter().map(|p| p.1 as usize).collect();
        let a_perm_tables: Vec<Vec<Vec<usize>>> = a_sizes.iter().map(|&s| all_perms(s)).collect();
        let b_perm_tables: Vec<Vec<Vec<usize>>> = b_sizes.iter().map(|&s| all_perms(s)).collect();
        for fp in &factor_perms {
            if !fp.iter().enumerate().all(|(i, &j)| self.profile[i] == self.profile[j]) {
                continue;
            }
            let mut choice = vec![0usize; 2 * nf];
            loop {
                let mut hol_map = vec![0u8; total_h];
                let mut anti_map = vec![0u8; total_h];
                for f in 0..nf {
                    let ap = &a_perm_tables[f][choice[f]];
                    let bp = &b_perm_tables[f][choice[nf + f]];
                    let (src_a, dst_a) = (a_offsets[f], a_offsets[fp[f]]);
                    for (s, &img) in ap.iter().enumerate() {
                        hol_map[src_a + s] = (dst_a + img) as u8;
                    }
                    let (src_b, dst_b) = (b_offsets[f], b_offsets[fp[f]]);
                    for (s, &img) in bp.iter().enumerate() {
                        anti_map[src_b + s] = (dst_b + img) as u8;
                    }
                }
                if self.valued == Valued::Tensor {
                    hol_map[total_h - 1] = (total_h - 1) as u8;
                    anti_map[total_h - 1] = (total_h - 1) as u8;
                }
                let mut cand = vec![0u8; total_h];
                for h in 0..total_h {
                    cand[hol_map[h] as usize] = anti_map[self.matching[h] as usize];
                }
                if best.as_ref().map(|b| cand < *b).unwrap_or(true) {
                    best = Some(cand);
                }
                let mut done = true;
                for (slot, c) in choice.iter_mut().enumerate() {
                    let cap = if slot < nf {
                        a_perm_tables[slot].len()
                    } else {
                        b_perm_tables[slot - nf].len()
                    };
                    *c += 1;
                    if *c < cap {
                        done = false;
                        break;
                    }
                    *c = 0;
                }
                if done {
                    break;
                }
            }
        }
        ContractionPattern { profile: self.profile.clone(), valued: self.valued, matching: best.unwrap() }
    }
}

fn offsets(sizes: impl Iterator<Item = usize>) -> Vec<usize> {
    let mut out = Vec::new();
    let mut acc = 0;
    for s in sizes {
        out.push(acc);
        acc += s;
    }
    out
}

fn heap_perms(items: &mut [usize], out: &mut Vec<Vec<usize>>) {
    let n = items.len();
    out.push(items.to_vec());
    let mut c = vec![0usize; n];
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

fn all_perms(n: usize) -> Vec<Vec<usize>> {
    let mut base: Vec<usize> = (0..n).collect();
    let mut out = Vec::new();
    heap_perms(&mut base, &mut out);
    out.sort();
    out.dedup();
    out
}

/// Enumerate the canonical contraction patterns of homogeneity `2k`.
///
/// With `include_order3` (only for `k = 2`) the single-factor `(3,3)` full
/// contraction joins the list, probing whether higher jets can enter the
/// kernel identities.
pub fn enumerate_patterns(
    k: usize,
    valued: Valued,
    include_order3: bool,
) -> Result<Vec<ContractionPattern>, PatternError> {
    let cap = match valued {
        Valued::Scalar => 3,
        Valued::Tensor => 2,
    };
    if k == 0 || k > cap || (include_order3 && k != 2) {
        return Err(PatternError::UnsupportedK { k, valued });
    }
    let mut out: BTreeSet<ContractionPattern> = BTreeSet::new();
    let mut profiles: Vec<Vec<(u8, u8)>> = vec![vec![(2, 2); k]];
    if include_order3 {
        profiles.push(vec![(3, 3)]);
    }
    for profile in profiles {
        let total: usize = profile.iter().map(|p| p.0 as usize).sum::<usize>() + valued.free_slots();
        let mut base: Vec<usize> = (0..total).collect();
        let mut matchings = Vec::new();
        heap_perms(&mut base, &mut matchings);
        for mt in matchings {
            let pattern = ContractionPattern {
                profile: profile.clone(),
                valued,
                matching: mt.iter().map(|&x| x as u8).collect(),
            };
            out.insert(pattern.canonicalize());
        }
    }
    Ok(out.into_iter().collect())
}

/// Scalar or matrix value of one pattern evaluation.
#[derive(Clone, Debug)]
pub enum PatternValue {
    Scalar(Complex64),
    Tensor(Mat),
}

/// Dense jet lookups for pattern evaluation.
struct JetEval {
    m: usize,
    r22: Vec<Complex64>,
    r33: Option<Vec<Complex64>>,
}

impl JetEval {
    fn new(j: &JetTable, need_order3: bool) -> Result<Self, PatternError> {
        let m = j.m();
        let mut r22 = vec![Complex64::new(0.0, 0.0); m * m * m * m];
        for x in 0..m {
            for y in 0..m {
                for u in 0..m {
                    for v in 0..m {
                        r22[((x * m + y) * m + u) * m + v] =
                            j.entry(&[x as u8, y as u8], &[u as u8, v as u8]);
                    }
                }
            }
        }
        let r33 = if need_order3 {
            if j.max_order() < 3 {
                return Err(PatternError::MissingOrder3);
            }
            let mut t = vec![Complex64::new(0.0, 0.0); m.pow(6)];
            for x in 0..m {
                for y in 0..m {
                    for z in 0..m {
                        for u in 0..m {
                            for v in 0..m {
                                for w in 0..m {
                                    t[((((x * m + y) * m + z) * m + u) * m + v) * m + w] = j.entry(
                                        &[x as u8, y as u8, z as u8],
                                        &[u as u8, v as u8, w as u8],
                                    );
                                }
                            }
                        }
                    }
                }
            }
            Some(t)
        } else {
            None
        };
        Ok(JetEval { m, r22, r33 })
    }

    #[inline]
    fn factor(&self, a: &[usize], b: &[usize]) -> Complex64 {
        let m = self.m;
        match a.len() {
            2 => self.r22[((a[0] * m + a[1]) * m + b[0]) * m + b[1]],
            3 => {
                let t = self.r33.as_ref().expect("order-3 table prepared");
                t[((((a[0] * m + a[1]) * m + a[2]) * m + b[0]) * m + b[1]) * m + b[2]]
            }
            _ => unreachable!("profiles are (2,2) or (3,3)"),
        }
    }
}

/// Full index sum realizing the pattern on a normalized jet table.
pub fn evaluate_pattern(p: &ContractionPattern, j: &JetTable) -> Result<PatternValue, PatternError> {
    let ev = JetEval::new(j, p.uses_higher_jets())?;
    let m = ev.m;
    let nh = p.hol_slots();
    let nf = p.profile.len();
    let a_off = offsets(p.profile.iter().map(|q| q.0 as usize));
    let b_off = offsets(p.profile.iter().map(|q| q.1 as usize));
    let free_h = if p.valued == Valued::Tensor { Some(nh - 1) } else { None };
    // classify pairs: the frame slots carry the output indices, every other
    // matched pair carries one summation index
    let mut sum_pairs: Vec<(usize, usize)> = Vec::new();
    let mut free_pair_delta = false;
    let mut anti_slot_gets_a: Option<usize> = None;
    let mut hol_slot_gets_b: Option<usize> = None;
    for h in 0..nh {
        let t = p.matching[h] as usize;
        let h_is_free = Some(h) == free_h;
        let t_is_free = p.valued == Valued::Tensor && t == nh - 1;
        match (h_is_free, t_is_free) {
            (true, true) => free_pair_delta = true,
            (true, false) => anti_slot_gets_a = Some(t),
            (false, true) => hol_slot_gets_b = Some(h),
            (false, false) => sum_pairs.push((h, t)),
        }
    }
    let eval_component = |a_out: usize, b_out: usize| -> Complex64 {
        if free_pair_delta && a_out != b_out {
            return Complex64::new(0.0, 0.0);
        }
        let mut hol_idx = vec![0usize; nh];
        let mut anti_idx = vec![0usize; nh];
        if let Some(t) = anti_slot_gets_a {
            anti_idx[t] = a_out;
        }
        if let Some(h) = hol_slot_gets_b {
            hol_idx[h] = b_out;
        }
        let np = sum_pairs.len();
        let mut counter = vec![0usize; np];
        let mut acc = Complex64::new(0.0, 0.0);
        loop {
            for (ci, &(h, t)) in sum_pairs.iter().enumerate() {
                hol_idx[h] = counter[ci];
                anti_idx[t] = counter[ci];
            }
            let mut prod = Complex64::new(1.0, 0.0);
            for f in 0..nf {
                let (na, nb) = (p.profile[f].0 as usize, p.profile[f].1 as usize);
                let a_slice: Vec<usize> = (0..na).map(|s| hol_idx[a_off[f] + s]).collect();
                let b_slice: Vec<usize> = (0..nb).map(|s| anti_idx[b_off[f] + s]).collect();
                prod *= ev.factor(&a_slice, &b_slice);
                if prod == Complex64::new(0.0, 0.0) {
                    break;
                }
            }
            acc += prod;
            if np == 0 {
                break;
            }
            let mut carry = true;
            for slot in counter.iter_mut() {
                *slot += 1;
                if *slot < m {
                    carry = false;
                    break;
                }
                *slot = 0;
            }
            if carry {
                break;
            }
        }
        acc
    };
    match p.valued {
        Valued::Scalar => Ok(PatternValue::Scalar(eval_component(0, 0))),
        Valued::Tensor => {
            let mat = Mat::from_fn(m, m, eval_component);
            Ok(PatternValue::Tensor(mat))
        }
    }
}

// ── rank experiments ─────────────────────────────────────────────────────

/// Jet scale for the random samples.
const SAMPLE_SCALE: f64 = 0.8;

fn sample_table(m: usize, max_order: usize, seed: u64, restricted_to: Option<usize>) -> JetTable {
    match restricted_to {
        None => JetTable::random(m, max_order, seed, SAMPLE_SCALE),
        Some(0) => JetTable::flat(m, max_order),
        Some(low) => JetTable::random(low, max_order, seed, SAMPLE_SCALE).product_with_torus(m - low),
    }
}

/// Rows of the evaluation matrix contributed by one sample; tensor samples
/// contribute one row per kept matrix entry (the pull-back keeps only the
/// leading block on restricted samples).
fn sample_rows(
    patterns: &[ContractionPattern],
    j: &JetTable,
    keep_entries: Option<usize>,
) -> Result<Vec<Vec<Complex64>>, PatternError> {
    let m = j.m();
    let mut rows: Vec<Vec<Complex64>> = Vec::new();
    let mut values: Vec<PatternValue> = Vec::with_capacity(patterns.len());
    for p in patterns {
        values.push(evaluate_pattern(p, j)?);
    }
    match values.first() {
        None => {}
        Some(PatternValue::Scalar(_)) => {
            let row: Vec<Complex64> = values
                .iter()
                .map(|v| match v {
                    PatternValue::Scalar(s) => *s,
                    _ => unreachable!(),
                })
                .collect();
            rows.push(row);
        }
        Some(PatternValue::Tensor(_)) => {
            let keep = keep_entries.unwrap_or(m);
            for a in 0..keep {
                for b in 0..keep {
                    let row: Vec<Complex64> = values
                        .iter()
                        .map(|v| match v {
                            PatternValue::Tensor(t) => t[(a, b)],
                            _ => unreachable!(),
                        })
                        .collect();
                    rows.push(row);
                }
            }
        }
    }
    Ok(rows)
}

fn evaluation_matrix(
    patterns: &[ContractionPattern],
    m: usize,
    samples: usize,
    seed: u64,
    restricted_to: Option<usize>,
) -> Result<Mat, PatternError> {
    let max_order = if patterns.iter().any(ContractionPattern::uses_higher_jets) { 3 } else { 2 };
    let mut all_rows: Vec<Vec<Complex64>> = Vec::new();
    for i in 0..samples {
        let j = sample_table(m, max_order, seed.wrapping_add(1000 * i as u64), restricted_to);
        let rows = sample_rows(patterns, &j, restricted_to)?;
        all_rows.extend(rows);
    }
    Ok(Mat::from_fn(all_rows.len(), patterns.len(), |r, c| all_rows[r][c]))
}

/// Rank with the documented cutoff, audited a decade up and down.
fn stable_rank(mat: &Mat) -> Result<(usize, Vec<f64>), PatternError> {
    if mat.rows == 0 || mat.cols == 0 {
        return Ok((0, Vec::new()));
    }
    let Svd { s, .. } = svd(mat).map_err(|_| PatternError::RankUnstable)?;
    let r = rank_from_singular_values(&s, RANK_CUTOFF);
    let lo = rank_from_singular_values(&s, RANK_CUTOFF * 10.0);
    let hi = rank_from_singular_values(&s, RANK_CUTOFF / 10.0);
    if lo != r || hi != r {
        return Err(PatternError::RankUnstable);
    }
    Ok((r, s))
}

/// Numerical dimension of the span of the patterns as functions of the jets
/// of complex dimension `m`.
pub fn span_dimension(
    patterns: &[ContractionPattern],
    m: usize,
    samples: usize,
    seed: u64,
) -> Result<usize, PatternError> {
    if patterns.is_empty() {
        return Ok(0);
    }
    if samples < 2 * patterns.len() {
        return Err(PatternError::TooFewSamples);
    }
    let e = evaluation_matrix(patterns, m, samples, seed, None)?;
    Ok(stable_rank(&e)?.0)
}

/// Everything the kernel experiment measures.
#[derive(Clone, Debug)]
pub struct KernelReport {
    pub pattern_count: usize,
    pub span_rank: usize,
    pub restricted_rank: usize,
    pub kernel_dim: usize,
    pub singular_values: Vec<f64>,
    pub restricted_singular_values: Vec<f64>,
}

/// Dimension of the space of pattern combinations vanishing identically in
/// the restricted dimension (`k-1` for scalar, `k` for tensor invariants)
/// while remaining in the span over dimension `m`: the rank drop between the
/// generic and restricted evaluation matrices, cross-checked over two seeds.
pub fn kernel_dimension(
    patterns: &[ContractionPattern],
    k: usize,
    m: usize,
    valued: Valued,
    samples: usize,
    seed: u64,
) -> Result<KernelReport, PatternError> {
    if patterns.is_empty() {
        return Ok(KernelReport {
            pattern_count: 0,
            span_rank: 0,
            restricted_rank: 0,
            kernel_dim: 0,
            singular_values: Vec::new(),
            restricted_singular_values: Vec::new(),
        });
    }
    if samples < 2 * patterns.len() {
        return Err(PatternError::TooFewSamples);
    }
    let low = match valued {
        Valued::Scalar => k - 1,
        Valued::Tensor => k,
    };
    let mut report: Option<KernelReport> = None;
    for attempt_seed in [seed, seed.wrapping_add(777_777)] {
        let e_full = evaluation_matrix(patterns, m, samples, attempt_seed, None)?;
        let (r_full, s_full) = stable_rank(&e_full)?;
        let e_res = evaluation_matrix(patterns, m, samples, attempt_seed.wrapping_add(13), Some(low))?;
        let (r_res, s_res) = stable_rank(&e_res)?;
        let rep = KernelReport {
            pattern_count: patterns.len(),
            span_rank: r_full,
            restricted_rank: r_res,
            kernel_dim: r_full - r_res,
            singular_values: s_full,
            restricted_singular_values: s_res,
        };
        if let Some(prev) = &report {
            if prev.kernel_dim != rep.kernel_dim || prev.span_rank != rep.span_rank {
                return Err(PatternError::RankUnstable);
            }
        }
        report = Some(rep);
    }
    Ok(report.unwrap())
}

/// Membership of one `Ξ(Tr_π)` in the pattern span.
#[derive(Clone, Debug)]
pub struct XiMembership {
    pub partition: Vec<u8>,
    /// Least-squares residual relative to the right-hand side norm.
    pub residual: f64,
    pub rhs_scale: f64,
    pub coefficients: Vec<Complex64>,
}

/// Result of expressing the transgressed basis in pattern coordinates.
#[derive(Clone, Debug)]
pub struct XiSpanReport {
    pub memberships: Vec<XiMembership>,
    /// Smallest singular value of the column-normalized coefficient matrix;
    /// bounded away from zero certifies independence of the ρ(k) images.
    pub min_singular_value: f64,
    /// Largest fitted coefficient (relative) on patterns built from higher
    /// jets, when any are present.
    pub higher_jet_coefficient: Option<f64>,
}

/// Express each `Ξ_P(Tr_π)` (scalar) or `Ξ_Q(Tr_π)` (tensor) in pattern
/// coordinates by least squares over random samples.
pub fn verify_xi_spans(
    patterns: &[ContractionPattern],
    k: usize,
    m: usize,
    valued: Valued,
    samples: usize,
    seed: u64,
) -> Result<XiSpanReport, PatternError> {
    if samples < 2 * patterns.len() {
        return Err(PatternError::TooFewSamples);
    }
    let max_order = if patterns.iter().any(ContractionPattern::uses_higher_jets) { 3 } else { 2 };
    let mut rows: Vec<Vec<Complex64>> = Vec::new();
    let mut rhs: Vec<Vec<Complex64>> = Vec::new();
    let parts = partitions_bounded(k, m);
    for i in 0..samples {
        let j = sample_table(m, max_order, seed.wrapping_add(1000 * i as u64), None);
        let pattern_rows = sample_rows(patterns, &j, None)?;
        rows.extend(pattern_rows);
        let r = KahlerCurvature::from_normalized_jets(&j);
        match valued {
            Valued::Scalar => {
                let mut row_rhs = Vec::with_capacity(parts.len());
                for part in &parts {
                    let s = InvariantPolynomial::monomial(m, part);
                    row_rhs.push(Complex64::new(xi_p(&s, &r).expect("k <= m"), 0.0));
                }
                rhs.push(row_rhs);
            }
            Valued::Tensor => {
                let mut mats = Vec::with_capacity(parts.len());
                for part in &parts {
                    let s = InvariantPolynomial::monomial(m, part);
                    mats.push(xi_q(&s, &r).expect("k < m"));
                }
                for a in 0..m {
                    for b in 0..m {
                        rhs.push(mats.iter().map(|t| t.at(a, b)).collect());
                    }
                }
            }
        }
    }
    let a = Mat::from_fn(rows.len(), patterns.len(), |r, c| rows[r][c]);
    let mut memberships = Vec::new();
    let mut coeff_cols: Vec<Vec<Complex64>> = Vec::new();
    let mut higher_rel: Option<f64> = None;
    for (pi, part) in parts.iter().enumerate() {
        let b: Vec<Complex64> = rhs.iter().map(|row| row[pi]).collect();
        let rhs_scale = libm::sqrt(b.iter().map(|z| z.norm_sqr()).sum::<f64>());
        let (x, res) = lstsq(&a, &b, RANK_CUTOFF).map_err(|_| PatternError::RankUnstable)?;
        let coeff_scale = x.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1e-30);
        for (p, c) in patterns.iter().zip(x.iter()) {
            if p.uses_higher_jets() {
                let rel = c.norm() / coeff_scale;
                higher_rel = Some(higher_rel.map_or(rel, |h: f64| h.max(rel)));
            }
        }
        memberships.push(XiMembership {
            partition: part.clone(),
            residual: res / rhs_scale.max(1e-30),
            rhs_scale,
            coefficients: x.clone(),
        });
        let norm = libm::sqrt(x.iter().map(|z| z.norm_sqr()).sum::<f64>()).max(1e-30);
        coeff_cols.push(x.iter().map(|z| z / norm).collect());
    }
    let cm = Mat::from_fn(patterns.len(), coeff_cols.len(), |r, c| coeff_cols[c][r]);
    let Svd { s, .. } = svd(&cm).map_err(|_| PatternError::RankUnstable)?;
    let min_sv = s.last().copied().unwrap_or(0.0);
    Ok(XiSpanReport { memberships, min_singular_value: min_sv, higher_jet_coefficient: higher_rel })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::kahler_scalar_identities;

    #[test]
    fn k1_scalar_is_a_single_pattern_equal_to_the_trace() {
        let pats = enumerate_patterns(1, Valued::Scalar, false).unwrap();
        assert_eq!(pats.len(), 1);
        let j = JetTable::random(2, 2, 3, 0.8);
        let r = KahlerCurvature::from_normalized_jets(&j);
        let s = kahler_scalar_identities(&r);
        match evaluate_pattern(&pats[0], &j).unwrap() {
            PatternValue::Scalar(v) => {
                assert!((v - Complex64::new(s.tau_raw, 0.0)).norm() < 1e-12);
            }
            _ => panic!("scalar expected"),
        }
    }

    #[test]
    fn canonicalization_matches_brute_force_orbits_k2() {
        let pats = enumerate_patterns(2, Valued::Scalar, false).unwrap();
        let mut base: Vec<usize> = (0..4).collect();
        let mut all = Vec::new();
        heap_perms(&mut base, &mut all);
        let mut canon: BTreeSet<Vec<u8>> = BTreeSet::new();
        for mt in all {
            let p = ContractionPattern {
                profile: vec![(2, 2); 2],
                valued: Valued::Scalar,
                matching: mt.iter().map(|&x| x as u8).collect(),
            };
            canon.insert(p.canonicalize().matching);
        }
        assert_eq!(canon.len(), pats.len());
    }

    #[test]
    fn flat_jets_evaluate_to_zero() {
        let pats = enumerate_patterns(2, Valued::Scalar, false).unwrap();
        let j = JetTable::flat(2, 2);
        for p in &pats {
            match evaluate_pattern(p, &j).unwrap() {
                PatternValue::Scalar(v) => assert_eq!(v, Complex64::new(0.0, 0.0)),
                _ => panic!(),
            }
        }
    }

    #[test]
    fn k1_tensor_patterns_have_the_two_term_structure() {
        let pats = enumerate_patterns(1, Valued::Tensor, false).unwrap();
        assert_eq!(pats.len(), 2);
    }

    #[test]
    fn unsupported_k_is_rejected() {
        assert!(matches!(
            enumerate_patterns(4, Valued::Scalar, false),
            Err(PatternError::UnsupportedK { .. })
        ));
        assert!(matches!(
            enumerate_patterns(3, Valued::Tensor, false),
            Err(PatternError::UnsupportedK { .. })
        ));
        assert!(matches!(
            enumerate_patterns(1, Valued::Scalar, true),
            Err(PatternError::UnsupportedK { .. })
        ));
    }

    #[test]
    fn xi_p_members_of_k2_span() {
        let pats = enumerate_patterns(2, Valued::Scalar, false).unwrap();
        let m = 2;
        let samples = 4 * pats.len();
        let rep = verify_xi_spans(&pats, 2, m, Valued::Scalar, samples, 42).unwrap();
        for mem in &rep.memberships {
            assert!(mem.residual < 1e-8, "π={:?} residual {}", mem.partition, mem.residual);
        }
        assert!(rep.min_singular_value > 1e-6);
    }

    #[test]
    fn span_dimension_zero_for_no_patterns() {
        assert_eq!(span_dimension(&[], 2, 10, 1).unwrap(), 0);
    }

    #[test]
    fn kernel_dimension_k1_scalar() {
        let pats = enumerate_patterns(1, Valued::Scalar, false).unwrap();
        let rep = kernel_dimension(&pats, 1, 2, Valued::Scalar, 8, 5).unwrap();
        assert_eq!(rep.span_rank, 1);
        assert_eq!(rep.restricted_rank, 0);
        assert_eq!(rep.kernel_dim, 1);
    }

    #[test]
    fn kernel_dimension_k2_scalar_is_rho2() {
        let pats = enumerate_patterns(2, Valued::Scalar, false).unwrap();
        for m in [2usize, 3] {
            let rep = kernel_dimension(&pats, 2, m, Valued::Scalar, 4 * pats.len(), 9).unwrap();
            assert_eq!(rep.kernel_dim, 2, "m={m}: {rep:?}");
        }
    }

    #[test]
    fn kernel_dimension_k1_tensor_is_rho1() {
        let pats = enumerate_patterns(1, Valued::Tensor, false).unwrap();
        let rep = kernel_dimension(&pats, 1, 2, Valued::Tensor, 4 * pats.len(), 11).unwrap();
        assert_eq!(rep.kernel_dim, 1, "{rep:?}");
    }

    #[test]
    fn span_drops_from_m2_to_m1_at_k2() {
        let pats = enumerate_patterns(2, Valued::Scalar, false).unwrap();
        let d2 = span_dimension(&pats, 2, 4 * pats.len(), 21).unwrap();
        let d1 = span_dimension(&pats, 1, 4 * pats.len(), 21).unwrap();
        assert!(d1 < d2, "d1={d1} d2={d2}");
    }
}
