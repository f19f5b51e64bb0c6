//! Concrete compact Kähler models, evaluated pointwise.
//!
//! Two model families cover every experiment:
//!
//! * flat tori `R^{2m}/Z^{2m}` (unit coordinate cell, Euclidean background
//!   `g_{ab̄} = δ/2`, total volume 1) perturbed by real trigonometric
//!   potentials — the substrate for metric-independence and variational
//!   experiments;
//! * complex projective space in the affine chart with the potential
//!   `log(1 + |z|²)`, plus finite products — the witnesses for nonvanishing
//!   characteristic numbers.
//!
//! Jets come from exact term-wise differentiation of the potential (never
//! from finite differencing of the metric); quadrature drivers live in the
//! companion crate and consume the pointwise values produced here.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::jets::{multisets, JetError, JetTable};
use crate::linalg::{det, Mat};
use crate::series::Series;

#[derive(Clone, Debug, PartialEq)]
pub enum ModelError {
    /// Metric lost positive definiteness at a sampled point.
    NotPositiveDefinite,
    /// Potential coefficients do not define a real function.
    PotentialNotReal,
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelError::NotPositiveDefinite => write!(f, "metric not positive definite at a grid point"),
            ModelError::PotentialNotReal => write!(f, "trigonometric potential is not real-valued"),
        }
    }
}

impl From<JetError> for ModelError {
    fn from(e: JetError) -> Self {
        match e {
            JetError::PotentialNotReal => ModelError::PotentialNotReal,
            _ => ModelError::NotPositiveDefinite,
        }
    }
}

// ── trigonometric torus potentials ───────────────────────────────────────

/// One harmonic `c · e^{2πi (p·x + q·y)}` of a real potential on the torus.
#[derive(Clone, Debug)]
pub struct TrigTerm {
    pub p: Vec<i32>,
    pub q: Vec<i32>,
    pub coeff: Complex64,
}

/// A real trigonometric potential on the unit torus of complex dimension `m`.
///
/// In complex coordinates the harmonic is `e^{2πi Σ(μ_a z_a + ν_a z̄_a)}`
/// with `μ = (p - iq)/2`, `ν = (p + iq)/2 = conj μ`, so every mixed partial
/// is available in closed form.
#[derive(Clone, Debug)]
pub struct TrigPotential {
    pub m: usize,
    pub terms: Vec<TrigTerm>,
}

impl TrigPotential {
    pub fn new(m: usize) -> Self {
        TrigPotential { m, terms: Vec::new() }
    }

    /// Add `c · e^{2πi(p·x+q·y)}` together with its conjugate harmonic so
    /// the potential stays real.
    pub fn add_real_term(&mut self, p: &[i32], q: &[i32], c: Complex64) {
        assert_eq!(p.len(), self.m);
        assert_eq!(q.len(), self.m);
        if p.iter().all(|&x| x == 0) && q.iter().all(|&x| x == 0) {
            // constant term: potential shifts by a constant, metric unchanged
            self.terms.push(TrigTerm { p: p.to_vec(), q: q.to_vec(), coeff: Complex64::new(c.re, 0.0) });
            return;
        }
        self.terms.push(TrigTerm { p: p.to_vec(), q: q.to_vec(), coeff: c * 0.5 });
        self.terms.push(TrigTerm {
            p: p.iter().map(|x| -x).collect(),
            q: q.iter().map(|x| -x).collect(),
            coeff: c.conj() * 0.5,
        });
    }

    /// Seeded random potential: `harmonics` random frequency vectors with
    /// `|p|∞, |q|∞ <= max_freq`, coefficients rescaled so the complex
    /// Hessian stays below `amplitude` in operator norm everywhere — against
    /// the flat background `δ/2`, any `amplitude < 1/2` keeps the metric
    /// positive definite on the whole torus.
    pub fn random(m: usize, seed: u64, amplitude: f64, max_freq: i32, harmonics: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut pot = TrigPotential::new(m);
        let mut chosen: alloc::collections::BTreeSet<(Vec<i32>, Vec<i32>)> =
            alloc::collections::BTreeSet::new();
        let span = (2 * max_freq + 1) as u32;
        let mut guard = 0;
        while chosen.len() < harmonics && guard < 10_000 {
            guard += 1;
            let p: Vec<i32> =
                (0..m).map(|_| rng.gen_range(0..span) as i32 - max_freq).collect();
            let q: Vec<i32> =
                (0..m).map(|_| rng.gen_range(0..span) as i32 - max_freq).collect();
            if p.iter().all(|&x| x == 0) && q.iter().all(|&x| x == 0) {
                continue;
            }
            let mirror: (Vec<i32>, Vec<i32>) =
                (p.iter().map(|x| -x).collect(), q.iter().map(|x| -x).collect());
            if chosen.contains(&mirror) {
                continue;
            }
            chosen.insert((p, q));
        }
        for (p, q) in chosen {
            let c = Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
            pot.add_real_term(&p, &q, c);
        }
        // rigorous Hessian bound: Σ_t |c_t| (2π)² |μ|∞ |ν|∞ per entry, times m
        let mut bound = 0.0f64;
        for t in &pot.terms {
            let mu_max = t
                .p
                .iter()
                .zip(t.q.iter())
                .map(|(&pp, &qq)| libm::sqrt((pp * pp + qq * qq) as f64) / 2.0)
                .fold(0.0, f64::max);
            bound += t.coeff.norm() * 4.0 * PI * PI * mu_max * mu_max;
        }
        bound *= m as f64;
        if bound > 0.0 {
            let scale = amplitude / bound;
            for t in &mut pot.terms {
                t.coeff *= scale;
            }
        }
        pot
    }

    pub fn reality_defect(&self) -> f64 {
        use alloc::collections::BTreeMap;
        let mut sums: BTreeMap<(Vec<i32>, Vec<i32>), Complex64> = BTreeMap::new();
        for t in &self.terms {
            *sums.entry((t.p.clone(), t.q.clone())).or_insert(Complex64::new(0.0, 0.0)) += t.coeff;
        }
        let mut worst = 0.0f64;
        for ((p, q), c) in &sums {
            let mp: Vec<i32> = p.iter().map(|x| -x).collect();
            let mq: Vec<i32> = q.iter().map(|x| -x).collect();
            let mirror = sums.get(&(mp, mq)).copied().unwrap_or(Complex64::new(0.0, 0.0));
            worst = worst.max((mirror - c.conj()).norm());
        }
        worst
    }

    /// Scale all harmonics (used to build one-parameter families).
    pub fn scaled(&self, f: f64) -> TrigPotential {
        let mut out = self.clone();
        for t in &mut out.terms {
            t.coeff *= f;
        }
        out
    }

    /// Add another potential (potentials of Kähler metrics add).
    pub fn plus(&self, other: &TrigPotential, weight: f64) -> TrigPotential {
        assert_eq!(self.m, other.m);
        let mut out = self.clone();
        for t in &other.terms {
            out.terms.push(TrigTerm { p: t.p.clone(), q: t.q.clone(), coeff: t.coeff * weight });
        }
        out
    }

    /// The complex Hessian `∂_a ∂̄_b f` at the point (real torus coordinates
    /// `(x, y) ∈ [0,1)^{2m}`) — the Kähler variation generated by `f`.
    pub fn hessian_at(&self, xy: &[f64]) -> Mat {
        let m = self.m;
        let mut h = Mat::zeros(m, m);
        for t in &self.terms {
            let (phase, mu, nu) = harmonic(t, xy, m);
            let two_pi_i = Complex64::new(0.0, 2.0 * PI);
            for a in 0..m {
                for b in 0..m {
                    h[(a, b)] += t.coeff * phase * (two_pi_i * mu[a]) * (two_pi_i * nu[b]);
                }
            }
        }
        h
    }

    /// Jet table of the metric `g = δ/2 + ∂∂̄ f` at the point, every entry an
    /// exact term-wise derivative of the harmonics.
    pub fn jets_at(&self, xy: &[f64], max_order: usize) -> Result<JetTable, ModelError> {
        if self.reality_defect() > 1e-12 {
            return Err(ModelError::PotentialNotReal);
        }
        let m = self.m;
        let two_pi_i = Complex64::new(0.0, 2.0 * PI);
        let mut values: Vec<(Vec<u8>, Vec<u8>, Complex64)> = Vec::new();
        let harmonics: Vec<(Complex64, Vec<Complex64>, Vec<Complex64>)> =
            self.terms.iter().map(|t| harmonic(t, xy, m)).collect();
        for oa in 1..=max_order {
            for ob in 1..=max_order {
                for a in multisets(m, oa) {
                    for b in multisets(m, ob) {
                        let mut v = Complex64::new(0.0, 0.0);
                        if oa == 1 && ob == 1 && a[0] == b[0] {
                            v += 0.5;
                        }
                        for (t, (phase, mu, nu)) in self.terms.iter().zip(harmonics.iter()) {
                            let mut fac = t.coeff * phase;
                            for &ai in &a {
                                fac *= two_pi_i * mu[ai as usize];
                            }
                            for &bi in &b {
                                fac *= two_pi_i * nu[bi as usize];
                            }
                            v += fac;
                        }
                        if v != Complex64::new(0.0, 0.0) {
                            values.push((a.clone(), b.clone(), v));
                        }
                    }
                }
            }
        }
        let table = JetTable::from_raw_entries(m, max_order, &values)?;
        // positivity check of the order-0 block happens inside from_raw_entries
        Ok(table)
    }

    /// Dense raw 2-jets at the point (the quadrature fast path).
    pub fn raw_jets_at(&self, xy: &[f64]) -> crate::curvature::RawJets2 {
        let m = self.m;
        let two_pi_i = Complex64::new(0.0, 2.0 * PI);
        let mut raw = crate::curvature::RawJets2::zeros(m);
        for a in 0..m {
            raw.g[(a, a)] = Complex64::new(0.5, 0.0);
        }
        let mut fa = vec![Complex64::new(0.0, 0.0); m];
        let mut fb = vec![Complex64::new(0.0, 0.0); m];
        for t in &self.terms {
            let (phase, mu, nu) = harmonic(t, xy, m);
            let base = t.coeff * phase;
            for x in 0..m {
                fa[x] = two_pi_i * mu[x];
                fb[x] = two_pi_i * nu[x];
            }
            for a in 0..m {
                let ba = base * fa[a];
                for b in 0..m {
                    raw.g[(a, b)] += ba * fb[b];
                    let bab = ba * fb[b];
                    for d in 0..m {
                        // d1[a][b][d] = ∂_d g_{ab̄}
                        let v = bab * fa[d];
                        raw.d1_set(a, b, d, raw.d1_at(a, b, d) + v);
                        for c in 0..m {
                            let w = v * fb[c];
                            raw.s2_set(a, b, c, d, raw.s2_at(a, b, c, d) + w);
                        }
                    }
                }
            }
        }
        raw
    }

    /// Riemannian volume density `2^m det g_{ab̄}` at the point.
    pub fn density_at(&self, xy: &[f64]) -> Result<f64, ModelError> {
        let m = self.m;
        let mut g = Mat::from_fn(m, m, |a, b| {
            if a == b { Complex64::new(0.5, 0.0) } else { Complex64::new(0.0, 0.0) }
        });
        let h = self.hessian_at(xy);
        for a in 0..m {
            for b in 0..m {
                g[(a, b)] += h[(a, b)];
            }
        }
        let d = det(&g).re * libm::pow(2.0, m as f64);
        if d <= 0.0 || !d.is_finite() {
            return Err(ModelError::NotPositiveDefinite);
        }
        Ok(d)
    }
}

fn wrap01(x: f64) -> f64 {
    let r = x - libm::floor(x);
    if r < 0.0 {
        r + 1.0
    } else {
        r
    }
}

/// Evaluate one harmonic: phase factor at the (wrapped) point and the complex
/// frequency vectors `μ`, `ν`.
fn harmonic(t: &TrigTerm, xy: &[f64], m: usize) -> (Complex64, Vec<Complex64>, Vec<Complex64>) {
    let mut arg = 0.0f64;
    for a in 0..m {
        let x = wrap01(xy[a]);
        let y = wrap01(xy[m + a]);
        arg += t.p[a] as f64 * x + t.q[a] as f64 * y;
    }
    let phase = Complex64::new(libm::cos(2.0 * PI * arg), libm::sin(2.0 * PI * arg));
    let mu: Vec<Complex64> =
        (0..m).map(|a| Complex64::new(t.p[a] as f64 / 2.0, -(t.q[a] as f64) / 2.0)).collect();
    let nu: Vec<Complex64> = mu.iter().map(|z| z.conj()).collect();
    (phase, mu, nu)
}

// ── projective space in the affine chart ────────────────────────────────

/// `CP^n` with the potential `log(1 + |z|²)` on the affine chart.
#[derive(Clone, Copy, Debug)]
pub struct FubiniStudy {
    pub n: usize,
}

impl FubiniStudy {
    /// Jets at a chart point, from the exact local expansion of
    /// `log(c + u)` with `c = 1 + |z₀|²` and `u` the shifted polynomial.
    pub fn jets_at(&self, z0: &[Complex64], max_order: usize) -> Result<JetTable, ModelError> {
        let n = self.n;
        let cap = max_order + 1;
        let c0 = 1.0 + z0.iter().map(|z| z.norm_sqr()).sum::<f64>();
        // u(ζ, ζ̄) = Σ_a ( z̄0_a ζ_a + z0_a ζ̄_a + ζ_a ζ̄_a )
        let mut u = Series::zero(n, cap, cap);
        for a in 0..n {
            let mut ez = vec![0u8; n];
            ez[a] = 1;
            u.set(ez.clone(), vec![0; n], z0[a].conj());
            u.set(vec![0; n], ez.clone(), z0[a]);
            u.set(ez.clone(), ez.clone(), Complex64::new(1.0, 0.0));
        }
        // log(c + u) = log c + Σ_j (-1)^{j+1} (u/c)^j / j, truncated
        let mut f = Series::zero(n, cap, cap);
        let mut upow = Series::constant(n, cap, cap, Complex64::new(1.0, 0.0));
        for j in 1..=(2 * cap) {
            upow = upow.mul(&u);
            let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
            let scale = sign / (j as f64 * libm::pow(c0, j as f64));
            f = f.add(&upow.scale(Complex64::new(scale, 0.0)));
        }
        let mut values: Vec<(Vec<u8>, Vec<u8>, Complex64)> = Vec::new();
        for oa in 1..=max_order {
            for ob in 1..=max_order {
                for a in multisets(n, oa) {
                    for b in multisets(n, ob) {
                        let (ea, eb) = (expo(&a, n), expo(&b, n));
                        let v = f.coeff(&ea, &eb) * crate::jets::eps(&a) * crate::jets::eps(&b);
                        if v != Complex64::new(0.0, 0.0) {
                            values.push((a.clone(), b.clone(), v));
                        }
                    }
                }
            }
        }
        Ok(JetTable::from_raw_entries(n, max_order, &values)?)
    }

    /// Chart density `2^n (1 + |z|²)^{-(n+1)}`.
    pub fn density_at(&self, z: &[Complex64]) -> f64 {
        let c = 1.0 + z.iter().map(|x| x.norm_sqr()).sum::<f64>();
        libm::pow(2.0, self.n as f64) * libm::pow(c, -(self.n as f64 + 1.0))
    }

    /// Closed-form chart volume `(2π)^n / n!` (the quadrature oracle in the
    /// companion crate cross-checks this).
    pub fn volume_closed_form(&self) -> f64 {
        let mut fact = 1.0;
        for i in 2..=self.n {
            fact *= i as f64;
        }
        libm::pow(2.0 * PI, self.n as f64) / fact
    }
}

fn expo(multiset: &[u8], m: usize) -> Vec<u8> {
    let mut e = vec![0u8; m];
    for &i in multiset {
        e[i as usize] += 1;
    }
    e
}

// ── quadrature grids ─────────────────────────────────────────────────────

/// Uniform periodic grid on the unit torus: `res` points per real dimension,
/// equal weights summing to the unit coordinate volume. For trigonometric
/// integrands the rectangle rule on this grid is spectrally accurate.
#[derive(Clone, Copy, Debug)]
pub struct TorusGrid {
    pub m: usize,
    pub res: usize,
}

impl TorusGrid {
    pub fn len(&self) -> usize {
        self.res.pow(2 * self.m as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn weight(&self) -> f64 {
        1.0 / self.len() as f64
    }

    /// The `i`-th grid point as `(x_1..x_m, y_1..y_m)` coordinates.
    pub fn point(&self, mut i: usize) -> Vec<f64> {
        let d = 2 * self.m;
        let mut out = vec![0.0; d];
        for slot in out.iter_mut().rev() {
            *slot = (i % self.res) as f64 / self.res as f64;
            i /= self.res;
        }
        out
    }
}
