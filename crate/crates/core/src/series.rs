//! Truncated multivariate power series in `z` and `z̄`.
//!
//! Coordinate normalization rewrites the metric components under holomorphic
//! changes of coordinates; the cleanest mechanization is plain power-series
//! arithmetic truncated at the jet order of interest. Degrees in `z` and `z̄`
//! are capped separately: a metric carrying jets `g(A;B)` for
//! `|A|, |B| <= n` is a series of bidegree at most `(n-1, n-1)`.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

/// Exponent vector over the `m` variables.
pub type Expo = Vec<u8>;

fn total(e: &[u8]) -> usize {
    e.iter().map(|&x| x as usize).sum()
}

/// A polynomial in `(z, z̄)` truncated at bidegree `(deg_z, deg_zb)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Series {
    pub m: usize,
    pub deg_z: usize,
    pub deg_zb: usize,
    terms: BTreeMap<(Expo, Expo), Complex64>,
}

impl Series {
    pub fn zero(m: usize, deg_z: usize, deg_zb: usize) -> Self {
        Series { m, deg_z, deg_zb, terms: BTreeMap::new() }
    }

    pub fn constant(m: usize, deg_z: usize, deg_zb: usize, c: Complex64) -> Self {
        let mut s = Series::zero(m, deg_z, deg_zb);
        if c != Complex64::new(0.0, 0.0) {
            s.terms.insert((vec![0; m], vec![0; m]), c);
        }
        s
    }

    /// The holomorphic coordinate function `z_a`.
    pub fn variable(m: usize, a: usize, deg_z: usize, deg_zb: usize) -> Self {
        let mut s = Series::zero(m, deg_z, deg_zb);
        let mut e = vec![0u8; m];
        e[a] = 1;
        s.terms.insert((e, vec![0; m]), Complex64::new(1.0, 0.0));
        s
    }

    pub fn set(&mut self, ez: Expo, ezb: Expo, c: Complex64) {
        if total(&ez) > self.deg_z || total(&ezb) > self.deg_zb {
            return;
        }
        if c == Complex64::new(0.0, 0.0) {
            self.terms.remove(&(ez, ezb));
        } else {
            self.terms.insert((ez, ezb), c);
        }
    }

    pub fn coeff(&self, ez: &[u8], ezb: &[u8]) -> Complex64 {
        let pad = |e: &[u8]| {
            let mut v = e.to_vec();
            v.resize(self.m, 0);
            v
        };
        self.terms
            .get(&(pad(ez), pad(ezb)))
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(Expo, Expo), &Complex64)> {
        self.terms.iter()
    }

    pub fn is_holomorphic(&self) -> bool {
        self.terms.keys().all(|(_, ezb)| total(ezb) == 0)
    }

    pub fn add(&self, other: &Series) -> Series {
        let mut out = self.clone();
        for (k, v) in &other.terms {
            if total(&k.0) > out.deg_z || total(&k.1) > out.deg_zb {
                continue;
            }
            let e = out.terms.entry(k.clone()).or_insert(Complex64::new(0.0, 0.0));
            *e += v;
        }
        out.terms.retain(|_, v| *v != Complex64::new(0.0, 0.0));
        out
    }

    pub fn sub(&self, other: &Series) -> Series {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, f: Complex64) -> Series {
        let mut out = self.clone();
        if f == Complex64::new(0.0, 0.0) {
            out.terms.clear();
            return out;
        }
        for v in out.terms.values_mut() {
            *v *= f;
        }
        out
    }

    pub fn mul(&self, other: &Series) -> Series {
        let mut out = Series::zero(self.m, self.deg_z.min(other.deg_z), self.deg_zb.min(other.deg_zb));
        // keep the caps of self (caller controls truncation)
        out.deg_z = self.deg_z;
        out.deg_zb = self.deg_zb;
        for ((az, ab), va) in &self.terms {
            for ((bz, bb), vb) in &other.terms {
                let tz = total(az) + total(bz);
                let tb = total(ab) + total(bb);
                if tz > out.deg_z || tb > out.deg_zb {
                    continue;
                }
                let ez: Expo = az.iter().zip(bz.iter()).map(|(x, y)| x + y).collect();
                let eb: Expo = ab.iter().zip(bb.iter()).map(|(x, y)| x + y).collect();
                let e = out.terms.entry((ez, eb)).or_insert(Complex64::new(0.0, 0.0));
                *e += va * vb;
            }
        }
        out.terms.retain(|_, v| *v != Complex64::new(0.0, 0.0));
        out
    }

    /// Partial derivative with respect to `z_a`.
    pub fn diff_z(&self, a: usize) -> Series {
        let mut out = Series::zero(self.m, self.deg_z, self.deg_zb);
        for ((ez, eb), v) in &self.terms {
            if ez[a] == 0 {
                continue;
            }
            let mut e = ez.clone();
            e[a] -= 1;
            out.terms.insert((e, eb.clone()), v * ez[a] as f64);
        }
        out
    }

    /// Partial derivative with respect to `z̄_a`.
    pub fn diff_zb(&self, a: usize) -> Series {
        let mut out = Series::zero(self.m, self.deg_z, self.deg_zb);
        for ((ez, eb), v) in &self.terms {
            if eb[a] == 0 {
                continue;
            }
            let mut e = eb.clone();
            e[a] -= 1;
            out.terms.insert((ez.clone(), e), v * eb[a] as f64);
        }
        out
    }

    /// Conjugate series: coefficients conjugated, `z` and `z̄` exponents swapped.
    pub fn conj(&self) -> Series {
        let mut out = Series::zero(self.m, self.deg_zb, self.deg_z);
        for ((ez, eb), v) in &self.terms {
            out.terms.insert((eb.clone(), ez.clone()), v.conj());
        }
        out
    }

    /// Substitute `z_a -> phi[a](w)` (holomorphic) and `z̄_a -> conj(phi[a])(w̄)`.
    pub fn compose_holomorphic(&self, phi: &[Series]) -> Series {
        let m = self.m;
        debug_assert_eq!(phi.len(), m);
        debug_assert!(phi.iter().all(Series::is_holomorphic));
        let phib: Vec<Series> = phi.iter().map(Series::conj).collect();
        let mut out = Series::zero(m, self.deg_z, self.deg_zb);
        // memoized powers per variable
        let mut pow_z: Vec<Vec<Series>> = (0..m)
            .map(|_| vec![Series::constant(m, self.deg_z, self.deg_zb, Complex64::new(1.0, 0.0))])
            .collect();
        let mut pow_zb: Vec<Vec<Series>> = pow_z.clone();
        let get_pow = |tables: &mut Vec<Vec<Series>>, base: &Series, a: usize, k: usize| -> Series {
            while tables[a].len() <= k {
                let prev = tables[a].last().unwrap().clone();
                tables[a].push(prev.mul(base));
            }
            tables[a][k].clone()
        };
        for ((ez, eb), v) in &self.terms {
            let mut term = Series::constant(m, self.deg_z, self.deg_zb, *v);
            for a in 0..m {
                if ez[a] > 0 {
                    let p = get_pow(&mut pow_z, &phi[a], a, ez[a] as usize);
                    term = term.mul(&p);
                }
                if eb[a] > 0 {
                    let p = get_pow(&mut pow_zb, &phib[a], a, eb[a] as usize);
                    term = term.mul(&p);
                }
            }
            out = out.add(&term);
        }
        out
    }
}

/// Invert a holomorphic coordinate change `v = phi(w)` with `phi = id + higher
/// order`, returning `psi` with `phi(psi(v)) = v` up to the truncation degree.
pub fn invert_near_identity(phi: &[Series], deg: usize) -> Vec<Series> {
    let m = phi.len();
    // correction part of phi
    let corr: Vec<Series> = (0..m)
        .map(|a| phi[a].sub(&Series::variable(m, a, deg, 0)))
        .collect();
    let mut psi: Vec<Series> = (0..m).map(|a| Series::variable(m, a, deg, 0)).collect();
    for _ in 0..deg {
        let mut next = Vec::with_capacity(m);
        for a in 0..m {
            // psi_a = v_a - corr_a(psi)
            let substituted = corr[a].compose_holomorphic(&psi);
            next.push(Series::variable(m, a, deg, 0).sub(&substituted));
        }
        if next == psi {
            psi = next;
            break;
        }
        psi = next;
    }
    psi
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn mul_and_diff() {
        let m = 2;
        let z0 = Series::variable(m, 0, 3, 3);
        let z1 = Series::variable(m, 1, 3, 3);
        let p = z0.mul(&z0).add(&z1.scale(c(2.0, 0.0))); // z0^2 + 2 z1
        let dp = p.diff_z(0); // 2 z0
        assert!((dp.coeff(&[1, 0], &[0, 0]) - c(2.0, 0.0)).norm() < 1e-15);
        assert_eq!(dp.coeff(&[0, 1], &[0, 0]), c(0.0, 0.0));
    }

    #[test]
    fn compose_inverts() {
        // v = w + w^2 (m = 1): psi must satisfy phi(psi(v)) = v to degree 4
        let m = 1;
        let deg = 4;
        let w = Series::variable(m, 0, deg, 0);
        let phi = vec![w.add(&w.mul(&w))];
        let psi = invert_near_identity(&phi, deg);
        let comp = phi[0].compose_holomorphic(&psi);
        let diff = comp.sub(&w);
        assert!(diff.iter().all(|(_, v)| v.norm() < 1e-12), "{diff:?}");
        // known series: psi = v - v^2 + 2v^3 - 5v^4
        assert!((psi[0].coeff(&[2], &[]) - c(-1.0, 0.0)).norm() < 1e-12);
        assert!((psi[0].coeff(&[3], &[]) - c(2.0, 0.0)).norm() < 1e-12);
        assert!((psi[0].coeff(&[4], &[]) - c(-5.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn conj_swaps_exponents() {
        let m = 1;
        let mut s = Series::zero(m, 2, 2);
        s.set(vec![2], vec![1], c(1.0, 3.0));
        let sc = s.conj();
        assert!((sc.coeff(&[1], &[2]) - c(1.0, -3.0)).norm() < 1e-15);
    }
}
