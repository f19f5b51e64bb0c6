//! Numeric laboratory for curvature invariants of Kähler metrics.
//!
//! Everything is desk-scale: complex dimension `m <= 6`, tensor rank `<= 12`,
//! dense storage. The crate is built around a small tower of layers:
//!
//! * [`tensor`] — dense complex multi-index arrays with role-tagged axes and
//!   a pairwise contraction engine;
//! * [`forms`] — the complexified exterior algebra in `(p, q)` bidegree, the
//!   Kähler form and the induced inner product on forms;
//! * [`jets`] — the local model of a Kähler metric at a point (the jet
//!   variables `g(A;B)`), coordinate normalization, potentials;
//! * [`curvature`] — the curvature array extracted from normalized jets and
//!   its presentation as a matrix of `(1,1)`-forms;
//! * [`ring`] — the invariant ring `C[Tr_1, .., Tr_m]` with its partition
//!   basis and restriction maps;
//! * [`transgress`] — the scalar pairing of characteristic forms with powers
//!   of the Kähler form, and its transgression to Hermitian 2-tensors;
//! * [`catalog`] — direct index-sum implementations of the explicit scalar
//!   and tensor invariants, both Kähler and real-Riemannian;
//! * [`patterns`] — enumeration of contraction-pattern invariants and the
//!   numerical rank computations behind the kernel-dimension experiments;
//! * [`models`] — concrete compact models (flat tori with trigonometric
//!   potentials, projective space in an affine chart) evaluated pointwise.
//!
//! The crate is `no_std` (with `alloc`); quadrature drivers, parallelism,
//! file formats and the CLI live in the companion `kforge-lab` crate.

#![cfg_attr(not(test), no_std)]
// index-sum code reads best with explicit indices, even where one of the
// arrays could be iterated
#![allow(clippy::needless_range_loop)]

extern crate alloc;

pub mod catalog;
pub mod curvature;
pub mod forms;
pub mod jets;
pub mod linalg;
pub mod models;
pub mod patterns;
pub mod ring;
pub mod series;
pub mod tensor;
pub mod transgress;

pub use num_complex::Complex64;

/// Library-wide default absolute tolerance for floating comparisons.
pub const DEFAULT_ABS_TOL: f64 = 1e-10;
/// Library-wide default relative tolerance for floating comparisons.
pub const DEFAULT_REL_TOL: f64 = 1e-8;

/// `true` if `a` and `b` agree to the given absolute/relative tolerances.
pub fn close(a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> bool {
    let diff = (a - b).abs();
    diff <= abs_tol || diff <= rel_tol * a.abs().max(b.abs())
}

/// `close` with the library defaults.
pub fn close_default(a: f64, b: f64) -> bool {
    close(a, b, DEFAULT_ABS_TOL, DEFAULT_REL_TOL)
}
