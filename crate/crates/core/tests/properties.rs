//! Property tests for the tensor substrate and the frame covariance of the
//! invariant catalog.

use kforge_core::catalog::{kahler_scalar_identities, kahler_tensor_identities};
use kforge_core::curvature::KahlerCurvature;
use kforge_core::jets::{random_unitary, JetTable};
use kforge_core::tensor::{contract, AxisRef, AxisRole, ContractionSpec, LabeledTensor};
use kforge_core::Complex64;
use proptest::prelude::*;

fn tensor_strategy(dim: usize, roles: &'static [AxisRole]) -> impl Strategy<Value = LabeledTensor> {
    let len = dim.pow(roles.len() as u32);
    proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), len).prop_map(move |vals| {
        let mut t = LabeledTensor::zeros(dim, roles);
        let mut idx = vec![0usize; roles.len()];
        for (off, (re, im)) in vals.iter().enumerate() {
            let mut o = off;
            for slot in idx.iter_mut().rev() {
                *slot = o % dim;
                o /= dim;
            }
            t.set(&idx, Complex64::new(*re, *im));
        }
        t
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    /// contract(αx + βy, v) = α contract(x, v) + β contract(y, v)
    #[test]
    fn contraction_is_multilinear(
        x in tensor_strategy(3, &[AxisRole::HolLower, AxisRole::AntiHolLower]),
        y in tensor_strategy(3, &[AxisRole::HolLower, AxisRole::AntiHolLower]),
        v in tensor_strategy(3, &[AxisRole::AntiHolUpper]),
        are in -2.0f64..2.0, aim in -2.0f64..2.0,
        bre in -2.0f64..2.0, bim in -2.0f64..2.0,
    ) {
        let alpha = Complex64::new(are, aim);
        let beta = Complex64::new(bre, bim);
        let spec = ContractionSpec {
            pairs: vec![(AxisRef { factor: 0, axis: 1 }, AxisRef { factor: 1, axis: 0 })],
            free: vec![AxisRef { factor: 0, axis: 0 }],
        };
        let combo = x.scale(alpha).add(&y.scale(beta)).unwrap();
        let lhs = contract(&[&combo, &v], &spec).unwrap();
        let cx = contract(&[&x, &v], &spec).unwrap();
        let cy = contract(&[&y, &v], &spec).unwrap();
        let rhs = cx.scale(alpha).add(&cy.scale(beta)).unwrap();
        let scale = lhs.max_abs().max(rhs.max_abs()).max(1.0);
        prop_assert!(lhs.max_abs_diff(&rhs).unwrap() <= 1e-12 * scale);
    }

    /// Any valid re-bracketing of a three-factor contraction agrees.
    #[test]
    fn contraction_order_independence(
        a in tensor_strategy(2, &[AxisRole::HolLower, AxisRole::AntiHolLower]),
        b in tensor_strategy(2, &[AxisRole::AntiHolUpper, AxisRole::HolUpper]),
        c in tensor_strategy(2, &[AxisRole::HolLower, AxisRole::Real]),
    ) {
        // chain a_{i s̄} b^{s̄ t} c_{t u}: pair (a.1, b.0) and (b.1, c.0)
        let spec = ContractionSpec {
            pairs: vec![
                (AxisRef { factor: 0, axis: 1 }, AxisRef { factor: 1, axis: 0 }),
                (AxisRef { factor: 1, axis: 1 }, AxisRef { factor: 2, axis: 0 }),
            ],
            free: vec![AxisRef { factor: 0, axis: 0 }, AxisRef { factor: 2, axis: 1 }],
        };
        let abc = contract(&[&a, &b, &c], &spec).unwrap();
        // re-bracket: fold (b, c) first, then a, with identical pairings
        let spec2 = ContractionSpec {
            pairs: vec![
                (AxisRef { factor: 2, axis: 1 }, AxisRef { factor: 0, axis: 0 }),
                (AxisRef { factor: 0, axis: 1 }, AxisRef { factor: 1, axis: 0 }),
            ],
            free: vec![AxisRef { factor: 2, axis: 0 }, AxisRef { factor: 1, axis: 1 }],
        };
        let bca = contract(&[&b, &c, &a], &spec2).unwrap();
        let scale = abc.max_abs().max(1.0);
        prop_assert!(abc.max_abs_diff(&bca).unwrap() <= 1e-12 * scale);
    }

    /// symmetrize ∘ symmetrize = symmetrize
    #[test]
    fn symmetrize_idempotent(
        t in tensor_strategy(2, &[AxisRole::HolLower, AxisRole::HolLower, AxisRole::HolLower]),
    ) {
        let once = t.symmetrize(&[0, 1, 2]).unwrap();
        let twice = once.symmetrize(&[0, 1, 2]).unwrap();
        prop_assert!(twice.max_abs_diff(&once).unwrap() <= 1e-14 * once.max_abs().max(1.0));
    }
}

/// Every catalog invariant is unitary-frame invariant (scalars) or
/// conjugation-covariant (tensors) under random constant unitary changes.
#[test]
fn frame_covariance_of_the_catalog() {
    for m in 2..=3usize {
        let jets = JetTable::random(m, 2, 42 + m as u64, 0.7);
        let r = KahlerCurvature::from_normalized_jets(&jets);
        let s = kahler_scalar_identities(&r);
        let t = kahler_tensor_identities(&r);
        for useed in 0..20u64 {
            let u = random_unitary(m, 500 + useed);
            let jets_u = jets.unitary_transform(&u);
            let ru = KahlerCurvature::from_normalized_jets(&jets_u);
            let su = kahler_scalar_identities(&ru);
            let tu = kahler_tensor_identities(&ru);
            assert!((s.p1 - su.p1).abs() <= 1e-9 * (1.0 + s.p1.abs()), "P1 m={m} seed={useed}");
            assert!((s.p2 - su.p2).abs() <= 1e-9 * (1.0 + s.p2.abs()), "P2 m={m} seed={useed}");
            assert!((s.tau - su.tau).abs() <= 1e-9 * (1.0 + s.tau.abs()), "tau m={m}");
            // tensors transform by conjugation with U
            for (name, before, after) in [
                ("Q1", &t.q1, &tu.q1),
                ("Q21", &t.q21, &tu.q21),
                ("Q22", &t.q22, &tu.q22),
            ] {
                let moved = before.unitary_transform(&u);
                assert!(
                    moved.max_abs_diff(after) <= 1e-9 * (1.0 + after.max_abs()),
                    "{name} m={m} seed={useed}: {}",
                    moved.max_abs_diff(after)
                );
            }
        }
    }
}

/// Pattern evaluation is stable under torus padding (the restriction
/// compatibility behind the kernel experiments).
#[test]
fn pattern_padding_consistency() {
    use kforge_core::patterns::{enumerate_patterns, evaluate_pattern, PatternValue, Valued};
    let pats = enumerate_patterns(2, Valued::Scalar, false).unwrap();
    for seed in 0..10u64 {
        let j = JetTable::random(2, 2, 300 + seed, 0.8);
        let padded = j.product_with_torus(1);
        for p in &pats {
            let a = match evaluate_pattern(p, &j).unwrap() {
                PatternValue::Scalar(v) => v,
                _ => unreachable!(),
            };
            let b = match evaluate_pattern(p, &padded).unwrap() {
                PatternValue::Scalar(v) => v,
                _ => unreachable!(),
            };
            assert!((a - b).norm() <= 1e-12 * (1.0 + a.norm()), "seed {seed}");
        }
    }
}
