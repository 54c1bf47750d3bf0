//! Property-based checks of the structural invariants that hold for all
//! inputs, not just the sampled sweeps in the verification batteries.

use nalgebra::DVector;
use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::PI;

use nctheta::lattice::{
    cocycle_alpha, hermitian_h, symplectic_pairing, ComplexStructure, PhasePoint,
};

fn phase_point() -> impl Strategy<Value = PhasePoint> {
    (prop::collection::vec(-4.0..4.0f64, 1), prop::collection::vec(-4.0..4.0f64, 1))
        .prop_map(|(x1, x2)| PhasePoint::new(DVector::from_vec(x1), DVector::from_vec(x2)))
}

fn modulus_1d() -> impl Strategy<Value = ComplexStructure> {
    (-2.0..2.0f64, 0.3..3.0f64).prop_map(|(re, im)| {
        ComplexStructure::new(nalgebra::DMatrix::from_row_slice(
            1,
            1,
            &[Complex64::new(re, im)],
        ))
        .unwrap()
    })
}

proptest! {
    #[test]
    fn pairing_is_antisymmetric(x in phase_point(), y in phase_point()) {
        let a = symplectic_pairing(&x, &y).unwrap();
        let b = symplectic_pairing(&y, &x).unwrap();
        prop_assert!((a + b).abs() < 1e-12);
    }

    #[test]
    fn cocycle_is_a_bicharacter(x1 in phase_point(), x2 in phase_point(), y in phase_point()) {
        let lhs = cocycle_alpha(&x1.add(&x2), &y).unwrap();
        let rhs = cocycle_alpha(&x1, &y).unwrap() * cocycle_alpha(&x2, &y).unwrap();
        prop_assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn hermitian_diagonal_is_positive(t in modulus_1d(), h in phase_point()) {
        let v = hermitian_h(&h, &h, &t).unwrap();
        prop_assert!(v.im.abs() < 1e-10);
        let size = h.x1.amax().max(h.x2.amax());
        if size > 1e-3 {
            prop_assert!(v.re > 0.0);
        }
    }

    #[test]
    fn cocycle_matches_imaginary_part_of_h(t in modulus_1d(), g in phase_point(), h in phase_point()) {
        let alpha = cocycle_alpha(&g, &h).unwrap();
        let link = Complex64::new(0.0, PI * hermitian_h(&g, &h, &t).unwrap().im).exp();
        prop_assert!((alpha - link).norm() < 1e-10);
    }
}
