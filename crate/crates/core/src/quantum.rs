//! Quantum theta functions: the classic construction from the Gaussian
//! theta vector and its generalization to theta vectors with a constant
//! shift c, together with the translation operators and the functional
//! equations they satisfy.
//!
//! The coefficient of the quantum theta function at a lattice point h is
//! exp(-pi/2 H_c(h, h)) where H_c generalizes the Hermitian pairing H by
//! the shift 2i Im c and the linear term 4i h1^t Re c. Translation by a
//! lattice point g multiplies coefficients by exp(-pi X(g, h)) with
//! X(g, h) = H(g, h) + 2 (Im c)^t (Im T)^{-1} (Im c).

use nalgebra::DVector;
use num_complex::Complex64;
use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::heisenberg::theta_vector;
use crate::lattice::{
    complexify, complexify_conj, hermitian_h, symplectic_pairing, ComplexStructure, Lattice,
    LatticePoint, PhasePoint,
};
use crate::twisted::{inner_product_d, AnalyticElement};

fn cr(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Parameters of a quantum theta function: modulus T, constant shift c
/// (zero for the unshifted construction) and the lattice D.
#[derive(Debug, Clone)]
pub struct QuantumThetaParams {
    pub t: ComplexStructure,
    pub c: DVector<Complex64>,
    pub d: Lattice,
}

impl QuantumThetaParams {
    pub fn new(t: ComplexStructure, c: DVector<Complex64>, d: Lattice) -> Result<Self> {
        if c.len() != t.n() {
            return Err(Error::DimensionMismatch { expected: t.n(), got: c.len() });
        }
        if d.n() != t.n() {
            return Err(Error::DimensionMismatch { expected: t.n(), got: d.n() });
        }
        Ok(Self { t, c, d })
    }

    pub fn n(&self) -> usize {
        self.t.n()
    }

    pub fn is_unshifted(&self) -> bool {
        self.c.iter().all(|z| z.norm() == 0.0)
    }

    /// The normalization constant 2^n det(Im T) (det q of the Gaussian
    /// integral behind the inner product).
    pub fn det_q(&self) -> f64 {
        2f64.powi(self.n() as i32) * self.t.im_det()
    }
}

/// Diagonal shifted pairing
/// H_c(g, g) = (g_ - 2i Im c)^t (Im T)^{-1} (g_* - 2i Im c) + 4i g1^t Re c,
/// where g_ = T g1 + g2 and g_* = conj(T) g1 + g2.
pub fn h_c_diag(g: &PhasePoint, params: &QuantumThetaParams) -> Result<Complex64> {
    if g.n() != params.n() {
        return Err(Error::DimensionMismatch { expected: params.n(), got: g.n() });
    }
    let gu = complexify(g, &params.t)?;
    let gs = complexify_conj(g, &params.t)?;
    let shift = params.c.map(|z| Complex64::new(0.0, 2.0 * z.im));
    let s = params.t.im_inverse().map(cr);
    let left = &gu - &shift;
    let right = &gs - &shift;
    let quad = (left.transpose() * s * right)[(0, 0)];
    let lin: Complex64 = (0..params.n())
        .map(|i| Complex64::new(0.0, 4.0 * g.x1[i]) * cr(params.c[i].re))
        .sum();
    Ok(quad + lin)
}

/// Translation pairing X(g, h) = H(g, h) + 2 (Im c)^t (Im T)^{-1} (Im c).
pub fn x_pairing(g: &PhasePoint, h: &PhasePoint, params: &QuantumThetaParams) -> Result<Complex64> {
    let base = hermitian_h(g, h, &params.t)?;
    Ok(base + cr(x_constant(params)))
}

fn x_constant(params: &QuantumThetaParams) -> f64 {
    let imc = params.c.map(|z| z.im);
    let s = params.t.im_inverse();
    2.0 * (imc.transpose() * s * &imc)[(0, 0)]
}

/// The unshifted quantum theta function: log-coefficient -pi/2 H(h, h).
pub fn manin_theta(params: &QuantumThetaParams) -> Result<AnalyticElement> {
    assert!(params.is_unshifted(), "manin_theta requires c = 0; use shifted_theta");
    shifted_theta(params)
}

/// Quantum theta function with constant shift:
/// log-coefficient -pi/2 H_c(h, h); reduces to the unshifted form at c = 0.
pub fn shifted_theta(params: &QuantumThetaParams) -> Result<AnalyticElement> {
    let p = params.clone();
    Ok(AnalyticElement::new(
        params.d.clone(),
        Arc::new(move |h: &LatticePoint| {
            cr(-PI / 2.0) * h_c_diag(&h.embedded, &p).expect("dimensions fixed by params")
        }),
    ))
}

/// Quantum translation by a lattice point g:
/// log-coefficient(h) -= pi X(g, h).
pub fn quantum_translate(
    g: &LatticePoint,
    theta: &AnalyticElement,
    params: &QuantumThetaParams,
) -> Result<AnalyticElement> {
    if g.coords.len() != 2 * params.n() {
        return Err(Error::PointNotInLattice);
    }
    let ge = g.embedded.clone();
    let p = params.clone();
    let inner = theta.clone();
    Ok(AnalyticElement::new(
        theta.lattice().clone(),
        Arc::new(move |h: &LatticePoint| {
            inner.log_coefficient(h)
                - cr(PI) * x_pairing(&ge, &h.embedded, &p).expect("dimensions fixed by params")
        }),
    ))
}

/// |C~_h - q(lambda_h) - 1/2 H(h, h)| with C~_h = i h1^t (conj(T) h1 + h2),
/// lambda_h = (i/2) (Im T)^{-1} h_*, q(x) = 2 x^t (Im T) x. The scalar
/// identity behind the quantum theta coefficient formula.
pub fn coefficient_identity_defect(h: &LatticePoint, t: &ComplexStructure) -> Result<f64> {
    let hp = &h.embedded;
    if hp.n() != t.n() {
        return Err(Error::DimensionMismatch { expected: t.n(), got: hp.n() });
    }
    let hs = complexify_conj(hp, t)?;
    let h1 = hp.x1.map(cr);
    let c_tilde = Complex64::new(0.0, 1.0) * h1.dot(&hs);
    let sinv = t.im_inverse().map(cr);
    let lambda = (&sinv * &hs).map(|z| Complex64::new(0.0, 0.5) * z);
    let s = t.im().map(cr);
    let q_lambda = cr(2.0) * (lambda.transpose() * s * &lambda)[(0, 0)];
    let hh = hermitian_h(hp, hp, t)?;
    Ok((c_tilde - q_lambda - cr(0.5) * hh).norm())
}

/// Max over the coordinate ball of
/// |<f_{T,c}, pi_h f_{T,c}> sqrt(2^n det Im T) - exp(-pi/2 H_c(h, h))|:
/// the end-to-end link between the Gaussian integrals and the closed-form
/// quantum theta coefficients.
pub fn normalization_defect(params: &QuantumThetaParams, radius: i64) -> Result<f64> {
    let f = theta_vector(&params.t, &params.c)?;
    let ip = inner_product_d(&f, &f, &params.d, radius)?;
    let theta = shifted_theta(params)?;
    let norm = params.det_q().sqrt();
    let mut defect: f64 = 0.0;
    for h in params.d.ball(radius) {
        let lhs = ip.coefficient(&h.coords) * cr(norm);
        let rhs = theta.coefficient(&h);
        defect = defect.max((lhs - rhs).norm());
    }
    Ok(defect)
}

fn wrap_mod_2pi(x: f64) -> f64 {
    let y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y - 2.0 * PI
    } else {
        y
    }
}

/// Defect of the functional equation
/// C_{g,c} e(g) x_{g,c}^*(Theta) = Theta, compared in log space: for every
/// h in the aligned ball, the exponent of the left side at g + h must equal
/// the theta log-coefficient at g + h, modulo 2 pi i.
pub fn functional_equation_defect(
    g: &LatticePoint,
    params: &QuantumThetaParams,
    radius: i64,
) -> Result<f64> {
    if g.coords.len() != 2 * params.n() {
        return Err(Error::PointNotInLattice);
    }
    let theta = shifted_theta(params)?;
    let translated = quantum_translate(g, &theta, params)?;
    let log_c_g = cr(-PI / 2.0) * h_c_diag(&g.embedded, params)?;
    let inner_radius = radius - g.linf();
    assert!(inner_radius >= 2, "radius must exceed |g|_inf + 2");
    let mut defect: f64 = 0.0;
    for h in params.d.ball(inner_radius) {
        // Multiplying by e(g) shifts support by g and contributes the
        // cocycle alpha(g, h) = exp(pi i omega(g, h)).
        let omega = symplectic_pairing(&g.embedded, &h.embedded)?;
        let lhs = log_c_g + Complex64::new(0.0, PI * omega) + translated.log_coefficient(&h);
        let sum_coords: Vec<i64> = g.coords.iter().zip(&h.coords).map(|(a, b)| a + b).collect();
        let rhs = theta.log_coefficient(&params.d.point(sum_coords));
        let diff = lhs - rhs;
        defect = defect.max(diff.re.abs().max(wrap_mod_2pi(diff.im).abs()));
    }
    Ok(defect)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn params_std(cc: Complex64) -> QuantumThetaParams {
        QuantumThetaParams::new(
            ComplexStructure::standard(1),
            DVector::from_row_slice(&[cc]),
            Lattice::standard(1),
        )
        .unwrap()
    }

    #[test]
    fn h_c_reduces_to_h_at_zero_shift() {
        let p = params_std(c(0.0, 0.0));
        let g = PhasePoint::from_slices(&[1.3], &[-0.4]);
        let a = h_c_diag(&g, &p).unwrap();
        let b = hermitian_h(&g, &g, &p.t).unwrap();
        assert!((a - b).norm() < 1e-14);
    }

    #[test]
    fn h_c_hand_value() {
        // T = i, c = i/2, g = (1, 0): (i - i)(-i - i) + 0 = 0.
        let p = params_std(c(0.0, 0.5));
        let g = PhasePoint::from_slices(&[1.0], &[0.0]);
        assert!(h_c_diag(&g, &p).unwrap().norm() < 1e-14);
    }

    #[test]
    fn h_c_grows_quadratically() {
        let p = params_std(c(0.3, 0.5));
        let mut prev = f64::NEG_INFINITY;
        for k in 1..6 {
            let g = PhasePoint::from_slices(&[k as f64], &[k as f64]);
            let re = h_c_diag(&g, &p).unwrap().re;
            assert!(re > prev);
            prev = re;
        }
        assert!(prev > 10.0);
    }

    #[test]
    fn x_pairing_examples() {
        let p0 = params_std(c(0.0, 0.0));
        let g = PhasePoint::from_slices(&[1.0], &[0.5]);
        let h = PhasePoint::from_slices(&[-0.5], &[2.0]);
        let x = x_pairing(&g, &h, &p0).unwrap();
        assert!((x - hermitian_h(&g, &h, &p0.t).unwrap()).norm() < 1e-14);

        let p = params_std(c(0.0, 0.5));
        let x0 = x_pairing(&PhasePoint::zero(1), &h, &p).unwrap();
        assert!((x0 - c(0.5, 0.0)).norm() < 1e-14);

        // Biadditivity up to one extra copy of the constant.
        let g2 = PhasePoint::from_slices(&[0.3], &[-1.0]);
        let lhs = x_pairing(&g.add(&g2), &h, &p).unwrap();
        let parts = x_pairing(&g, &h, &p).unwrap() + x_pairing(&g2, &h, &p).unwrap();
        assert!((lhs - parts + c(0.5, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn manin_theta_coefficients() {
        let p = params_std(c(0.0, 0.0));
        let th = manin_theta(&p).unwrap();
        let d = &p.d;
        assert!((th.coefficient(&d.point(vec![0, 0])) - c(1.0, 0.0)).norm() < 1e-15);
        let v = th.coefficient(&d.point(vec![1, 0]));
        assert!((v - c((-PI / 2.0).exp(), 0.0)).norm() < 1e-14);
        for h in d.ball(3) {
            let v = th.coefficient(&h);
            assert!(v.im.abs() < 1e-14);
            assert!(v.re > 0.0 && v.re <= 1.0 + 1e-15);
        }
    }

    #[test]
    fn shifted_theta_examples() {
        let p0 = params_std(c(0.0, 0.0));
        let p = params_std(c(0.0, 0.5));
        let plain = manin_theta(&p0).unwrap();
        let shifted0 = shifted_theta(&p0).unwrap();
        for h in p0.d.ball(3) {
            assert!((plain.coefficient(&h) - shifted0.coefficient(&h)).norm() < 1e-14);
        }
        // T = i, c = i/2, h = (1, 0): H_c = 0, coefficient 1.
        let sh = shifted_theta(&p).unwrap();
        assert!((sh.coefficient(&p.d.point(vec![1, 0])) - c(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn printed_exponent_forms_agree() {
        // -pi/2 H_c(h,h) from the H_c form vs the expanded form
        // -pi [ 1/2 (h_ - 2i Im c)^t S (h_* - 2i Im c) + 2 i h1^t Re c ].
        let t = ComplexStructure::from_rows(1, &[c(0.4, 1.3)]).unwrap();
        let p = QuantumThetaParams::new(
            t.clone(),
            DVector::from_row_slice(&[c(0.3, 0.2)]),
            Lattice::standard(1),
        )
        .unwrap();
        for h in p.d.ball(4) {
            let hc = h_c_diag(&h.embedded, &p).unwrap();
            let gu = complexify(&h.embedded, &t).unwrap();
            let gs = complexify_conj(&h.embedded, &t).unwrap();
            let shift = c(0.0, 2.0 * 0.2);
            let s = t.im_inverse()[(0, 0)];
            let expanded = (gu[0] - shift) * cr(s) * (gs[0] - shift)
                + c(0.0, 4.0 * h.embedded.x1[0] * 0.3);
            assert!((hc - expanded).norm() < 1e-12);
        }
    }

    #[test]
    fn coefficient_identity_hand_case() {
        let t = ComplexStructure::standard(1);
        let d = Lattice::standard(1);
        assert!(coefficient_identity_defect(&d.point(vec![0, 0]), &t).unwrap() < 1e-15);
        assert!(coefficient_identity_defect(&d.point(vec![1, 0]), &t).unwrap() < 1e-14);
    }

    #[test]
    fn normalization_defect_small() {
        let p0 = params_std(c(0.0, 0.0));
        assert!(normalization_defect(&p0, 4).unwrap() < 1e-10);
        let p = params_std(c(0.3, 0.2));
        assert!(normalization_defect(&p, 4).unwrap() < 1e-10);
    }

    #[test]
    fn translate_composition() {
        let p0 = params_std(c(0.0, 0.0));
        let th = manin_theta(&p0).unwrap();
        let g1 = p0.d.point(vec![1, 0]);
        let g2 = p0.d.point(vec![0, 1]);
        let gsum = p0.d.point(vec![1, 1]);
        let a = quantum_translate(&g2, &quantum_translate(&g1, &th, &p0).unwrap(), &p0).unwrap();
        let b = quantum_translate(&gsum, &th, &p0).unwrap();
        for h in p0.d.ball(3) {
            assert!((a.log_coefficient(&h) - b.log_coefficient(&h)).norm() < 1e-12);
        }
        // With c != 0 the composition picks up one extra copy of the
        // X constant per application.
        let p = params_std(c(0.0, 0.5));
        let th = shifted_theta(&p).unwrap();
        let a = quantum_translate(&g2, &quantum_translate(&g1, &th, &p).unwrap(), &p).unwrap();
        let b = quantum_translate(&gsum, &th, &p).unwrap();
        let extra = cr(PI * 2.0 * 0.5 * 0.5); // pi * 2 (Im c)^t S (Im c)
        for h in p.d.ball(2) {
            let diff = b.log_coefficient(&h) - a.log_coefficient(&h);
            assert!((diff - extra).norm() < 1e-12);
        }
    }

    #[test]
    fn functional_equation_identity_and_hand_case() {
        let p0 = params_std(c(0.0, 0.0));
        let g0 = p0.d.point(vec![0, 0]);
        assert!(functional_equation_defect(&g0, &p0, 5).unwrap() < 1e-13);

        // The key exponent step at T = i, g = (1,0), h = (0,1):
        // -pi/2 H(g,g) - pi/2 H(h,h) - pi H(g,h) + pi i Im H(g,h)
        //   = -pi/2 H(g+h, g+h) = -pi.
        let t = ComplexStructure::standard(1);
        let g = PhasePoint::from_slices(&[1.0], &[0.0]);
        let h = PhasePoint::from_slices(&[0.0], &[1.0]);
        let hg = hermitian_h(&g, &g, &t).unwrap();
        let hh = hermitian_h(&h, &h, &t).unwrap();
        let ghh = hermitian_h(&g, &h, &t).unwrap();
        let lhs = cr(-PI / 2.0) * hg + cr(-PI / 2.0) * hh - cr(PI) * ghh
            + Complex64::new(0.0, PI * ghh.im);
        assert!((lhs - cr(-PI)).norm() < 1e-13);

        let g = p0.d.point(vec![1, 0]);
        assert!(functional_equation_defect(&g, &p0, 5).unwrap() < 1e-12);
        let p = params_std(c(0.3, 0.2));
        assert!(functional_equation_defect(&g, &p, 5).unwrap() < 1e-12);
    }

    #[test]
    fn scalar_identities_random_sweep() {
        // The proof's last display, with and without the shift.
        let t = ComplexStructure::from_rows(
            2,
            &[c(0.3, 1.1), c(-0.2, 0.4), c(-0.2, 0.4), c(0.1, 0.9)],
        )
        .unwrap();
        let p = QuantumThetaParams::new(
            t.clone(),
            DVector::from_row_slice(&[c(0.2, -0.1), c(-0.3, 0.4)]),
            Lattice::standard(2),
        )
        .unwrap();
        for g in p.d.ball(1) {
            for h in p.d.ball(1) {
                let sum = g.embedded.add(&h.embedded);
                let hg = h_c_diag(&g.embedded, &p).unwrap();
                let hh = h_c_diag(&h.embedded, &p).unwrap();
                let x = x_pairing(&g.embedded, &h.embedded, &p).unwrap();
                let im = hermitian_h(&g.embedded, &h.embedded, &t).unwrap().im;
                let lhs = cr(-PI / 2.0) * (hg + hh) - cr(PI) * x + Complex64::new(0.0, PI * im);
                let rhs = cr(-PI / 2.0) * h_c_diag(&sum, &p).unwrap();
                assert!((lhs - rhs).norm() < 1e-11);
            }
        }
    }
}
