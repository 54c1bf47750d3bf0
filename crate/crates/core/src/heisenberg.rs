//! The module S(R^n) as exact symbolic Gaussians, the Heisenberg
//! representation acting on it, constant-curvature connections,
//! holomorphicity and theta vectors.
//!
//! A [`GaussianVector`] is exp(s + pi i x^t A x + 2 pi i b^t x). The family
//! is closed under the Heisenberg action pi_y, so every identity of the
//! representation becomes exact algebra on (A, b, s).

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::lattice::{ComplexStructure, PhasePoint};

const SYM_TOL: f64 = 1e-12;

fn ci(im: f64) -> Complex64 {
    Complex64::new(0.0, im)
}

/// Exact symbolic element exp(s + pi i x^t A x + 2 pi i b^t x) of S(R^n).
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianVector {
    n: usize,
    a: DMatrix<Complex64>,
    b: DVector<Complex64>,
    s: Complex64,
}

impl GaussianVector {
    pub fn new(a: DMatrix<Complex64>, b: DVector<Complex64>, s: Complex64) -> Result<Self> {
        let n = a.nrows();
        assert_eq!(a.ncols(), n, "A must be square");
        assert_eq!(b.len(), n, "b must match A");
        let mut asym: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                asym = asym.max((a[(i, j)] - a[(j, i)]).norm());
            }
        }
        if asym > SYM_TOL {
            return Err(Error::NotSymmetric(asym));
        }
        // Membership in S(R^n): Im A positive definite.
        let im = a.map(|z| z.im);
        let eig = im.symmetric_eigen().eigenvalues;
        let max = eig.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min = eig.iter().cloned().fold(f64::INFINITY, f64::min);
        if max.is_nan() || max <= 0.0 || min <= 1e-9 * max {
            return Err(Error::ImNotPositiveDefinite);
        }
        Ok(Self { n, a, b, s })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn quadratic(&self) -> &DMatrix<Complex64> {
        &self.a
    }

    pub fn linear(&self) -> &DVector<Complex64> {
        &self.b
    }

    pub fn log_prefactor(&self) -> Complex64 {
        self.s
    }

    /// Pointwise value exp(s + pi i x^t A x + 2 pi i b^t x).
    pub fn evaluate(&self, x: &DVector<f64>) -> Complex64 {
        assert_eq!(x.len(), self.n);
        let xc = x.map(|v| Complex64::new(v, 0.0));
        let quad = (xc.transpose() * &self.a * &xc)[(0, 0)];
        let lin = self.b.dot(&xc);
        (self.s + ci(PI) * quad + ci(2.0 * PI) * lin).exp()
    }

    /// Multiply by a nonzero complex scalar (folded into the prefactor).
    pub fn scaled(&self, factor: Complex64) -> GaussianVector {
        let mut out = self.clone();
        out.s += factor.ln();
        out
    }
}

/// Heisenberg action: (pi_y f)(x) = exp(2 pi i x^t y2 + pi i y1^t y2) f(x + y1),
/// computed exactly on the symbolic form: A is unchanged,
/// b -> b + A y1 + y2, s -> s + pi i y1^t A y1 + 2 pi i b^t y1 + pi i y1^t y2.
pub fn pi_act(y: &PhasePoint, f: &GaussianVector) -> Result<GaussianVector> {
    if y.n() != f.n {
        return Err(Error::DimensionMismatch { expected: f.n, got: y.n() });
    }
    let y1 = y.x1.map(|v| Complex64::new(v, 0.0));
    let y2 = y.x2.map(|v| Complex64::new(v, 0.0));
    let ay1 = &f.a * &y1;
    let b = &f.b + &ay1 + &y2;
    let s = f.s + ci(PI) * y1.dot(&ay1) + ci(2.0 * PI) * f.b.dot(&y1) + ci(PI) * y1.dot(&y2);
    Ok(GaussianVector { n: f.n, a: f.a.clone(), b, s })
}

/// Adjoint of the Heisenberg action: pi_y^* = pi_{-y}
/// (alpha(y, -y) = 1, so the inverse carries no extra phase).
pub fn pi_act_adjoint(y: &PhasePoint, f: &GaussianVector) -> Result<GaussianVector> {
    pi_act(&y.neg(), f)
}

/// 20 fixed probe points from a Halton sequence, mapped to [-2, 2]^n.
pub fn probe_points(n: usize) -> Vec<DVector<f64>> {
    const PRIMES: [u64; 4] = [2, 3, 5, 7];
    (1..=20)
        .map(|k| {
            DVector::from_iterator(
                n,
                (0..n).map(|d| -2.0 + 4.0 * halton(k, PRIMES[d % PRIMES.len()])),
            )
        })
        .collect()
}

fn halton(mut index: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while index > 0 {
        f /= base as f64;
        r += f * (index % base) as f64;
        index /= base;
    }
    r
}

/// Max over probe points of |pi_x pi_y f - alpha(x,y) conj(alpha)(y,x) pi_y pi_x f|.
pub fn commutation_defect(x: &PhasePoint, y: &PhasePoint, f: &GaussianVector) -> Result<f64> {
    let lhs = pi_act(x, &pi_act(y, f)?)?;
    let rhs = pi_act(y, &pi_act(x, f)?)?;
    let phase = crate::lattice::cocycle_alpha(x, y)?
        * crate::lattice::cocycle_alpha(y, x)?.conj();
    let mut defect: f64 = 0.0;
    for p in probe_points(f.n) {
        defect = defect.max((lhs.evaluate(&p) - phase * rhs.evaluate(&p)).norm());
    }
    Ok(defect)
}

/// Max over probe points of |pi_x pi_y f - alpha(x,y) pi_{x+y} f|.
pub fn composition_defect(x: &PhasePoint, y: &PhasePoint, f: &GaussianVector) -> Result<f64> {
    let lhs = pi_act(x, &pi_act(y, f)?)?;
    let rhs = pi_act(&x.add(y), f)?;
    let alpha = crate::lattice::cocycle_alpha(x, y)?;
    let mut defect: f64 = 0.0;
    for p in probe_points(f.n) {
        defect = defect.max((lhs.evaluate(&p) - alpha * rhs.evaluate(&p)).norm());
    }
    Ok(defect)
}

/// Constant-curvature connection data: nabla_alpha = d/dx^alpha and
/// nabla_{n+alpha} = -2 pi i sigma_alpha x_alpha, with the complex block
/// t = (1, tau) tying them into n holomorphic directions.
#[derive(Debug, Clone)]
pub struct ConnectionSpec {
    pub n: usize,
    pub sigma: DVector<f64>,
    pub tau: DMatrix<Complex64>,
}

impl ConnectionSpec {
    pub fn new(sigma: DVector<f64>, tau: DMatrix<Complex64>) -> Self {
        let n = sigma.len();
        assert_eq!(tau.nrows(), n);
        assert_eq!(tau.ncols(), n);
        Self { n, sigma, tau }
    }
}

/// T_{ab} = tau_{ab} sigma_b (no sum); must come out symmetric with
/// positive-definite imaginary part.
pub fn build_t(spec: &ConnectionSpec) -> Result<ComplexStructure> {
    let n = spec.n;
    let mut t = DMatrix::zeros(n, n);
    for a in 0..n {
        for b in 0..n {
            t[(a, b)] = spec.tau[(a, b)] * Complex64::new(spec.sigma[b], 0.0);
        }
    }
    ComplexStructure::new(t)
}

/// A degree-1 polynomial times a Gaussian: (linear^t x + constant) f(x).
/// The image of a Gaussian under one connection component.
#[derive(Debug, Clone)]
pub struct PolyGaussian {
    pub linear: DVector<Complex64>,
    pub constant: Complex64,
    pub gaussian: GaussianVector,
}

impl PolyGaussian {
    pub fn evaluate(&self, x: &DVector<f64>) -> Complex64 {
        let xc = x.map(|v| Complex64::new(v, 0.0));
        (self.linear.dot(&xc) + self.constant) * self.gaussian.evaluate(x)
    }
}

/// Apply connection component j (1-based, j in 1..=2n) to f.
///
/// j = alpha <= n is the derivative d/dx^alpha: 2 pi i (A x + b)_alpha f.
/// j = n + alpha is multiplication by -2 pi i sigma_alpha x_alpha.
pub fn connection_apply(j: usize, spec: &ConnectionSpec, f: &GaussianVector) -> Result<PolyGaussian> {
    let n = spec.n;
    if j < 1 || j > 2 * n {
        return Err(Error::IndexOutOfRange(j));
    }
    if f.n != n {
        return Err(Error::DimensionMismatch { expected: n, got: f.n });
    }
    if j <= n {
        let alpha = j - 1;
        let linear = DVector::from_iterator(n, (0..n).map(|k| ci(2.0 * PI) * f.a[(alpha, k)]));
        Ok(PolyGaussian {
            linear,
            constant: ci(2.0 * PI) * f.b[alpha],
            gaussian: f.clone(),
        })
    } else {
        let alpha = j - n - 1;
        let mut linear = DVector::zeros(n);
        linear[alpha] = ci(-2.0 * PI * spec.sigma[alpha]);
        Ok(PolyGaussian {
            linear,
            constant: Complex64::new(0.0, 0.0),
            gaussian: f.clone(),
        })
    }
}

/// The scalar lambda with [nabla_alpha, nabla_{n+alpha}] f = lambda f,
/// computed from the two composition orders at the probe points.
/// Errors with `NotProportional` if the ratio is not constant.
pub fn curvature_scalar(alpha: usize, spec: &ConnectionSpec, f: &GaussianVector) -> Result<Complex64> {
    let n = spec.n;
    if alpha < 1 || alpha > n {
        return Err(Error::IndexOutOfRange(alpha));
    }
    let sig = spec.sigma[alpha - 1];
    let deriv = connection_apply(alpha, spec, f)?; // (l^t x + c) f with l, c from A, b
    let mut lambda = None;
    for p in probe_points(n) {
        let fx = f.evaluate(&p);
        // nabla_alpha (m x_alpha f) with m = -2 pi i sigma: product rule,
        // = m f + m x_alpha (d f / dx^alpha).
        let m = ci(-2.0 * PI * sig);
        let dfa = deriv.evaluate(&p);
        let first = m * fx + m * Complex64::new(p[alpha - 1], 0.0) * dfa;
        // m x_alpha applied after the derivative.
        let second = m * Complex64::new(p[alpha - 1], 0.0) * dfa;
        let ratio = (first - second) / fx;
        match lambda {
            None => lambda = Some(ratio),
            Some(l) => {
                if (ratio - l).norm() > 1e-10 {
                    return Err(Error::NotProportional);
                }
            }
        }
    }
    Ok(lambda.unwrap())
}

/// The theta vector f_{T,c}(x) = exp(pi i x^t T x + 2 pi i c^t x).
pub fn theta_vector(t: &ComplexStructure, c: &DVector<Complex64>) -> Result<GaussianVector> {
    if c.len() != t.n() {
        return Err(Error::DimensionMismatch { expected: t.n(), got: c.len() });
    }
    GaussianVector::new(t.matrix().clone(), c.clone(), Complex64::new(0.0, 0.0))
}

/// Max over directions and probe points of
/// |(d_alpha - 2 pi i (T x)_alpha - 2 pi i c_alpha) f|, with the derivative
/// taken symbolically. Zero exactly when f is a multiple of f_{T,c}.
pub fn holomorphic_residual(
    t: &ComplexStructure,
    c: &DVector<Complex64>,
    f: &GaussianVector,
) -> Result<f64> {
    if f.n != t.n() {
        return Err(Error::DimensionMismatch { expected: t.n(), got: f.n });
    }
    let n = f.n;
    let mut defect: f64 = 0.0;
    for p in probe_points(n) {
        let pc = p.map(|v| Complex64::new(v, 0.0));
        let fx = f.evaluate(&p);
        let grad_coeff = (&f.a * &pc + &f.b).map(|v| ci(2.0 * PI) * v);
        let tx = t.matrix() * &pc;
        for alpha in 0..n {
            let op = grad_coeff[alpha] - ci(2.0 * PI) * tx[alpha] - ci(2.0 * PI) * c[alpha];
            defect = defect.max((op * fx).norm());
        }
    }
    Ok(defect)
}

/// Finite-difference variant of [`holomorphic_residual`] with central
/// differences of step `eps`; used as an O(eps^2) cross-check.
pub fn holomorphic_residual_fd(
    t: &ComplexStructure,
    c: &DVector<Complex64>,
    f: &GaussianVector,
    eps: f64,
) -> Result<f64> {
    if f.n != t.n() {
        return Err(Error::DimensionMismatch { expected: t.n(), got: f.n });
    }
    let n = f.n;
    let mut defect: f64 = 0.0;
    for p in probe_points(n) {
        let pc = p.map(|v| Complex64::new(v, 0.0));
        let fx = f.evaluate(&p);
        let tx = t.matrix() * &pc;
        for alpha in 0..n {
            let mut plus = p.clone();
            let mut minus = p.clone();
            plus[alpha] += eps;
            minus[alpha] -= eps;
            let d = (f.evaluate(&plus) - f.evaluate(&minus)) / Complex64::new(2.0 * eps, 0.0);
            let op = d - (ci(2.0 * PI) * tx[alpha] + ci(2.0 * PI) * c[alpha]) * fx;
            defect = defect.max(op.norm());
        }
    }
    Ok(defect)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn base_gaussian() -> GaussianVector {
        theta_vector(&ComplexStructure::standard(1), &DVector::zeros(1)).unwrap()
    }

    #[test]
    fn evaluate_examples() {
        let f = base_gaussian();
        assert!((f.evaluate(&DVector::from_row_slice(&[0.0])) - c(1.0, 0.0)).norm() < 1e-15);
        let v = f.evaluate(&DVector::from_row_slice(&[1.0]));
        assert!((v - c((-PI).exp(), 0.0)).norm() < 1e-15);
        let g = GaussianVector::new(
            DMatrix::from_row_slice(1, 1, &[c(0.0, 1.0)]),
            DVector::zeros(1),
            c(2.0f64.ln(), 0.0),
        )
        .unwrap();
        assert!((g.evaluate(&DVector::from_row_slice(&[0.0])) - c(2.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn pi_act_identity_and_shifts() {
        let f = base_gaussian();
        let id = pi_act(&PhasePoint::zero(1), &f).unwrap();
        assert_eq!(id, f);

        // Pure momentum shift: b += y2, s unchanged.
        let y = PhasePoint::from_slices(&[0.0], &[0.7]);
        let g = pi_act(&y, &f).unwrap();
        assert!((g.linear()[0] - c(0.7, 0.0)).norm() < 1e-15);
        assert_eq!(g.log_prefactor(), f.log_prefactor());

        // Pure position shift: b += A y1, s += pi i y1^t A y1 + 2 pi i b^t y1.
        let y = PhasePoint::from_slices(&[0.5], &[0.0]);
        let g = pi_act(&y, &f).unwrap();
        assert!((g.linear()[0] - c(0.0, 0.5)).norm() < 1e-15);
        let expect_s = ci(PI) * c(0.0, 0.25);
        assert!((g.log_prefactor() - expect_s).norm() < 1e-15);
    }

    #[test]
    fn pi_act_matches_pointwise_definition() {
        let f = base_gaussian();
        let y = PhasePoint::from_slices(&[0.3], &[-0.8]);
        let g = pi_act(&y, &f).unwrap();
        for p in probe_points(1) {
            let shifted = DVector::from_row_slice(&[p[0] + 0.3]);
            let phase = (ci(2.0 * PI) * c(p[0] * (-0.8), 0.0) + ci(PI) * c(0.3 * (-0.8), 0.0)).exp();
            assert!((g.evaluate(&p) - phase * f.evaluate(&shifted)).norm() < 1e-12);
        }
    }

    #[test]
    fn commutation_defect_examples() {
        let f = base_gaussian();
        let x = PhasePoint::from_slices(&[1.0], &[0.0]);
        let y = PhasePoint::from_slices(&[0.0], &[1.0]);
        assert!(commutation_defect(&x, &x, &f).unwrap() < 1e-14);
        assert!(commutation_defect(&x, &y, &f).unwrap() < 1e-12);
    }

    #[test]
    fn connection_apply_derivative_and_multiplier() {
        let spec = ConnectionSpec::new(
            DVector::from_row_slice(&[1.0]),
            DMatrix::from_row_slice(1, 1, &[c(0.0, 1.0)]),
        );
        let f = base_gaussian();
        let d = connection_apply(1, &spec, &f).unwrap();
        // d/dx e^{pi i x^2 i} = 2 pi i (i x) e^{...}
        assert!((d.linear[0] - ci(2.0 * PI) * c(0.0, 1.0)).norm() < 1e-14);
        assert!(d.constant.norm() < 1e-15);
        let m = connection_apply(2, &spec, &f).unwrap();
        assert!((m.linear[0] - ci(-2.0 * PI)).norm() < 1e-14);
        assert!(matches!(connection_apply(3, &spec, &f), Err(Error::IndexOutOfRange(3))));
    }

    #[test]
    fn connection_apply_is_linear_pointwise() {
        let spec = ConnectionSpec::new(
            DVector::from_row_slice(&[1.0]),
            DMatrix::from_row_slice(1, 1, &[c(0.0, 1.0)]),
        );
        let f = base_gaussian();
        let g = theta_vector(
            &ComplexStructure::from_rows(1, &[c(0.5, 2.0)]).unwrap(),
            &DVector::from_row_slice(&[c(0.1, 0.2)]),
        )
        .unwrap();
        // The images of f and g sum to the image of the formal sum f + g:
        // for j = 1 compare against a central difference of f + g, for
        // j = 2 against the multiplication operator applied to f + g.
        let df = connection_apply(1, &spec, &f).unwrap();
        let dg = connection_apply(1, &spec, &g).unwrap();
        let eps = 1e-5;
        for p in probe_points(1) {
            let plus = DVector::from_row_slice(&[p[0] + eps]);
            let minus = DVector::from_row_slice(&[p[0] - eps]);
            let fd = (f.evaluate(&plus) + g.evaluate(&plus) - f.evaluate(&minus) - g.evaluate(&minus))
                / c(2.0 * eps, 0.0);
            assert!((df.evaluate(&p) + dg.evaluate(&p) - fd).norm() < 1e-6);
        }
        let mf = connection_apply(2, &spec, &f).unwrap();
        let mg = connection_apply(2, &spec, &g).unwrap();
        for p in probe_points(1) {
            let expect = ci(-2.0 * PI) * c(p[0], 0.0) * (f.evaluate(&p) + g.evaluate(&p));
            assert!((mf.evaluate(&p) + mg.evaluate(&p) - expect).norm() < 1e-12);
        }
    }

    #[test]
    fn curvature_is_minus_two_pi_i_sigma() {
        let spec = ConnectionSpec::new(
            DVector::from_row_slice(&[1.0]),
            DMatrix::from_row_slice(1, 1, &[c(0.0, 1.0)]),
        );
        let f = base_gaussian();
        let lam = curvature_scalar(1, &spec, &f).unwrap();
        assert!((lam - ci(-2.0 * PI)).norm() < 1e-10);
        assert!((lam.norm() - 2.0 * PI * spec.sigma[0].abs()).abs() < 1e-10);
    }

    #[test]
    fn curvature_is_f_independent() {
        let spec = ConnectionSpec::new(
            DVector::from_row_slice(&[0.7]),
            DMatrix::from_row_slice(1, 1, &[c(0.2, 1.3)]),
        );
        let mut lams = Vec::new();
        for k in 0..10 {
            let t = ComplexStructure::from_rows(1, &[c(0.1 * k as f64, 1.0 + 0.2 * k as f64)]).unwrap();
            let b = DVector::from_row_slice(&[c(0.05 * k as f64, -0.03 * k as f64)]);
            let f = theta_vector(&t, &b).unwrap();
            lams.push(curvature_scalar(1, &spec, &f).unwrap());
        }
        for l in &lams {
            assert!((l - lams[0]).norm() < 1e-12);
        }
    }

    #[test]
    fn build_t_examples() {
        let s1 = ConnectionSpec::new(
            DVector::from_row_slice(&[1.0]),
            DMatrix::from_row_slice(1, 1, &[c(0.0, 1.0)]),
        );
        let t1 = build_t(&s1).unwrap();
        assert!((t1.matrix()[(0, 0)] - c(0.0, 1.0)).norm() < 1e-15);

        let s2 = ConnectionSpec::new(
            DVector::from_row_slice(&[1.0, 2.0]),
            DMatrix::from_diagonal_element(2, 2, c(0.0, 1.0)),
        );
        let t2 = build_t(&s2).unwrap();
        assert!((t2.matrix()[(1, 1)] - c(0.0, 2.0)).norm() < 1e-15);

        let s3 = ConnectionSpec::new(
            DVector::from_row_slice(&[1.0, 2.0]),
            DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, 1.0), c(0.0, 1.0), c(0.0, 0.0)]),
        );
        assert!(matches!(build_t(&s3), Err(Error::NotSymmetric(_))));
    }

    #[test]
    fn theta_vector_is_holomorphic() {
        let t = ComplexStructure::standard(1);
        let cc = DVector::from_row_slice(&[c(0.0, 0.5)]);
        let f = theta_vector(&t, &cc).unwrap();
        assert!(holomorphic_residual(&t, &cc, &f).unwrap() < 1e-12);
        // e^{-pi x^2 - pi x}: check a value.
        let v = f.evaluate(&DVector::from_row_slice(&[1.0]));
        assert!((v - c((-2.0 * PI).exp(), 0.0)).norm() < 1e-15);
    }

    #[test]
    fn wrong_modulus_is_detected() {
        let t = ComplexStructure::standard(1);
        let zero = DVector::zeros(1);
        let wrong = theta_vector(&ComplexStructure::from_rows(1, &[c(0.0, 2.0)]).unwrap(), &zero).unwrap();
        assert!(holomorphic_residual(&t, &zero, &wrong).unwrap() > 0.1);
    }

    #[test]
    fn fd_residual_is_second_order() {
        let t = ComplexStructure::standard(1);
        let zero = DVector::zeros(1);
        let f = theta_vector(&t, &zero).unwrap();
        let r1 = holomorphic_residual_fd(&t, &zero, &f, 1e-3).unwrap();
        let r2 = holomorphic_residual_fd(&t, &zero, &f, 5e-4).unwrap();
        let ratio = r1 / r2;
        assert!((3.6..=4.4).contains(&ratio), "ratio {ratio}");
    }
}
