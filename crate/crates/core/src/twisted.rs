//! The twisted group algebra S(D): delta generators, cocycle
//! multiplication, the algebra-valued inner products in closed form, the
//! module action, and an independent quadrature oracle for the Gaussian
//! integrals behind the inner products.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use std::collections::BTreeMap;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::exec;
use crate::heisenberg::{pi_act, pi_act_adjoint, probe_points, GaussianVector};
use crate::lattice::{cocycle_alpha, Lattice, LatticePoint};

/// Coefficients below this magnitude are dropped from finite supports.
const UNDERFLOW: f64 = 1e-300;

fn czero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// Finitely supported element of the twisted group algebra S(D).
/// Keys are integer lattice coordinates; iteration order is the crate-wide
/// lexicographic enumeration order.
#[derive(Debug, Clone)]
pub struct TwistedElement {
    lattice: Lattice,
    coeffs: BTreeMap<Vec<i64>, Complex64>,
}

impl TwistedElement {
    pub fn zero(lattice: Lattice) -> Self {
        Self { lattice, coeffs: BTreeMap::new() }
    }

    pub fn from_coeffs(lattice: Lattice, coeffs: BTreeMap<Vec<i64>, Complex64>) -> Self {
        let coeffs = coeffs.into_iter().filter(|(_, v)| v.norm() >= UNDERFLOW).collect();
        Self { lattice, coeffs }
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn coefficient(&self, coords: &[i64]) -> Complex64 {
        self.coeffs.get(coords).copied().unwrap_or_else(czero)
    }

    pub fn support(&self) -> impl Iterator<Item = (&Vec<i64>, &Complex64)> {
        self.coeffs.iter()
    }

    pub fn support_len(&self) -> usize {
        self.coeffs.len()
    }

    /// Largest |coordinate| over the support.
    pub fn support_radius(&self) -> i64 {
        self.coeffs
            .keys()
            .flat_map(|c| c.iter().map(|v| v.abs()))
            .max()
            .unwrap_or(0)
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        let coeffs = self.coeffs.iter().map(|(k, v)| (k.clone(), v * factor)).collect();
        Self::from_coeffs(self.lattice.clone(), coeffs)
    }

    pub fn add(&self, other: &TwistedElement) -> Result<Self> {
        if self.lattice != other.lattice {
            return Err(Error::LatticeMismatch);
        }
        let mut coeffs = self.coeffs.clone();
        for (k, v) in &other.coeffs {
            *coeffs.entry(k.clone()).or_insert_with(czero) += v;
        }
        Ok(Self::from_coeffs(self.lattice.clone(), coeffs))
    }

    /// Max coefficient difference over the union of supports, optionally
    /// restricted to coordinates within `ball` (L-infinity).
    pub fn max_defect(&self, other: &TwistedElement, ball: Option<i64>) -> f64 {
        let keys: std::collections::BTreeSet<_> =
            self.coeffs.keys().chain(other.coeffs.keys()).cloned().collect();
        keys.iter()
            .filter(|k| ball.is_none_or(|r| k.iter().all(|v| v.abs() <= r)))
            .map(|k| (self.coefficient(k) - other.coefficient(k)).norm())
            .fold(0.0, f64::max)
    }
}

/// Full-lattice-support element given by a closed-form log-coefficient;
/// materializes into a [`TwistedElement`] at any truncation radius.
/// Functional-equation checks compare the log-coefficients directly, so
/// underflow of exp never loses information.
#[derive(Clone)]
pub struct AnalyticElement {
    lattice: Lattice,
    log_fn: std::sync::Arc<dyn Fn(&LatticePoint) -> Complex64 + Send + Sync>,
}

impl AnalyticElement {
    pub fn new(
        lattice: Lattice,
        log_fn: std::sync::Arc<dyn Fn(&LatticePoint) -> Complex64 + Send + Sync>,
    ) -> Self {
        Self { lattice, log_fn }
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn log_coefficient(&self, point: &LatticePoint) -> Complex64 {
        (self.log_fn)(point)
    }

    pub fn coefficient(&self, point: &LatticePoint) -> Complex64 {
        self.log_coefficient(point).exp()
    }

    /// Truncate to the coordinate ball of the given radius.
    pub fn materialize(&self, radius: i64) -> TwistedElement {
        let points = self.lattice.ball(radius);
        let values = exec::map_collect(&points, |p| self.coefficient(p));
        let mut coeffs = BTreeMap::new();
        for (p, v) in points.iter().zip(values) {
            coeffs.insert(p.coords.clone(), v);
        }
        TwistedElement::from_coeffs(self.lattice.clone(), coeffs)
    }
}

impl std::fmt::Debug for AnalyticElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("AnalyticElement").field("lattice", &self.lattice).finish()
    }
}

/// The generator e_{D,alpha}(w): a single delta coefficient at w.
pub fn delta(w: &LatticePoint, d: &Lattice) -> Result<TwistedElement> {
    if w.coords.len() != 2 * d.n() {
        return Err(Error::PointNotInLattice);
    }
    let mut coeffs = BTreeMap::new();
    coeffs.insert(w.coords.clone(), Complex64::new(1.0, 0.0));
    Ok(TwistedElement::from_coeffs(d.clone(), coeffs))
}

/// Twisted convolution extending e(w1) e(w2) = alpha(w1, w2) e(w1 + w2).
pub fn multiply(phi: &TwistedElement, psi: &TwistedElement) -> Result<TwistedElement> {
    if phi.lattice != psi.lattice {
        return Err(Error::LatticeMismatch);
    }
    let d = &phi.lattice;
    let mut coeffs: BTreeMap<Vec<i64>, Complex64> = BTreeMap::new();
    for (k1, v1) in &phi.coeffs {
        let w1 = d.point(k1.clone());
        for (k2, v2) in &psi.coeffs {
            let w2 = d.point(k2.clone());
            let alpha = cocycle_alpha(&w1.embedded, &w2.embedded)?;
            let sum: Vec<i64> = k1.iter().zip(k2.iter()).map(|(a, b)| a + b).collect();
            *coeffs.entry(sum).or_insert_with(czero) += v1 * v2 * alpha;
        }
    }
    Ok(TwistedElement::from_coeffs(d.clone(), coeffs))
}

/// Closed-form scalar product <f, g> = int f(x) conj(g(x)) dx.
///
/// The integrand is exp(-pi x^t M x + 2 pi v^t x + s0) with
/// M = -i (A_f - conj(A_g)), v = i (b_f - conj(b_g)), s0 = s_f + conj(s_g);
/// the integral is det(M)^{-1/2} exp(pi v^t M^{-1} v + s0), with the
/// determinant root taken as the per-eigenvalue principal branch (Re M is
/// positive definite, so the eigenvalues avoid the negative real axis).
pub fn gaussian_pairing(f: &GaussianVector, g: &GaussianVector) -> Result<Complex64> {
    if f.n() != g.n() {
        return Err(Error::DimensionMismatch { expected: f.n(), got: g.n() });
    }
    let (m, v, s0) = combined_form(f, g);
    check_integrable(&m)?;
    let det_root = det_inverse_sqrt(&m)?;
    let minv = m.clone().try_inverse().ok_or(Error::NotIntegrable)?;
    let quad = (v.transpose() * minv * &v)[(0, 0)];
    Ok(det_root * (Complex64::new(PI, 0.0) * quad + s0).exp())
}

fn combined_form(
    f: &GaussianVector,
    g: &GaussianVector,
) -> (DMatrix<Complex64>, DVector<Complex64>, Complex64) {
    let i = Complex64::new(0.0, 1.0);
    let m = (f.quadratic() - g.quadratic().map(|z| z.conj())).map(|z| -i * z);
    let v = (f.linear() - g.linear().map(|z| z.conj())).map(|z| i * z);
    let s0 = f.log_prefactor() + g.log_prefactor().conj();
    (m, v, s0)
}

fn check_integrable(m: &DMatrix<Complex64>) -> Result<()> {
    let re = m.map(|z| z.re);
    let sym = (&re + re.transpose()) * 0.5;
    let eig = sym.symmetric_eigen().eigenvalues;
    if eig.iter().any(|&e| e <= 1e-12) {
        return Err(Error::NotIntegrable);
    }
    Ok(())
}

/// det(M)^{-1/2} as the product of principal-branch lambda^{-1/2} over the
/// eigenvalues of M.
fn det_inverse_sqrt(m: &DMatrix<Complex64>) -> Result<Complex64> {
    let eigs = m
        .clone()
        .schur()
        .eigenvalues()
        .ok_or(Error::NotIntegrable)?;
    let mut out = Complex64::new(1.0, 0.0);
    for lam in eigs.iter() {
        out /= lam.sqrt();
    }
    Ok(out)
}

/// Brute-force tensor-product Simpson approximation of the same integral
/// over [-box, box]^n; the independent oracle for [`gaussian_pairing`].
pub fn quadrature_pairing(
    f: &GaussianVector,
    g: &GaussianVector,
    box_halfwidth: f64,
    points_per_dim: usize,
) -> Result<Complex64> {
    if f.n() != g.n() {
        return Err(Error::DimensionMismatch { expected: f.n(), got: g.n() });
    }
    let (m, _, _) = combined_form(f, g);
    check_integrable(&m)?;
    let n = f.n();
    let intervals = if points_per_dim.is_multiple_of(2) { points_per_dim } else { points_per_dim + 1 };
    let h = 2.0 * box_halfwidth / intervals as f64;
    let weight = |i: usize| -> f64 {
        if i == 0 || i == intervals {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        }
    };
    let mut idx = vec![0usize; n];
    let mut sum = czero();
    loop {
        let x = DVector::from_iterator(n, idx.iter().map(|&i| -box_halfwidth + i as f64 * h));
        let w: f64 = idx.iter().map(|&i| weight(i)).product();
        sum += Complex64::new(w, 0.0) * f.evaluate(&x) * g.evaluate(&x).conj();
        let mut d = n;
        loop {
            if d == 0 {
                return Ok(sum * Complex64::new((h / 3.0).powi(n as i32), 0.0));
            }
            d -= 1;
            if idx[d] < intervals {
                idx[d] += 1;
                for v in idx.iter_mut().skip(d + 1) {
                    *v = 0;
                }
                break;
            }
        }
    }
}

/// S(D)-valued inner product: coefficient at w is <f, pi_w g>, over the
/// coordinate ball of the given radius.
pub fn inner_product_d(
    f: &GaussianVector,
    g: &GaussianVector,
    d: &Lattice,
    radius: i64,
) -> Result<TwistedElement> {
    let points = d.ball(radius);
    let values = exec::map_collect(&points, |w| {
        pi_act(&w.embedded, g).and_then(|pg| gaussian_pairing(f, &pg))
    });
    let mut coeffs = BTreeMap::new();
    for (w, v) in points.iter().zip(values) {
        coeffs.insert(w.coords.clone(), v?);
    }
    Ok(TwistedElement::from_coeffs(d.clone(), coeffs))
}

/// S(D^perp)-valued inner product: coefficient at z is <pi_z g, f>.
pub fn inner_product_dperp(
    f: &GaussianVector,
    g: &GaussianVector,
    dperp: &Lattice,
    radius: i64,
) -> Result<TwistedElement> {
    let points = dperp.ball(radius);
    let values = exec::map_collect(&points, |z| {
        pi_act(&z.embedded, g).and_then(|zg| gaussian_pairing(&zg, f))
    });
    let mut coeffs = BTreeMap::new();
    for (z, v) in points.iter().zip(values) {
        coeffs.insert(z.coords.clone(), v?);
    }
    Ok(TwistedElement::from_coeffs(dperp.clone(), coeffs))
}

/// Formal sum of scaled Gaussians; the image of the module action.
#[derive(Debug, Clone)]
pub struct GaussianSum(pub Vec<(Complex64, GaussianVector)>);

impl GaussianSum {
    pub fn evaluate(&self, x: &DVector<f64>) -> Complex64 {
        self.0.iter().map(|(c, g)| c * g.evaluate(x)).sum()
    }
}

/// Module action pi(Phi) f = sum_w Phi(w) pi_w f as a formal sum.
pub fn module_action(phi: &TwistedElement, f: &GaussianVector) -> Result<GaussianSum> {
    let mut terms = Vec::with_capacity(phi.support_len());
    for (k, v) in phi.support() {
        let w = phi.lattice.point(k.clone());
        terms.push((*v, pi_act(&w.embedded, f)?));
    }
    Ok(GaussianSum(terms))
}

/// Defect of the compatibility relation <Phi f, g>_D = Phi * <f, g>_D,
/// compared coefficientwise on the ball where both sides are fully summed.
pub fn compatibility_defect(
    phi: &TwistedElement,
    f: &GaussianVector,
    g: &GaussianVector,
    d: &Lattice,
    radius: i64,
) -> Result<f64> {
    let rhs = multiply(phi, &inner_product_d(f, g, d, radius)?)?;
    // LHS: coefficient at u of sum_v phi(v) <pi_v f, pi_u g>.
    let points = d.ball(radius);
    let terms: Vec<(Complex64, GaussianVector)> = phi
        .support()
        .map(|(k, v)| Ok((*v, pi_act(&d.point(k.clone()).embedded, f)?)))
        .collect::<Result<_>>()?;
    let values = exec::map_collect(&points, |u| -> Result<Complex64> {
        let pg = pi_act(&u.embedded, g)?;
        let mut acc = czero();
        for (v, pf) in &terms {
            acc += v * gaussian_pairing(pf, &pg)?;
        }
        Ok(acc)
    });
    let mut coeffs = BTreeMap::new();
    for (u, v) in points.iter().zip(values) {
        coeffs.insert(u.coords.clone(), v?);
    }
    let lhs = TwistedElement::from_coeffs(d.clone(), coeffs);
    let safe = radius - phi.support_radius();
    Ok(lhs.max_defect(&rhs, Some(safe)))
}

/// Defect of the associativity relation <f, g>_D h = f <g, h>_{D^perp},
/// evaluated at the probe points with both sides truncated at `radius`.
pub fn associativity_defect(
    f: &GaussianVector,
    g: &GaussianVector,
    h: &GaussianVector,
    d: &Lattice,
    radius: i64,
) -> Result<f64> {
    let dperp = crate::lattice::dual_lattice(d)?;
    let lhs = module_action(&inner_product_d(f, g, d, radius)?, h)?;
    // Right action f Omega = sum_z (pi_z^* f) Omega(z) with
    // Omega = <g, h>_{D^perp}, Omega(z) = <pi_z h, g>.
    let omega = inner_product_dperp(g, h, &dperp, radius)?;
    let mut rhs_terms = Vec::with_capacity(omega.support_len());
    for (k, v) in omega.support() {
        let z = dperp.point(k.clone());
        rhs_terms.push((*v, pi_act_adjoint(&z.embedded, f)?));
    }
    let rhs = GaussianSum(rhs_terms);
    let mut defect: f64 = 0.0;
    for p in probe_points(f.n()) {
        defect = defect.max((lhs.evaluate(&p) - rhs.evaluate(&p)).norm());
    }
    Ok(defect)
}
