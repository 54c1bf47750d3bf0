//! Classical theta series, Gaussian seed functions, the Fourier-like
//! transform f-tilde, and the kq (Zak) representation.
//!
//! All series are truncated lattice sums over the L-infinity ball of a
//! [`TruncationPolicy`]; the reported tail bound sums the absolute terms
//! over the next two shells, which is conservative for Gaussian decay.

use nalgebra::DVector;
use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::exec;
use crate::heisenberg::GaussianVector;
use crate::lattice::ComplexStructure;

/// Truncation for lattice sums: terms with |k|_inf <= radius are kept.
#[derive(Debug, Clone, Copy)]
pub struct TruncationPolicy {
    pub radius: i64,
}

impl TruncationPolicy {
    pub fn new(radius: i64) -> Self {
        assert!(radius >= 1, "radius must be >= 1");
        Self { radius }
    }

    /// Defaults from the decay of exp(-pi k^2): 12 for n = 1, 8 otherwise.
    pub fn default_for(n: usize) -> Self {
        Self::new(if n == 1 { 12 } else { 8 })
    }
}

/// A truncated series value together with an a-posteriori tail estimate.
#[derive(Debug, Clone, Copy)]
pub struct ThetaValue {
    pub value: Complex64,
    pub tail_bound: f64,
}

fn theta_term(k: &[i64], t: &ComplexStructure, z: &DVector<Complex64>) -> Complex64 {
    let n = t.n();
    let kc = DVector::from_iterator(n, k.iter().map(|&v| Complex64::new(v as f64, 0.0)));
    let quad = (kc.transpose() * t.matrix() * &kc)[(0, 0)];
    let lin = kc.dot(z);
    (Complex64::new(0.0, PI) * (quad + 2.0 * lin)).exp()
}

/// Theta series sum over |k|_inf <= radius of exp(pi i (k^t T k + 2 k^t z)).
pub fn theta(z: &DVector<Complex64>, t: &ComplexStructure, trunc: &TruncationPolicy) -> Result<ThetaValue> {
    let n = t.n();
    if z.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: z.len() });
    }
    let points = exec::ball(n, trunc.radius);
    let terms = exec::map_collect(&points, |k| theta_term(k, t, z));
    let value = terms.iter().sum();
    let tail: f64 = exec::shell(n, trunc.radius, trunc.radius + 2)
        .iter()
        .map(|k| theta_term(k, t, z).norm())
        .sum();
    Ok(ThetaValue { value, tail_bound: tail })
}

/// Pointwise Gaussian f_{T,c}(x) = exp(pi i (x^t T x + 2 c^t x)).
pub fn gaussian(t: &ComplexStructure, c: &DVector<Complex64>, x: &DVector<f64>) -> Result<Complex64> {
    let n = t.n();
    if c.len() != n || x.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: c.len().max(x.len()) });
    }
    let xc = x.map(|v| Complex64::new(v, 0.0));
    let quad = (xc.transpose() * t.matrix() * &xc)[(0, 0)];
    let lin = c.dot(&xc);
    Ok((Complex64::new(0.0, PI) * (quad + 2.0 * lin)).exp())
}

/// Truncated transform sum over k of exp(-2 pi i rho^t k) f_{T,c}(sigma + k).
pub fn ftilde(
    t: &ComplexStructure,
    c: &DVector<Complex64>,
    rho: &DVector<f64>,
    sigma: &DVector<f64>,
    trunc: &TruncationPolicy,
) -> Result<Complex64> {
    let n = t.n();
    if rho.len() != n || sigma.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: rho.len().max(sigma.len()) });
    }
    let points = exec::ball(n, trunc.radius);
    let terms = exec::map_collect(&points, |k| {
        let shift = DVector::from_iterator(n, (0..n).map(|i| sigma[i] + k[i] as f64));
        let phase: f64 = (0..n).map(|i| rho[i] * k[i] as f64).sum();
        (Complex64::new(0.0, -2.0 * PI * phase)).exp() * gaussian(t, c, &shift).unwrap()
    });
    Ok(terms.iter().sum())
}

/// kq (Zak) transform C(k, q) = (a/2pi)^{1/2} sum_l exp(i k a l) psi(q - l a).
/// One-dimensional by construction.
pub fn kq_transform(
    psi: &GaussianVector,
    a: f64,
    k: f64,
    q: f64,
    trunc: &TruncationPolicy,
) -> Result<Complex64> {
    if psi.n() != 1 {
        return Err(Error::NotOneDimensional);
    }
    assert!(a > 0.0, "lattice constant must be positive");
    let mut sum = Complex64::new(0.0, 0.0);
    for l in -trunc.radius..=trunc.radius {
        let arg = DVector::from_row_slice(&[q - l as f64 * a]);
        sum += (Complex64::new(0.0, k * a * l as f64)).exp() * psi.evaluate(&arg);
    }
    Ok(Complex64::new((a / (2.0 * PI)).sqrt(), 0.0) * sum)
}
