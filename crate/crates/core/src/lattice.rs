//! Phase-space geometry: complex structures, lattices, the symplectic
//! pairing and cocycle, complexification and the Hermitian pairing H.
//!
//! Phase space is R^n x R^n with points x = (x1, x2). A complex structure
//! is a symmetric complex n x n matrix T with positive-definite imaginary
//! part; it complexifies a phase point to Tx1 + x2. The Hermitian pairing
//! H(g, h) = (Tg1 + g2)^t (Im T)^{-1} (conj(T)h1 + h2) ties the cocycle of
//! the Heisenberg representation to the coefficients of quantum theta
//! functions.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::exec;

/// Relative eigenvalue floor for positive definiteness of Im T.
const POSDEF_RTOL: f64 = 1e-9;
const SYM_TOL: f64 = 1e-12;

/// Validated symmetric complex n x n matrix with positive-definite
/// imaginary part (the modulus of the torus).
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexStructure {
    n: usize,
    t: DMatrix<Complex64>,
}

impl ComplexStructure {
    /// Validate a raw square matrix as a complex structure.
    pub fn new(t_raw: DMatrix<Complex64>) -> Result<Self> {
        let n = t_raw.nrows();
        assert_eq!(t_raw.ncols(), n, "T must be square");
        let mut asym: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                asym = asym.max((t_raw[(i, j)] - t_raw[(j, i)]).norm());
            }
        }
        if asym > SYM_TOL {
            return Err(Error::NotSymmetric(asym));
        }
        let im = t_raw.map(|z| z.im);
        let eig = im.symmetric_eigen().eigenvalues;
        let max = eig.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min = eig.iter().cloned().fold(f64::INFINITY, f64::min);
        if max.is_nan() || max <= 0.0 || min <= POSDEF_RTOL * max {
            return Err(Error::ImNotPositiveDefinite);
        }
        Ok(Self { n, t: t_raw })
    }

    /// Convenience constructor from row-major complex entries.
    pub fn from_rows(n: usize, rows: &[Complex64]) -> Result<Self> {
        Self::new(DMatrix::from_row_slice(n, n, rows))
    }

    /// `T = i * I_n`, the standard modulus.
    pub fn standard(n: usize) -> Self {
        Self::new(DMatrix::from_diagonal_element(n, n, Complex64::new(0.0, 1.0))).unwrap()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.t
    }

    /// Im T as a real matrix.
    pub fn im(&self) -> DMatrix<f64> {
        self.t.map(|z| z.im)
    }

    /// (Im T)^{-1}; exists by validation.
    pub fn im_inverse(&self) -> DMatrix<f64> {
        self.im().try_inverse().expect("Im T validated positive definite")
    }

    /// det(Im T).
    pub fn im_det(&self) -> f64 {
        self.im().determinant()
    }
}

/// A point of phase space R^n x R^n.
#[derive(Debug, Clone, PartialEq)]
pub struct PhasePoint {
    pub x1: DVector<f64>,
    pub x2: DVector<f64>,
}

impl PhasePoint {
    pub fn new(x1: DVector<f64>, x2: DVector<f64>) -> Self {
        assert_eq!(x1.len(), x2.len(), "halves must have equal dimension");
        assert!(
            x1.iter().chain(x2.iter()).all(|v| v.is_finite()),
            "phase point entries must be finite"
        );
        Self { x1, x2 }
    }

    pub fn from_slices(x1: &[f64], x2: &[f64]) -> Self {
        Self::new(DVector::from_row_slice(x1), DVector::from_row_slice(x2))
    }

    pub fn zero(n: usize) -> Self {
        Self::new(DVector::zeros(n), DVector::zeros(n))
    }

    pub fn n(&self) -> usize {
        self.x1.len()
    }

    pub fn add(&self, other: &PhasePoint) -> PhasePoint {
        PhasePoint::new(&self.x1 + &other.x1, &self.x2 + &other.x2)
    }

    pub fn neg(&self) -> PhasePoint {
        PhasePoint::new(-&self.x1, -&self.x2)
    }
}

fn check_dims(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch { expected: a, got: b });
    }
    Ok(())
}

/// Symplectic pairing x1^t y2 - y1^t x2.
pub fn symplectic_pairing(x: &PhasePoint, y: &PhasePoint) -> Result<f64> {
    check_dims(x.n(), y.n())?;
    Ok(x.x1.dot(&y.x2) - y.x1.dot(&x.x2))
}

/// Cocycle alpha(x, y) = exp(pi i (x1^t y2 - y1^t x2)); unit modulus.
pub fn cocycle_alpha(x: &PhasePoint, y: &PhasePoint) -> Result<Complex64> {
    let s = symplectic_pairing(x, y)?;
    Ok((Complex64::new(0.0, PI * s)).exp())
}

/// Complexification Tx1 + x2.
pub fn complexify(x: &PhasePoint, t: &ComplexStructure) -> Result<DVector<Complex64>> {
    check_dims(t.n(), x.n())?;
    let x1c = x.x1.map(|v| Complex64::new(v, 0.0));
    let x2c = x.x2.map(|v| Complex64::new(v, 0.0));
    Ok(t.matrix() * x1c + x2c)
}

/// The conjugate embedding conj(T)h1 + h2.
pub fn complexify_conj(x: &PhasePoint, t: &ComplexStructure) -> Result<DVector<Complex64>> {
    check_dims(t.n(), x.n())?;
    let x1c = x.x1.map(|v| Complex64::new(v, 0.0));
    let x2c = x.x2.map(|v| Complex64::new(v, 0.0));
    Ok(t.matrix().map(|z| z.conj()) * x1c + x2c)
}

/// Hermitian pairing H(g, h) = (Tg1+g2)^t (Im T)^{-1} (conj(T)h1+h2).
///
/// Biadditive in each slot; for real phase points its imaginary part is
/// the symplectic pairing, so alpha(g, h) = exp(pi i Im H(g, h)).
pub fn hermitian_h(g: &PhasePoint, h: &PhasePoint, t: &ComplexStructure) -> Result<Complex64> {
    check_dims(g.n(), h.n())?;
    let gu = complexify(g, t)?;
    let hs = complexify_conj(h, t)?;
    let s = t.im_inverse().map(|v| Complex64::new(v, 0.0));
    Ok((gu.transpose() * s * hs)[(0, 0)])
}

/// Discrete subgroup D = B Z^{2n} of phase space, given by an invertible
/// 2n x 2n real basis matrix whose columns are the generators.
#[derive(Debug, Clone, PartialEq)]
pub struct Lattice {
    n: usize,
    basis: DMatrix<f64>,
}

impl Lattice {
    pub fn new(n: usize, basis: DMatrix<f64>) -> Result<Self> {
        assert!(n >= 1);
        assert_eq!(basis.nrows(), 2 * n, "basis must be 2n x 2n");
        assert_eq!(basis.ncols(), 2 * n, "basis must be 2n x 2n");
        let det = basis.determinant();
        if det.abs() <= 1e-12 {
            return Err(Error::SingularBasis(det.abs()));
        }
        Ok(Self { n, basis })
    }

    /// The default lattice Z^n x Z^n.
    pub fn standard(n: usize) -> Self {
        Self::new(n, DMatrix::identity(2 * n, 2 * n)).unwrap()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    /// Embed integer coordinates into phase space.
    pub fn point(&self, coords: Vec<i64>) -> LatticePoint {
        assert_eq!(coords.len(), 2 * self.n, "coordinate length must be 2n");
        let v = DVector::from_iterator(2 * self.n, coords.iter().map(|&c| c as f64));
        let e = &self.basis * v;
        let x1 = DVector::from_iterator(self.n, (0..self.n).map(|i| e[i]));
        let x2 = DVector::from_iterator(self.n, (0..self.n).map(|i| e[self.n + i]));
        LatticePoint {
            coords,
            embedded: PhasePoint::new(x1, x2),
        }
    }

    /// Lattice points with coordinates in the L-infinity ball of the given
    /// radius, in the crate-wide lexicographic enumeration order.
    pub fn ball(&self, radius: i64) -> Vec<LatticePoint> {
        exec::ball(2 * self.n, radius)
            .into_iter()
            .map(|c| self.point(c))
            .collect()
    }
}

/// A lattice point: integer coordinates plus the embedded phase point.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticePoint {
    pub coords: Vec<i64>,
    pub embedded: PhasePoint,
}

impl LatticePoint {
    pub fn linf(&self) -> i64 {
        self.coords.iter().map(|c| c.abs()).max().unwrap_or(0)
    }
}

/// Best rational approximation p/q with q <= `max_den`, by continued
/// fractions. Returns None when no approximation lands within `tol`.
fn rationalize(x: f64, max_den: i64, tol: f64) -> Option<(i64, i64)> {
    let (mut p0, mut q0, mut p1, mut q1) = (1i64, 0i64, x.round() as i64, 1i64);
    let mut frac = x - x.round();
    for _ in 0..64 {
        if ((p1 as f64) / (q1 as f64) - x).abs() <= tol {
            return Some((p1, q1));
        }
        if frac.abs() < 1e-15 {
            break;
        }
        let r = 1.0 / frac;
        let a = r.round();
        frac = r - a;
        let p2 = a as i64 * p1 + p0;
        let q2 = a as i64 * q1 + q0;
        if q2.abs() > max_den || q2 == 0 {
            break;
        }
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
    }
    if ((p1 as f64) / (q1 as f64) - x).abs() <= tol {
        Some((p1, q1))
    } else {
        None
    }
}

/// Commutant lattice D^perp: the z with w1^t z2 - z1^t w2 integral for all
/// w in D. Computed as (B^t J)^{-1} from the rationalized basis; requires
/// a rational basis, otherwise the commutant is not a full-rank lattice.
pub fn dual_lattice(d: &Lattice) -> Result<Lattice> {
    let n = d.n();
    let dim = 2 * n;
    // Rationalize the basis entries first; refuse irrational input.
    let mut b = DMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            let x = d.basis()[(i, j)];
            // A float that actually encodes p/q with q <= 1e6 sits within a
            // few ulps of it; an irrational's best convergent at that
            // denominator is ~1e-12 away. Demand ulp-scale agreement so that
            // e.g. sqrt(2) is refused rather than silently rationalized.
            let tol = (1e-9_f64).min(32.0 * f64::EPSILON * x.abs().max(1.0));
            match rationalize(x, 1_000_000, tol) {
                Some((p, q)) => b[(i, j)] = p as f64 / q as f64,
                None => return Err(Error::IrrationalBasis(x)),
            }
        }
    }
    // J = [[0, I], [-I, 0]]: w^t J z = w1^t z2 - w2^t z1.
    let mut j = DMatrix::zeros(dim, dim);
    for i in 0..n {
        j[(i, n + i)] = 1.0;
        j[(n + i, i)] = -1.0;
    }
    let btj = b.transpose() * j;
    let dual_basis = btj.try_inverse().ok_or(Error::SingularBasis(0.0))?;
    let dual = Lattice::new(n, dual_basis)?;
    // Defining condition, as a post-check against rounding.
    for i in 0..dim {
        for k in 0..dim {
            let w = d.point(unit_coords(dim, i)).embedded;
            let z = dual.point(unit_coords(dim, k)).embedded;
            let s = symplectic_pairing(&w, &z)?;
            if (s - s.round()).abs() > 1e-9 {
                return Err(Error::IrrationalBasis(s));
            }
        }
    }
    Ok(dual)
}

fn unit_coords(dim: usize, i: usize) -> Vec<i64> {
    let mut c = vec![0i64; dim];
    c[i] = 1;
    c
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn validate_standard_modulus() {
        let t = ComplexStructure::from_rows(1, &[c(0.0, 1.0)]).unwrap();
        assert_eq!(t.n(), 1);
    }

    #[test]
    fn validate_rejects_negative_definite() {
        let e = ComplexStructure::from_rows(1, &[c(0.0, -1.0)]);
        assert!(matches!(e, Err(Error::ImNotPositiveDefinite)));
    }

    #[test]
    fn validate_rejects_asymmetric() {
        let e = ComplexStructure::from_rows(2, &[c(0.0, 1.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 1.0)]);
        assert!(matches!(e, Err(Error::NotSymmetric(_))));
    }

    #[test]
    fn symplectic_pairing_values() {
        let x = PhasePoint::from_slices(&[1.0], &[0.0]);
        let y = PhasePoint::from_slices(&[0.0], &[1.0]);
        assert_eq!(symplectic_pairing(&x, &y).unwrap(), 1.0);
        assert_eq!(symplectic_pairing(&x, &x).unwrap(), 0.0);
        let a = PhasePoint::from_slices(&[2.0], &[1.0]);
        let b = PhasePoint::from_slices(&[1.0], &[3.0]);
        assert_eq!(symplectic_pairing(&a, &b).unwrap(), 5.0);
    }

    #[test]
    fn cocycle_values() {
        let x = PhasePoint::from_slices(&[1.0], &[0.0]);
        let y = PhasePoint::from_slices(&[0.0], &[1.0]);
        let a = cocycle_alpha(&x, &y).unwrap();
        assert!((a - c(-1.0, 0.0)).norm() < 1e-14);
        assert!((cocycle_alpha(&x, &x).unwrap() - c(1.0, 0.0)).norm() < 1e-14);
        let u = PhasePoint::from_slices(&[1.0], &[1.0]);
        let v = PhasePoint::from_slices(&[2.0], &[3.0]);
        assert!((cocycle_alpha(&u, &v).unwrap() - c(-1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn complexify_values() {
        let t = ComplexStructure::standard(1);
        let z = complexify(&PhasePoint::zero(1), &t).unwrap();
        assert_eq!(z[0], c(0.0, 0.0));
        let x = PhasePoint::from_slices(&[1.0], &[0.0]);
        assert!((complexify(&x, &t).unwrap()[0] - c(0.0, 1.0)).norm() < 1e-15);
        let t2 = ComplexStructure::from_rows(1, &[c(1.0, 2.0)]).unwrap();
        let y = PhasePoint::from_slices(&[1.0], &[1.0]);
        assert!((complexify(&y, &t2).unwrap()[0] - c(2.0, 2.0)).norm() < 1e-15);
    }

    #[test]
    fn hermitian_h_values() {
        let t = ComplexStructure::standard(1);
        let h = PhasePoint::from_slices(&[1.0], &[0.0]);
        assert!((hermitian_h(&h, &h, &t).unwrap() - c(1.0, 0.0)).norm() < 1e-14);
        let g = PhasePoint::from_slices(&[1.0], &[0.0]);
        let k = PhasePoint::from_slices(&[0.0], &[1.0]);
        assert!((hermitian_h(&g, &k, &t).unwrap() - c(0.0, 1.0)).norm() < 1e-14);
        assert!((hermitian_h(&PhasePoint::zero(1), &h, &t).unwrap()).norm() < 1e-14);
    }

    #[test]
    fn dual_of_standard_is_standard() {
        let d = Lattice::standard(1);
        let dual = dual_lattice(&d).unwrap();
        // Point sets agree on a test ball.
        let mut a: Vec<_> = d
            .ball(2)
            .iter()
            .map(|p| (p.embedded.x1[0].round() as i64, p.embedded.x2[0].round() as i64))
            .collect();
        let mut b: Vec<_> = dual
            .ball(2)
            .iter()
            .map(|p| (p.embedded.x1[0].round() as i64, p.embedded.x2[0].round() as i64))
            .collect();
        a.sort();
        b.sort();
        assert_eq!(a, b);
    }

    #[test]
    fn dual_of_scaled_lattice() {
        // D = 2Z x Z -> D^perp = Z x (1/2)Z.
        let d = Lattice::new(1, DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 1.0])).unwrap();
        let dual = dual_lattice(&d).unwrap();
        // |det dual basis| must be 1/2, and every embedded point must have
        // integer x1 and half-integer x2.
        assert!((dual.basis().determinant().abs() - 0.5).abs() < 1e-12);
        for p in dual.ball(2) {
            let x1 = p.embedded.x1[0];
            let x2 = p.embedded.x2[0];
            assert!((x1 - x1.round()).abs() < 1e-12);
            assert!((2.0 * x2 - (2.0 * x2).round()).abs() < 1e-12);
        }
        // Defining condition on basis pairs.
        for i in 0..2 {
            for j in 0..2 {
                let w = d.point(unit_coords(2, i)).embedded;
                let z = dual.point(unit_coords(2, j)).embedded;
                let s = symplectic_pairing(&w, &z).unwrap();
                assert!((s - s.round()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn dual_rejects_irrational_basis() {
        let b = DMatrix::from_row_slice(2, 2, &[std::f64::consts::SQRT_2, 0.0, 0.0, 1.0]);
        let d = Lattice::new(1, b).unwrap();
        assert!(matches!(dual_lattice(&d), Err(Error::IrrationalBasis(_))));
    }

    #[test]
    fn double_dual_has_same_points() {
        let d = Lattice::new(1, DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 1.0])).unwrap();
        let dd = dual_lattice(&dual_lattice(&d).unwrap()).unwrap();
        let key = |p: &LatticePoint| {
            (
                (p.embedded.x1[0] * 1e9).round() as i64,
                (p.embedded.x2[0] * 1e9).round() as i64,
            )
        };
        let mut a: Vec<_> = d.ball(2).iter().map(key).collect();
        let mut b: Vec<_> = dd.ball(2).iter().map(key).collect();
        a.sort();
        b.sort();
        assert_eq!(a, b);
    }

    #[test]
    fn cocycle_h_link_on_lattice_points() {
        let t = ComplexStructure::from_rows(1, &[c(0.3, 0.8)]).unwrap();
        let d = Lattice::standard(1);
        for g in d.ball(2) {
            for h in d.ball(2) {
                let a = cocycle_alpha(&g.embedded, &h.embedded).unwrap();
                let hh = hermitian_h(&g.embedded, &h.embedded, &t).unwrap();
                let link = Complex64::new(0.0, PI * hh.im).exp();
                assert!((a - link).norm() < 1e-12);
            }
        }
    }
}
