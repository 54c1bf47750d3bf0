//! Verification batteries: every functional identity in the crate, run as
//! named checks with explicit tolerances and seeded randomness.
//!
//! Checks are grouped into four suites mirroring the module layout
//! (classical, heisenberg, algebra, quantum). Identical inputs and seed
//! produce identical reports apart from runtimes.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::hash_map::DefaultHasher;
use std::f64::consts::PI;
use std::hash::{Hash, Hasher};
use std::time::Instant;

use crate::classical::{ftilde, gaussian, kq_transform, theta, TruncationPolicy};
use crate::error::Result;
use crate::heisenberg::{
    commutation_defect, composition_defect, curvature_scalar, holomorphic_residual,
    holomorphic_residual_fd, theta_vector, ConnectionSpec, GaussianVector,
};
use crate::lattice::{
    cocycle_alpha, dual_lattice, hermitian_h, ComplexStructure, Lattice, PhasePoint,
};
use crate::problem::Problem;
use crate::quantum::{
    coefficient_identity_defect, functional_equation_defect, h_c_diag, manin_theta,
    normalization_defect, quantum_translate, shifted_theta, x_pairing, QuantumThetaParams,
};
use crate::report::VerificationReport;
use crate::twisted::{
    associativity_defect, compatibility_defect, delta, gaussian_pairing, inner_product_d,
    multiply, quadrature_pairing, TwistedElement,
};

/// Which battery to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Classical,
    Heisenberg,
    Algebra,
    Quantum,
    All,
}

impl std::str::FromStr for Suite {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "classical" => Ok(Suite::Classical),
            "heisenberg" => Ok(Suite::Heisenberg),
            "algebra" => Ok(Suite::Algebra),
            "quantum" => Ok(Suite::Quantum),
            "all" => Ok(Suite::All),
            other => Err(format!("unknown suite {other:?}")),
        }
    }
}

/// Run one suite (or all of them) against a problem. `tolerance_scale`
/// multiplies every threshold; 1.0 is the contract.
pub fn run_suite(suite: Suite, problem: &Problem, tolerance_scale: f64) -> Result<Vec<VerificationReport>> {
    let mut out = Vec::new();
    if matches!(suite, Suite::Classical | Suite::All) {
        classical_checks(problem, tolerance_scale, &mut out)?;
    }
    if matches!(suite, Suite::Heisenberg | Suite::All) {
        heisenberg_checks(problem, tolerance_scale, &mut out)?;
    }
    if matches!(suite, Suite::Algebra | Suite::All) {
        algebra_checks(problem, tolerance_scale, &mut out)?;
    }
    if matches!(suite, Suite::Quantum | Suite::All) {
        quantum_checks(problem, tolerance_scale, &mut out)?;
    }
    Ok(out)
}

fn digest(parts: &[&str]) -> String {
    let mut h = DefaultHasher::new();
    for p in parts {
        p.hash(&mut h);
    }
    format!("{:016x}", h.finish())
}

fn push_check(
    out: &mut Vec<VerificationReport>,
    name: &str,
    seed: u64,
    scale: f64,
    tolerance: f64,
    started: Instant,
    max_defect: f64,
) {
    let d = digest(&[name, &seed.to_string(), &format!("{tolerance:e}")]);
    out.push(VerificationReport::new(
        name,
        d,
        max_defect,
        tolerance * scale,
        started.elapsed().as_secs_f64() * 1e3,
    ));
}

fn rng_for(problem: &Problem, label: &str) -> ChaCha8Rng {
    let mut h = DefaultHasher::new();
    problem.seed.hash(&mut h);
    label.hash(&mut h);
    ChaCha8Rng::seed_from_u64(h.finish())
}

fn cr(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Random valid modulus T = S + i (L L^t + 0.3 I).
pub fn random_structure(rng: &mut ChaCha8Rng, n: usize) -> ComplexStructure {
    let sym = {
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v: f64 = rng.gen_range(-1.0..1.0);
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        m
    };
    let l = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
    let q = &l * l.transpose() + DMatrix::identity(n, n) * 0.3;
    let t = DMatrix::from_fn(n, n, |i, j| Complex64::new(sym[(i, j)], q[(i, j)]));
    ComplexStructure::new(t).expect("construction guarantees validity")
}

fn random_c(rng: &mut ChaCha8Rng, n: usize) -> DVector<Complex64> {
    DVector::from_fn(n, |_, _| Complex64::new(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5)))
}

fn random_phase_point(rng: &mut ChaCha8Rng, n: usize) -> PhasePoint {
    PhasePoint::new(
        DVector::from_fn(n, |_, _| rng.gen_range(-2.0..2.0)),
        DVector::from_fn(n, |_, _| rng.gen_range(-2.0..2.0)),
    )
}

fn random_gaussian(rng: &mut ChaCha8Rng, n: usize) -> GaussianVector {
    let t = random_structure(rng, n);
    let c = random_c(rng, n);
    theta_vector(&t, &c).expect("valid by construction")
}

fn classical_checks(problem: &Problem, scale: f64, out: &mut Vec<VerificationReport>) -> Result<()> {
    let seed = problem.seed;

    // Self-consistency of the truncated series against a wider truncation.
    let start = Instant::now();
    let mut defect: f64 = 0.0;
    for n in [1usize, 2] {
        let t = ComplexStructure::standard(n);
        let z = DVector::zeros(n);
        let narrow = theta(&z, &t, &TruncationPolicy::new(10))?;
        let wide = theta(&z, &t, &TruncationPolicy::new(30))?;
        defect = defect.max((narrow.value - wide.value).norm());
    }
    push_check(out, "theta_self_consistency", seed, scale, 1e-12, start, defect);

    // f-tilde vs the substituted theta series, over random (T, c, rho, sigma).
    let start = Instant::now();
    let mut rng = rng_for(problem, "transform_identity");
    let mut defect: f64 = 0.0;
    for i in 0..100 {
        let n = if i % 2 == 0 { 1 } else { 2 };
        let t = random_structure(&mut rng, n);
        let c = if i % 4 < 2 { DVector::zeros(n) } else { random_c(&mut rng, n) };
        let rho = DVector::from_fn(n, |_, _| rng.gen_range(-0.5..0.5));
        let sigma = DVector::from_fn(n, |_, _| rng.gen_range(-0.5..0.5));
        let trunc = TruncationPolicy::default_for(n);
        let lhs = ftilde(&t, &c, &rho, &sigma, &trunc)?;
        let sc = sigma.map(cr);
        let quad = (sc.transpose() * t.matrix() * &sc)[(0, 0)];
        let lin = c.dot(&sc);
        let pre = (Complex64::new(0.0, PI) * (quad + 2.0 * lin)).exp();
        let z = t.matrix() * &sc - rho.map(cr) + &c;
        let rhs = pre * theta(&z, &t, &trunc)?.value;
        defect = defect.max((lhs - rhs).norm());
    }
    push_check(out, "transform_identity", seed, scale, 1e-10, start, defect);

    // kq periodicities over random (k, q, a).
    let start = Instant::now();
    let mut rng = rng_for(problem, "kq_periodicity");
    let trunc = TruncationPolicy::new(14);
    let mut defect: f64 = 0.0;
    for _ in 0..100 {
        let t = random_structure(&mut rng, 1);
        let psi = theta_vector(&t, &DVector::zeros(1))?;
        let a: f64 = rng.gen_range(0.5..2.0);
        let k: f64 = rng.gen_range(-PI / a..PI / a);
        let q: f64 = rng.gen_range(-a / 2.0..a / 2.0);
        let base = kq_transform(&psi, a, k, q, &trunc)?;
        let shifted_k = kq_transform(&psi, a, k + 2.0 * PI / a, q, &trunc)?;
        defect = defect.max((base - shifted_k).norm());
        let shifted_q = kq_transform(&psi, a, k, q + a, &trunc)?;
        defect = defect.max((shifted_q - Complex64::new(0.0, k * a).exp() * base).norm());
    }
    push_check(out, "kq_periodicity", seed, scale, 1e-10, start, defect);

    // kq equals the one-dimensional f-tilde with a = 1 after reindexing.
    let start = Instant::now();
    let mut rng = rng_for(problem, "kq_matches_ftilde");
    let mut defect: f64 = 0.0;
    for _ in 0..20 {
        let t = random_structure(&mut rng, 1);
        let psi = theta_vector(&t, &DVector::zeros(1))?;
        let k: f64 = rng.gen_range(-PI..PI);
        let q: f64 = rng.gen_range(-0.5..0.5);
        let ckq = kq_transform(&psi, 1.0, k, q, &TruncationPolicy::new(12))?;
        let ft = ftilde(
            &t,
            &DVector::zeros(1),
            &DVector::from_row_slice(&[k / (2.0 * PI)]),
            &DVector::from_row_slice(&[q]),
            &TruncationPolicy::new(12),
        )?;
        defect = defect.max((ckq - ft / cr((2.0 * PI).sqrt())).norm());
    }
    push_check(out, "kq_matches_ftilde", seed, scale, 1e-10, start, defect);

    // Quasi-periodicity under z -> z + T m (relative defect).
    let start = Instant::now();
    let mut rng = rng_for(problem, "theta_quasi_periodicity");
    let trunc = TruncationPolicy::new(12);
    let mut defect: f64 = 0.0;
    for _ in 0..20 {
        let t = random_structure(&mut rng, 1);
        let z = DVector::from_row_slice(&[Complex64::new(
            rng.gen_range(-0.5..0.5),
            rng.gen_range(-0.5..0.5),
        )]);
        let m: i64 = *[-2i64, -1, 1, 2].get(rng.gen_range(0..4)).unwrap();
        let tm = t.matrix()[(0, 0)] * cr(m as f64);
        let zs = DVector::from_row_slice(&[z[0] + tm]);
        let lhs = theta(&zs, &t, &trunc)?.value;
        let factor = (Complex64::new(0.0, -PI) * tm * cr(m as f64)
            - Complex64::new(0.0, 2.0 * PI * m as f64) * z[0])
            .exp();
        let rhs = factor * theta(&z, &t, &trunc)?.value;
        defect = defect.max((lhs - rhs).norm() / rhs.norm());
    }
    push_check(out, "theta_quasi_periodicity", seed, scale, 1e-8, start, defect);

    // Evenness theta(-z) = theta(z).
    let start = Instant::now();
    let mut rng = rng_for(problem, "theta_symmetry");
    let mut defect: f64 = 0.0;
    for _ in 0..20 {
        let t = random_structure(&mut rng, 1);
        let z = DVector::from_row_slice(&[Complex64::new(
            rng.gen_range(-0.5..0.5),
            rng.gen_range(-0.5..0.5),
        )]);
        let mz = DVector::from_row_slice(&[-z[0]]);
        let trunc = TruncationPolicy::new(12);
        defect = defect.max((theta(&z, &t, &trunc)?.value - theta(&mz, &t, &trunc)?.value).norm());
    }
    push_check(out, "theta_symmetry", seed, scale, 1e-12, start, defect);

    // Truncation differences shrink monotonically in the radius.
    let start = Instant::now();
    let t = problem.t.clone();
    let z = DVector::zeros(t.n());
    let mut diffs = Vec::new();
    for r in [4i64, 6, 8, 10] {
        let a = theta(&z, &t, &TruncationPolicy::new(r))?.value;
        let b = theta(&z, &t, &TruncationPolicy::new(2 * r))?.value;
        diffs.push((a - b).norm());
    }
    let monotone = diffs.windows(2).all(|w| w[1] <= w[0]);
    push_check(
        out,
        "theta_truncation_monotone",
        seed,
        scale,
        0.5,
        start,
        if monotone { 0.0 } else { 1.0 },
    );

    // Pointwise Gaussian seed values.
    let start = Instant::now();
    let t = ComplexStructure::standard(1);
    let zero = DVector::zeros(1);
    let mut defect = (gaussian(&t, &zero, &DVector::zeros(1))? - cr(1.0)).norm();
    defect = defect.max((gaussian(&t, &zero, &DVector::from_row_slice(&[1.0]))? - cr((-PI).exp())).norm());
    push_check(out, "gaussian_seed_values", seed, scale, 1e-12, start, defect);

    Ok(())
}

fn heisenberg_checks(problem: &Problem, scale: f64, out: &mut Vec<VerificationReport>) -> Result<()> {
    let seed = problem.seed;

    // Commutation and composition laws of the representation.
    let start = Instant::now();
    let mut rng = rng_for(problem, "heisenberg_law");
    let mut comm: f64 = 0.0;
    let mut comp: f64 = 0.0;
    for i in 0..50 {
        let n = if i % 2 == 0 { 1 } else { 2 };
        let f = random_gaussian(&mut rng, n);
        let x = random_phase_point(&mut rng, n);
        let y = random_phase_point(&mut rng, n);
        comm = comm.max(commutation_defect(&x, &y, &f)?);
        comp = comp.max(composition_defect(&x, &y, &f)?);
    }
    push_check(out, "heisenberg_commutation", seed, scale, 1e-10, start, comm);
    let start = Instant::now();
    push_check(out, "heisenberg_composition", seed, scale, 1e-10, start, comp);

    // Theta vectors are exactly holomorphic.
    let start = Instant::now();
    let mut rng = rng_for(problem, "holomorphic_residual");
    let mut defect = holomorphic_residual(&problem.t, &problem.c, &theta_vector(&problem.t, &problem.c)?)?;
    for i in 0..10 {
        let n = if i % 2 == 0 { 1 } else { 2 };
        let t = random_structure(&mut rng, n);
        let c = random_c(&mut rng, n);
        defect = defect.max(holomorphic_residual(&t, &c, &theta_vector(&t, &c)?)?);
    }
    push_check(out, "holomorphic_residual", seed, scale, 1e-12, start, defect);

    // Perturbing A or b by >= 1e-2 must push the residual above 1e-3.
    let start = Instant::now();
    let mut rng = rng_for(problem, "holomorphy_detects");
    let mut violations = 0usize;
    for i in 0..20 {
        let t = random_structure(&mut rng, 1);
        let c = random_c(&mut rng, 1);
        let f = theta_vector(&t, &c)?;
        let eps = rng.gen_range(0.01..0.1);
        let perturbed = if i % 2 == 0 {
            let mut a = f.quadratic().clone();
            a[(0, 0)] += Complex64::new(eps, eps);
            GaussianVector::new(a, f.linear().clone(), f.log_prefactor())?
        } else {
            let mut b = f.linear().clone();
            b[0] += Complex64::new(eps, 0.0);
            GaussianVector::new(f.quadratic().clone(), b, f.log_prefactor())?
        };
        if holomorphic_residual(&t, &c, &perturbed)? <= 1e-3 {
            violations += 1;
        }
    }
    push_check(out, "holomorphy_detects_perturbation", seed, scale, 0.5, start, violations as f64);

    // Central differences converge at second order to the symbolic residual.
    let start = Instant::now();
    let t = ComplexStructure::standard(1);
    let zero = DVector::zeros(1);
    let f = theta_vector(&t, &zero)?;
    let r1 = holomorphic_residual_fd(&t, &zero, &f, 1e-3)?;
    let r2 = holomorphic_residual_fd(&t, &zero, &f, 5e-4)?;
    let ratio = r1 / r2;
    let defect = (3.6 - ratio).max(ratio - 4.4).max(0.0);
    push_check(out, "fd_richardson_ratio", seed, scale, 1e-6, start, defect);

    // Curvature scalar is f-independent with |lambda| = 2 pi |sigma|.
    let start = Instant::now();
    let mut rng = rng_for(problem, "curvature");
    let spec = ConnectionSpec::new(
        DVector::from_row_slice(&[rng.gen_range(0.5..1.5)]),
        DMatrix::from_row_slice(1, 1, &[Complex64::new(rng.gen_range(-0.5..0.5), rng.gen_range(0.8..1.5))]),
    );
    let mut lams = Vec::new();
    for _ in 0..10 {
        let f = random_gaussian(&mut rng, 1);
        lams.push(curvature_scalar(1, &spec, &f)?);
    }
    let mut defect: f64 = 0.0;
    for l in &lams {
        defect = defect.max((l - lams[0]).norm());
        defect = defect.max((l.norm() - 2.0 * PI * spec.sigma[0].abs()).abs());
    }
    push_check(out, "curvature_constant", seed, scale, 1e-12, start, defect);

    Ok(())
}

fn algebra_checks(problem: &Problem, scale: f64, out: &mut Vec<VerificationReport>) -> Result<()> {
    let seed = problem.seed;

    // Associativity of the twisted convolution, on a half-integer lattice
    // so the cocycle takes genuinely complex values.
    let start = Instant::now();
    let mut rng = rng_for(problem, "algebra_associativity");
    let d = Lattice::new(1, DMatrix::from_row_slice(2, 2, &[0.5, 0.0, 0.0, 1.0]))?;
    let mut defect: f64 = 0.0;
    for _ in 0..10 {
        let rand_elem = |rng: &mut ChaCha8Rng| {
            let mut coeffs = std::collections::BTreeMap::new();
            for _ in 0..5 {
                let k = vec![rng.gen_range(-3i64..=3), rng.gen_range(-3i64..=3)];
                coeffs.insert(k, Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            }
            TwistedElement::from_coeffs(d.clone(), coeffs)
        };
        let a = rand_elem(&mut rng);
        let b = rand_elem(&mut rng);
        let c = rand_elem(&mut rng);
        let left = multiply(&multiply(&a, &b)?, &c)?;
        let right = multiply(&a, &multiply(&b, &c)?)?;
        defect = defect.max(left.max_defect(&right, None));
    }
    push_check(out, "algebra_associativity", seed, scale, 1e-12, start, defect);

    // Unit and inverse laws for the delta generators.
    let start = Instant::now();
    let dstd = Lattice::standard(1);
    let e0 = delta(&dstd.point(vec![0, 0]), &dstd)?;
    let w = dstd.point(vec![2, -1]);
    let ew = delta(&w, &dstd)?;
    let mut defect = multiply(&e0, &ew)?.max_defect(&ew, None);
    defect = defect.max(multiply(&ew, &e0)?.max_defect(&ew, None));
    let ewn = delta(&dstd.point(vec![-2, 1]), &dstd)?;
    defect = defect.max(multiply(&ew, &ewn)?.max_defect(&e0, None));
    push_check(out, "algebra_unit_law", seed, scale, 1e-12, start, defect);

    // Closed-form pairing vs the Simpson quadrature oracle.
    let start = Instant::now();
    let mut rng = rng_for(problem, "pairing_oracle");
    let mut defect: f64 = 0.0;
    for _ in 0..20 {
        let f = random_gaussian(&mut rng, 1);
        let g = random_gaussian(&mut rng, 1);
        let exact = gaussian_pairing(&f, &g)?;
        let quad = quadrature_pairing(&f, &g, 6.0, 4096)?;
        defect = defect.max((exact - quad).norm() / exact.norm().max(1e-30));
    }
    push_check(out, "pairing_oracle_agreement", seed, scale, 1e-6, start, defect);

    // Sesquilinearity: <f, g> = conj(<g, f>).
    let start = Instant::now();
    let mut rng = rng_for(problem, "pairing_symmetry");
    let mut defect: f64 = 0.0;
    for _ in 0..20 {
        let f = random_gaussian(&mut rng, 1);
        let g = random_gaussian(&mut rng, 1);
        defect = defect.max((gaussian_pairing(&f, &g)? - gaussian_pairing(&g, &f)?.conj()).norm());
    }
    push_check(out, "pairing_conjugate_symmetry", seed, scale, 1e-12, start, defect);

    // Compatibility of the inner product with the module action.
    let start = Instant::now();
    let mut rng = rng_for(problem, "compatibility");
    let mut defect: f64 = 0.0;
    let f0 = theta_vector(
        &ComplexStructure::standard(1),
        &DVector::from_row_slice(&[Complex64::new(0.3, 0.1)]),
    )?;
    for i in 0..5 {
        let mut coeffs = std::collections::BTreeMap::new();
        for _ in 0..3 {
            let k = vec![rng.gen_range(-2i64..=2), rng.gen_range(-2i64..=2)];
            coeffs.insert(k, Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        }
        let phi = TwistedElement::from_coeffs(dstd.clone(), coeffs);
        let (f, g) = if i == 0 {
            (f0.clone(), f0.clone())
        } else {
            (random_gaussian(&mut rng, 1), random_gaussian(&mut rng, 1))
        };
        defect = defect.max(compatibility_defect(&phi, &f, &g, &dstd, 6)?);
    }
    push_check(out, "compatibility_relation", seed, scale, 1e-10, start, defect);

    // Associativity relation across D and D^perp, with convergence in the
    // truncation radius.
    let start = Instant::now();
    let fstd = theta_vector(&ComplexStructure::standard(1), &DVector::zeros(1))?;
    let d8 = associativity_defect(&fstd, &fstd, &fstd, &dstd, 8)?;
    push_check(out, "associativity_relation", seed, scale, 1e-6, start, d8);
    let start = Instant::now();
    let d4 = associativity_defect(&fstd, &fstd, &fstd, &dstd, 4)?;
    push_check(
        out,
        "associativity_monotone",
        seed,
        scale,
        0.5,
        start,
        if d8 <= d4 { 0.0 } else { 1.0 },
    );

    // Gaussian decay of inner-product coefficients: log-linear in |w|^2.
    let start = Instant::now();
    let ip = inner_product_d(&fstd, &fstd, &dstd, 5)?;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (k, v) in ip.support() {
        let r2: f64 = k.iter().map(|&x| (x * x) as f64).sum();
        if r2 > 0.0 && v.norm() > 1e-250 {
            xs.push(r2);
            ys.push(v.norm().ln());
        }
    }
    let (slope, r2fit) = linear_fit(&xs, &ys);
    let defect = if slope < 0.0 { 1.0 - r2fit } else { 1.0 };
    push_check(out, "coefficient_decay_fit", seed, scale, 1e-3, start, defect);

    // D^perp inner product: z = 0 coefficient is the conjugate pairing.
    let start = Instant::now();
    let dperp = dual_lattice(&dstd)?;
    let a = inner_product_d(&fstd, &fstd, &dstd, 2)?;
    let b = crate::twisted::inner_product_dperp(&fstd, &fstd, &dperp, 2)?;
    let defect = (b.coefficient(&[0, 0]) - a.coefficient(&[0, 0]).conj()).norm();
    push_check(out, "dperp_zero_coefficient", seed, scale, 1e-12, start, defect);

    Ok(())
}

fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    (sxy / sxx, sxy * sxy / (sxx * syy))
}

fn quantum_checks(problem: &Problem, scale: f64, out: &mut Vec<VerificationReport>) -> Result<()> {
    let seed = problem.seed;

    // Scalar identity behind the coefficient formula.
    let start = Instant::now();
    let mut rng = rng_for(problem, "coefficient_identity");
    let mut defect: f64 = 0.0;
    for i in 0..100 {
        let n = if i % 2 == 0 { 1 } else { 2 };
        let t = random_structure(&mut rng, n);
        let d = Lattice::standard(n);
        let coords: Vec<i64> = (0..2 * n).map(|_| rng.gen_range(-3i64..=3)).collect();
        defect = defect.max(coefficient_identity_defect(&d.point(coords), &t)?);
    }
    push_check(out, "coefficient_identity", seed, scale, 1e-12, start, defect);

    // Cocycle-H link: alpha(g, h) = exp(pi i Im H(g, h)).
    let start = Instant::now();
    let mut rng = rng_for(problem, "cocycle_h_link");
    let mut defect: f64 = 0.0;
    for i in 0..100 {
        let n = if i % 2 == 0 { 1 } else { 2 };
        let t = random_structure(&mut rng, n);
        let d = Lattice::standard(n);
        let g = d.point((0..2 * n).map(|_| rng.gen_range(-3i64..=3)).collect());
        let h = d.point((0..2 * n).map(|_| rng.gen_range(-3i64..=3)).collect());
        let alpha = cocycle_alpha(&g.embedded, &h.embedded)?;
        let link = Complex64::new(0.0, PI * hermitian_h(&g.embedded, &h.embedded, &t)?.im).exp();
        defect = defect.max((alpha - link).norm());
    }
    push_check(out, "cocycle_h_link", seed, scale, 1e-12, start, defect);

    // The proof's closing exponent identity, unshifted and shifted.
    let start = Instant::now();
    let mut rng = rng_for(problem, "scalar_identity");
    let mut defect_c0: f64 = 0.0;
    let mut defect_c: f64 = 0.0;
    for i in 0..50 {
        let n = if i % 2 == 0 { 1 } else { 2 };
        let t = random_structure(&mut rng, n);
        let d = Lattice::standard(n);
        let g = d.point((0..2 * n).map(|_| rng.gen_range(-2i64..=2)).collect());
        let h = d.point((0..2 * n).map(|_| rng.gen_range(-2i64..=2)).collect());
        for shifted in [false, true] {
            let c = if shifted { random_c(&mut rng, n) } else { DVector::zeros(n) };
            let p = QuantumThetaParams::new(t.clone(), c, d.clone())?;
            let hg = h_c_diag(&g.embedded, &p)?;
            let hh = h_c_diag(&h.embedded, &p)?;
            let x = x_pairing(&g.embedded, &h.embedded, &p)?;
            let im = hermitian_h(&g.embedded, &h.embedded, &t)?.im;
            let lhs = cr(-PI / 2.0) * (hg + hh) - cr(PI) * x + Complex64::new(0.0, PI * im);
            let rhs = cr(-PI / 2.0) * h_c_diag(&g.embedded.add(&h.embedded), &p)?;
            let d2 = (lhs - rhs).norm();
            if shifted {
                defect_c = defect_c.max(d2);
            } else {
                defect_c0 = defect_c0.max(d2);
            }
        }
    }
    push_check(out, "scalar_identity_unshifted", seed, scale, 1e-12, start, defect_c0);
    let start = Instant::now();
    push_check(out, "scalar_identity_shifted", seed, scale, 1e-12, start, defect_c);

    // shifted_theta at c = 0 reduces to the unshifted construction.
    let start = Instant::now();
    let p0 = QuantumThetaParams::new(problem.t.clone(), DVector::zeros(problem.t.n()), problem.d.clone())?;
    let plain = manin_theta(&p0)?;
    let sh = shifted_theta(&p0)?;
    let mut defect: f64 = 0.0;
    for h in p0.d.ball(3) {
        defect = defect.max((plain.coefficient(&h) - sh.coefficient(&h)).norm());
    }
    push_check(out, "shifted_reduces_to_unshifted", seed, scale, 1e-12, start, defect);

    // End-to-end normalization against the actual Gaussian integrals.
    let start = Instant::now();
    let mut rng = rng_for(problem, "normalization");
    let t1 = ComplexStructure::standard(1);
    let d1 = Lattice::standard(1);
    let mut defect = normalization_defect(
        &QuantumThetaParams::new(t1.clone(), DVector::zeros(1), d1.clone())?,
        4,
    )?;
    defect = defect.max(normalization_defect(
        &QuantumThetaParams::new(
            t1,
            DVector::from_row_slice(&[Complex64::new(0.3, 0.2)]),
            d1,
        )?,
        4,
    )?);
    let t2 = random_structure(&mut rng, 2);
    defect = defect.max(normalization_defect(
        &QuantumThetaParams::new(t2, random_c(&mut rng, 2), Lattice::standard(2))?,
        4,
    )?);
    push_check(out, "quantum_normalization", seed, scale, 1e-10, start, defect);

    // Translation composes additively (up to the X constant).
    let start = Instant::now();
    let mut rng = rng_for(problem, "translate_composition");
    let t = random_structure(&mut rng, 1);
    let d = Lattice::standard(1);
    let p = QuantumThetaParams::new(t, DVector::zeros(1), d.clone())?;
    let th = manin_theta(&p)?;
    let g1 = d.point(vec![1, 0]);
    let g2 = d.point(vec![0, 1]);
    let gsum = d.point(vec![1, 1]);
    let a = quantum_translate(&g2, &quantum_translate(&g1, &th, &p)?, &p)?;
    let b = quantum_translate(&gsum, &th, &p)?;
    let mut defect: f64 = 0.0;
    for h in d.ball(3) {
        defect = defect.max((a.log_coefficient(&h) - b.log_coefficient(&h)).norm());
    }
    push_check(out, "translate_composition", seed, scale, 1e-12, start, defect);

    // The functional equation of the quantum theta function.
    let start = Instant::now();
    let mut rng = rng_for(problem, "functional_equation");
    let mut defect: f64 = 0.0;
    for i in 0..20 {
        let n = if i % 2 == 0 { 1 } else { 2 };
        let t = random_structure(&mut rng, n);
        let c = if i % 4 < 2 { DVector::zeros(n) } else { random_c(&mut rng, n) };
        let d = Lattice::standard(n);
        let p = QuantumThetaParams::new(t, c, d.clone())?;
        let g = d.point((0..2 * n).map(|_| rng.gen_range(-2i64..=2)).collect());
        defect = defect.max(functional_equation_defect(&g, &p, 5)?);
    }
    push_check(out, "functional_equation", seed, scale, 1e-10, start, defect);

    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::ProblemSpec;

    fn default_problem() -> Problem {
        ProblemSpec::parse(r#"{"n": 1, "T": [[[0.0, 1.0]]], "seed": 7}"#)
            .unwrap()
            .validate()
            .unwrap()
    }

    #[test]
    fn all_suites_pass_on_default_problem() {
        let reports = run_suite(Suite::All, &default_problem(), 1.0).unwrap();
        assert!(!reports.is_empty());
        for r in &reports {
            assert!(r.pass, "{} failed: defect {} vs tol {}", r.check_name, r.max_defect, r.tolerance);
        }
    }

    #[test]
    fn zero_tolerance_fails() {
        let reports = run_suite(Suite::Classical, &default_problem(), 0.0).unwrap();
        assert!(reports.iter().any(|r| !r.pass));
    }

    #[test]
    fn reports_are_deterministic() {
        let strip = |rs: &[VerificationReport]| {
            rs.iter()
                .map(|r| (r.check_name.clone(), r.params_digest.clone(), r.max_defect.to_bits(), r.pass))
                .collect::<Vec<_>>()
        };
        let a = run_suite(Suite::Quantum, &default_problem(), 1.0).unwrap();
        let b = run_suite(Suite::Quantum, &default_problem(), 1.0).unwrap();
        assert_eq!(strip(&a), strip(&b));
    }
}
