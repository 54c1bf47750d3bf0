//! Theta functions on classical and quantum tori.
//!
//! The crate is organized around the chain
//!
//! 1. [`lattice`] — phase-space geometry: complex structures, lattices,
//!    the symplectic pairing and cocycle, and the Hermitian pairing H;
//! 2. [`classical`] — classical theta series, Gaussian seed functions,
//!    the Fourier-like transform and the kq (Zak) representation;
//! 3. [`heisenberg`] — the module S(R^n) as exact symbolic Gaussians,
//!    the Heisenberg representation, connections and theta vectors;
//! 4. [`twisted`] — the twisted group algebra S(D), algebra-valued inner
//!    products in closed form, and an independent quadrature oracle;
//! 5. [`quantum`] — quantum theta functions, translation operators and
//!    their functional equations;
//! 6. [`verify`] / [`problem`] / [`report`] — the batch verification
//!    harness driven by the `nctheta` binary.
//!
//! Lattice sums run data-parallel via rayon when the default `parallel`
//! feature is enabled; term order is fixed so results are identical either
//! way.

pub mod classical;
pub mod error;
pub mod exec;
pub mod heisenberg;
pub mod lattice;
pub mod problem;
pub mod quantum;
pub mod report;
pub mod twisted;
pub mod verify;

pub use error::Error;
