use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("NotSymmetric: entrywise asymmetry {0:.3e} exceeds tolerance")]
    NotSymmetric(f64),
    #[error("ImNotPositiveDefinite: imaginary part is not positive definite")]
    ImNotPositiveDefinite,
    #[error("DimensionMismatch: expected dimension {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("IrrationalBasis: basis entry {0} is not close to a small rational")]
    IrrationalBasis(f64),
    #[error("SingularBasis: |det| = {0:.3e} below tolerance")]
    SingularBasis(f64),
    #[error("PointNotInLattice")]
    PointNotInLattice,
    #[error("LatticeMismatch: operands live on different lattices")]
    LatticeMismatch,
    #[error("NotIntegrable: real part of the combined quadratic form is not positive definite")]
    NotIntegrable,
    #[error("IndexOutOfRange: connection index {0} out of 1..=2n")]
    IndexOutOfRange(usize),
    #[error("NotOneDimensional: kq transform is defined for n = 1 only")]
    NotOneDimensional,
    #[error("NotProportional: commutator is not a scalar multiple of the input")]
    NotProportional,
}

pub type Result<T> = std::result::Result<T, Error>;
