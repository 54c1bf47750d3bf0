//! Problem-file parsing and the shared serialization conventions:
//! complex scalars as two-element `[re, im]` arrays, matrices as row-major
//! nested arrays. Used by every file format in the repo.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::classical::TruncationPolicy;
use crate::error::Result;
use crate::lattice::{ComplexStructure, Lattice};
use crate::twisted::TwistedElement;

/// A complex scalar on the wire: [re, im].
pub type WireComplex = [f64; 2];

pub fn to_wire(z: Complex64) -> WireComplex {
    [z.re, z.im]
}

pub fn from_wire(w: WireComplex) -> Complex64 {
    Complex64::new(w[0], w[1])
}

/// Raw problem file contents, before validation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub n: usize,
    #[serde(rename = "T")]
    pub t: Vec<Vec<WireComplex>>,
    #[serde(default)]
    pub c: Option<Vec<WireComplex>>,
    #[serde(default)]
    pub lattice_basis: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub radius: Option<i64>,
    #[serde(default)]
    pub seed: Option<u64>,
}

/// Validated problem: the domain objects the computations consume.
#[derive(Debug, Clone)]
pub struct Problem {
    pub t: ComplexStructure,
    pub c: DVector<Complex64>,
    pub d: Lattice,
    pub trunc: TruncationPolicy,
    pub seed: u64,
}

impl ProblemSpec {
    pub fn parse(json: &str) -> std::result::Result<Self, serde_json::Error> {
        serde_json::from_str(json)
    }

    pub fn validate(&self) -> Result<Problem> {
        let n = self.n;
        let mut entries = Vec::with_capacity(n * n);
        for row in &self.t {
            for w in row {
                entries.push(from_wire(*w));
            }
        }
        let t = ComplexStructure::new(DMatrix::from_row_slice(n, n, &entries))?;
        let c = match &self.c {
            Some(v) => DVector::from_iterator(n, v.iter().map(|w| from_wire(*w))),
            None => DVector::zeros(n),
        };
        let d = match &self.lattice_basis {
            Some(rows) => {
                let flat: Vec<f64> = rows.iter().flatten().copied().collect();
                Lattice::new(n, DMatrix::from_row_slice(2 * n, 2 * n, &flat))?
            }
            None => Lattice::standard(n),
        };
        let trunc = match self.radius {
            Some(r) => TruncationPolicy::new(r),
            None => TruncationPolicy::default_for(n),
        };
        Ok(Problem {
            t,
            c,
            d,
            trunc,
            seed: self.seed.unwrap_or(0),
        })
    }
}

/// One serialized coefficient of a twisted element.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct WireCoefficient {
    pub coords: Vec<i64>,
    pub re: f64,
    pub im: f64,
}

/// Serialize a twisted element as a JSON array sorted in the crate-wide
/// enumeration order (lexicographic coordinates).
pub fn twisted_to_wire(e: &TwistedElement) -> Vec<WireCoefficient> {
    e.support()
        .map(|(k, v)| WireCoefficient { coords: k.clone(), re: v.re, im: v.im })
        .collect()
}

/// Rebuild a twisted element from its wire form on the given lattice.
pub fn twisted_from_wire(lattice: Lattice, wire: &[WireCoefficient]) -> TwistedElement {
    let coeffs = wire
        .iter()
        .map(|w| (w.coords.clone(), Complex64::new(w.re, w.im)))
        .collect();
    TwistedElement::from_coeffs(lattice, coeffs)
}
