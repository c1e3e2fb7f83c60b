//! Finite-dimensional Hilbert complexes and their Hodge theory.

mod hodge;
mod random;

pub use hodge::{HodgeSplit, IdentityReport, LaplacianBundle, NondegeneracyReport, DegreeTouch, ValidationReport};
pub use random::random_complex;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::{ComplexMatrix, NumericsError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ComplexError {
    #[error("differential in degree {degree} has shape {found:?}, expected {expected:?}")]
    ShapeMismatch {
        degree: i64,
        expected: (usize, usize),
        found: (usize, usize),
    },
    #[error("degree {degree} lies outside the window [{lo}, {hi}]")]
    DegreeOutOfRange { degree: i64, lo: i64, hi: i64 },
    #[error("degree {degree}: kernel of the Laplacian has dimension {kernel} but rank-nullity gives {rank_nullity}")]
    InconsistentRank { degree: i64, kernel: usize, rank_nullity: i64 },
    #[error("Laplacian in degree {degree} has eigenvalue {eigenvalue:e} < 0")]
    NotPositive { degree: i64, eigenvalue: f64 },
    #[error("degree window is too large")]
    WindowOverflow,
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Graded finite-dimensional spaces `H_lo, …, H_hi` with differentials
/// `d_i : H_i → H_{i+1}`. Degrees outside the window are zero spaces and a
/// missing differential is the zero map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ComplexRepr", into = "ComplexRepr")]
pub struct FiniteComplex {
    lo: i64,
    dims: Vec<usize>,
    differentials: BTreeMap<i64, ComplexMatrix>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ComplexRepr {
    #[serde(default)]
    lo: i64,
    dims: Vec<usize>,
    #[serde(default)]
    differentials: BTreeMap<i64, ComplexMatrix>,
}

impl TryFrom<ComplexRepr> for FiniteComplex {
    type Error = ComplexError;

    fn try_from(r: ComplexRepr) -> Result<Self, Self::Error> {
        FiniteComplex::new(r.lo, r.dims, r.differentials)
    }
}

impl From<FiniteComplex> for ComplexRepr {
    fn from(c: FiniteComplex) -> Self {
        ComplexRepr {
            lo: c.lo,
            dims: c.dims,
            differentials: c.differentials,
        }
    }
}

impl FiniteComplex {
    /// Checks shapes only; use [`FiniteComplex::validate`] for `d∘d = 0`.
    pub fn new(lo: i64, dims: Vec<usize>, differentials: BTreeMap<i64, ComplexMatrix>) -> Result<Self, ComplexError> {
        lo.checked_add(dims.len() as i64 + 1).ok_or(ComplexError::WindowOverflow)?;
        let c = Self {
            lo,
            dims,
            differentials: BTreeMap::new(),
        };
        let mut kept = BTreeMap::new();
        for (degree, d) in differentials {
            let expected = (c.dim(degree.saturating_add(1)), c.dim(degree));
            if d.shape() != expected {
                return Err(ComplexError::ShapeMismatch {
                    degree,
                    expected,
                    found: d.shape(),
                });
            }
            if !d.is_empty() {
                kept.insert(degree, d);
            }
        }
        Ok(Self { differentials: kept, ..c })
    }

    /// A complex with the given dimensions and only zero differentials.
    pub fn zero(lo: i64, dims: Vec<usize>) -> Self {
        Self::new(lo, dims, BTreeMap::new()).expect("zero complex is well formed")
    }

    /// The two-term complex `0 → ℂ^m → ℂ^n → 0` in degrees 0 and 1.
    pub fn two_term(d: ComplexMatrix) -> Self {
        let dims = vec![d.cols(), d.rows()];
        Self::new(0, dims, BTreeMap::from([(0, d)])).expect("shape taken from the matrix")
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    /// Top degree of the window; below `lo` when the window is empty.
    pub fn hi(&self) -> i64 {
        self.lo + self.dims.len() as i64 - 1
    }

    pub fn degrees(&self) -> impl Iterator<Item = i64> + '_ {
        self.lo..=self.hi()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Dimension of `H_i`, zero outside the window.
    pub fn dim(&self, i: i64) -> usize {
        if i < self.lo || i > self.hi() {
            0
        } else {
            self.dims[(i - self.lo) as usize]
        }
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    /// Degrees with a nonzero space.
    pub fn support(&self) -> Vec<i64> {
        self.degrees().filter(|&i| self.dim(i) > 0).collect()
    }

    pub fn in_window(&self, i: i64) -> bool {
        i >= self.lo && i <= self.hi()
    }

    pub(crate) fn check_degree(&self, i: i64) -> Result<(), ComplexError> {
        if self.in_window(i) {
            Ok(())
        } else {
            Err(ComplexError::DegreeOutOfRange {
                degree: i,
                lo: self.lo,
                hi: self.hi(),
            })
        }
    }

    /// The stored differentials, keyed by source degree.
    pub fn differentials(&self) -> &BTreeMap<i64, ComplexMatrix> {
        &self.differentials
    }

    /// `d_i` as a `dim(i+1) × dim(i)` matrix, zero when absent.
    pub fn d(&self, i: i64) -> ComplexMatrix {
        self.differentials
            .get(&i)
            .cloned()
            .unwrap_or_else(|| ComplexMatrix::zeros(self.dim(i + 1), self.dim(i)))
    }

    /// Every closed-range hypothesis holds at finite dimension: each `d_i` is a
    /// matrix, so its range is a subspace and therefore closed.
    pub fn has_closed_range(&self) -> bool {
        true
    }
}
