//! Dense complex matrices and the Hermitian eigensolver everything else is built on.

mod eigen;
mod linalg;
mod matrix;

pub use eigen::{hermitian_eig, EigenDecomposition, Tolerance};
pub use linalg::{
    hermitian_pseudo_inverse, kronecker, kronecker_capped, numeric_rank, orthonormal_complement, pseudo_inverse,
    range_basis, range_projection, ThinSvd, DEFAULT_KRONECKER_CAP,
};
pub use matrix::ComplexMatrix;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    #[error("shape mismatch: expected {expected:?}, found {found:?}")]
    ShapeMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },
    #[error("matrix entries must be finite")]
    NonFinite,
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not Hermitian (max |A - A*| = {defect:e})")]
    NotHermitian { defect: f64 },
    #[error("eigensolver did not converge within {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
    #[error("result would be {rows}x{cols}, above the cap of {cap}")]
    SizeOverflow { rows: usize, cols: usize, cap: usize },
    #[error("tolerances must be finite and strictly positive")]
    BadTolerance,
}
