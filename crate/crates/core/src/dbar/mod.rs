//! ∂̄-Neumann compactness on products: factor models with per-bidegree
//! spectral data, product spectra, and the compactness decisions built on them.

mod catalogue;
mod model;
mod product;
mod riemann;
mod weighted;

pub use catalogue::{
    builtin_model, builtin_models, ABSTRACT_COMPACT_FACTOR, GAUSSIAN_WEIGHT_LINE, GAUSSIAN_WEIGHT_LINE_TRUNCATION,
    INFINITE_BERGMAN_FACTOR,
};
pub use model::{DbarFactorModel, SpaceDim};
pub use product::{neumann_compactness, product_box_spectrum};
pub use riemann::{riemann_surface_product_report, DegreeVerdict, RiemannSurfaceReport, MAX_CURVE_FACTORS};
pub use weighted::{derive_gaussian_line_model, gaussian_line_spectra};

pub use crate::spectra::{CompactnessReport, Rule, Verdict};

use thiserror::Error;

use crate::numerics::NumericsError;
use crate::spectra::SpectraError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DbarError {
    #[error("bidegree ({p},{q}) is outside 0..={max}")]
    BidegreeOutOfRange { p: i64, q: i64, max: usize },
    #[error("form degree {q} is outside 0..={n}")]
    DegreeOutOfRange { q: usize, n: usize },
    #[error("invalid factor model {name:?}: {reason}")]
    InvalidModel { name: String, reason: String },
    #[error("{name:?} has no spectrum for bidegree ({p},{q})")]
    UnknownSpectrum { name: String, p: usize, q: usize },
    #[error("factor {name:?} has complex dimension {dim}, expected 1")]
    BadDimension { name: String, dim: usize },
    #[error("closed-range attestation missing for {0:?}")]
    MissingAttestation(String),
    #[error("need at least two factors, got {0}")]
    TooFewFactors(usize),
    #[error("{count} factors exceed the limit of {max}")]
    TooManyFactors { count: usize, max: usize },
    #[error("compactness criteria disagree at {location:?}; the factor data is inconsistent")]
    CriteriaDisagree { location: Vec<i64> },
    #[error("spectral derivation failed: {0}")]
    Oracle(String),
    #[error(transparent)]
    Spectra(#[from] SpectraError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}
