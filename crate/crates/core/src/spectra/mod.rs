//! Exact spectral sets: points and arithmetic progressions over the rationals,
//! with multiplicities, closed under union and Minkowski sum.

mod compactness;
mod multiplicity;
mod operator;
mod oracle;
pub mod rational;
mod set;

pub use compactness::{
    compactness_verdict, criterion_essential_within_zero, criterion_factor_essential_empty, criterion_product_essential,
    CompactnessReport, FactorSpectra, Rule, Verdict,
};
pub use multiplicity::Multiplicity;
pub use operator::{nondegenerate_spectra_check, product_spectrum, spectral_support, union_of_sums, DegreeSpectra, OperatorSpectrum, Provenance};
pub use oracle::minkowski_oracle_check;
pub use rational::Rational;
pub use set::{SpectralAtom, SpectralSet, MAX_EXCEPTIONAL_SPAN};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpectraError {
    #[error("spectral values must be nonnegative, got {0}")]
    NegativeValue(String),
    #[error("progression steps must be positive, got {0}")]
    NonPositiveStep(String),
    #[error("multiplicities must be at least 1")]
    ZeroMultiplicity,
    #[error("progression sum has an exceptional set spanning {0} steps")]
    ExceptionalSetTooLarge(String),
    #[error("essential spectrum is not contained in the spectrum{}", degree.map(|d| format!(" in degree {d}")).unwrap_or_default())]
    EssentialNotContained { degree: Option<i64> },
    #[error("closed-range attestation missing for the {0} factor")]
    MissingAttestation(String),
    #[error("compactness criteria disagree in degree {degree}; the inputs are inconsistent")]
    CriteriaDisagree { degree: i64 },
}
