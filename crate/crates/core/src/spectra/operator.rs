use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{SpectraError, SpectralSet};

/// Whether the essential part was computed from the multiplicities or supplied by the user.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Derived,
    UserAsserted,
}

/// Spectrum and essential spectrum of one positive self-adjoint operator.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "OperatorRepr", into = "OperatorRepr")]
pub struct OperatorSpectrum {
    spectrum: SpectralSet,
    essential: SpectralSet,
    provenance: Provenance,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OperatorRepr {
    spectrum: SpectralSet,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    essential: Option<SpectralSet>,
}

impl TryFrom<OperatorRepr> for OperatorSpectrum {
    type Error = SpectraError;

    fn try_from(r: OperatorRepr) -> Result<Self, Self::Error> {
        match r.essential {
            None => Ok(OperatorSpectrum::derived(r.spectrum)),
            Some(ess) => OperatorSpectrum::asserted(r.spectrum, ess),
        }
    }
}

impl From<OperatorSpectrum> for OperatorRepr {
    fn from(o: OperatorSpectrum) -> Self {
        let essential = match o.provenance {
            Provenance::Derived => None,
            Provenance::UserAsserted => Some(o.essential),
        };
        OperatorRepr {
            spectrum: o.spectrum,
            essential,
        }
    }
}

impl OperatorSpectrum {
    /// Essential part read off the multiplicities.
    pub fn derived(spectrum: SpectralSet) -> Self {
        let essential = spectrum.essential_part();
        Self {
            spectrum,
            essential,
            provenance: Provenance::Derived,
        }
    }

    /// User-supplied essential part, which must lie inside the spectrum.
    pub fn asserted(spectrum: SpectralSet, essential: SpectralSet) -> Result<Self, SpectraError> {
        if !essential.is_subset_of(&spectrum) {
            return Err(SpectraError::EssentialNotContained { degree: None });
        }
        Ok(Self {
            spectrum,
            essential,
            provenance: Provenance::UserAsserted,
        })
    }

    pub fn empty() -> Self {
        Self::derived(SpectralSet::empty())
    }

    pub fn spectrum(&self) -> &SpectralSet {
        &self.spectrum
    }

    pub fn essential(&self) -> &SpectralSet {
        &self.essential
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }
}

/// Operator spectra indexed by degree; a missing degree is the zero space.
pub type DegreeSpectra = BTreeMap<i64, OperatorSpectrum>;

/// Degrees whose spectrum is nonempty, i.e. whose space is nonzero.
pub fn spectral_support(s: &DegreeSpectra) -> BTreeSet<i64> {
    s.iter()
        .filter(|(_, o)| !o.spectrum.is_empty())
        .map(|(&i, _)| i)
        .collect()
}

/// Spectrum of the product Laplacian in degree `i`: the union over `j + k = i`
/// of `σ_j + σ'_k`, with essential part the union of `ess_j + σ'_k` and `σ_j + ess'_k`.
pub fn product_spectrum(left: &DegreeSpectra, right: &DegreeSpectra, i: i64) -> Result<OperatorSpectrum, SpectraError> {
    let terms: Vec<_> = left
        .iter()
        .filter_map(|(&j, l)| right.get(&(i - j)).map(|r| (l, r)))
        .collect();
    union_of_sums(&terms).map_err(|e| match e {
        SpectraError::EssentialNotContained { .. } => SpectraError::EssentialNotContained { degree: Some(i) },
        other => other,
    })
}

/// Union over the given pairs of the spectrum of `A ⊗ 1 + 1 ⊗ B`.
pub fn union_of_sums(terms: &[(&OperatorSpectrum, &OperatorSpectrum)]) -> Result<OperatorSpectrum, SpectraError> {
    let mut spectra = Vec::new();
    let mut essentials = Vec::new();
    let mut derived = true;
    for (l, r) in terms {
        derived &= l.provenance == Provenance::Derived && r.provenance == Provenance::Derived;
        spectra.push(l.spectrum.minkowski_sum(&r.spectrum)?);
        essentials.push(l.essential.minkowski_sum(&r.spectrum)?);
        essentials.push(l.spectrum.minkowski_sum(&r.essential)?);
    }
    let spectrum = SpectralSet::union_all(&spectra);
    let essential = SpectralSet::union_all(&essentials);
    if !essential.is_subset_of(&spectrum) {
        return Err(SpectraError::EssentialNotContained { degree: None });
    }
    Ok(OperatorSpectrum {
        spectrum,
        essential,
        provenance: if derived {
            Provenance::Derived
        } else {
            Provenance::UserAsserted
        },
    })
}

/// Every supported degree has a spectrum that is neither empty nor `{0}`.
pub fn nondegenerate_spectra_check(s: &DegreeSpectra, support: &BTreeSet<i64>) -> bool {
    support.iter().all(|i| {
        s.get(i)
            .is_some_and(|o| !o.spectrum.is_empty() && !o.spectrum.is_zero_set())
    })
}
