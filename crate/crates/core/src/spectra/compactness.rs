use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::operator::{nondegenerate_spectra_check, product_spectrum, spectral_support, DegreeSpectra};
use super::{SpectraError, SpectralSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Compact,
    NonCompact,
    Undecidable,
}

/// The argument that produced a verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    /// A factor does not attest closed range, so the inverse Laplacian may be unbounded.
    ClosedRangeNotAttested,
    /// Some needed spectrum is unknown.
    SpectralDataMissing,
    /// Each `ess_j + σ'_k` and `σ_j + ess'_k` lies in `{0}`.
    EssentialWithinZero,
    /// Under nondegeneracy: every supported factor degree has empty essential spectrum.
    FactorEssentialEmpty,
    /// Under nondegeneracy: the product essential spectrum is empty.
    ProductEssentialEmpty,
    /// A factor has an infinite-dimensional Bergman space.
    InfiniteBergmanSpace,
    /// Read off the essential spectrum of the product Laplacian directly.
    EssentialSpectrumFormula,
    /// Non-compactness in the lowest form degree spreads to all degrees below the top.
    BottomDegreePropagation,
    /// Non-compactness in the top form degree spreads to all degrees above the lowest.
    TopDegreePropagation,
    /// Non-compactness in one middle degree spreads to every middle degree.
    MiddleDegreePropagation,
    /// A non-compact first solution operator makes every degree non-compact.
    FirstSolutionOperator,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CompactnessReport {
    pub verdict: Verdict,
    pub rule: Rule,
    /// Degree, bidegree, or form degree the verdict is about.
    pub location: Vec<i64>,
    /// Index tuples responsible for non-compactness (or for missing data).
    pub witnesses: Vec<Vec<i64>>,
    /// Every criterion that was evaluated, by name.
    pub criteria: BTreeMap<String, bool>,
    /// Essential spectrum at `location`, when it could be computed.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub essential: Option<SpectralSet>,
    pub trace: Vec<String>,
}

impl CompactnessReport {
    pub fn new(verdict: Verdict, rule: Rule, location: Vec<i64>) -> Self {
        Self {
            verdict,
            rule,
            location,
            witnesses: Vec::new(),
            criteria: BTreeMap::new(),
            essential: None,
            trace: Vec::new(),
        }
    }
}

/// Spectral data of one factor complex for the compactness decision.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorSpectra {
    pub degrees: DegreeSpectra,
    /// Asserted nondegeneracy; only used when the spectra agree.
    #[serde(default)]
    pub nondegenerate: bool,
    /// `Some(true)` attests closed range in every degree.
    #[serde(default)]
    pub closed_range: Option<bool>,
}

impl FactorSpectra {
    /// Asserted nondegeneracy confirmed by the spectra.
    pub fn effectively_nondegenerate(&self) -> bool {
        self.nondegenerate && nondegenerate_spectra_check(&self.degrees, &spectral_support(&self.degrees))
    }
}

fn pairs(left: &DegreeSpectra, right: &DegreeSpectra, i: i64) -> Vec<(i64, i64)> {
    left.keys().filter(|&&j| right.contains_key(&(i - j))).map(|&j| (j, i - j)).collect()
}

/// `ess_j + σ'_k ⊆ {0}` and `σ_j + ess'_k ⊆ {0}` for all `j + k = i`; returns
/// the pairs where it fails.
pub fn criterion_essential_within_zero(left: &DegreeSpectra, right: &DegreeSpectra, i: i64) -> Result<Vec<(i64, i64)>, SpectraError> {
    let mut failing = Vec::new();
    for (j, k) in pairs(left, right, i) {
        let (l, r) = (&left[&j], &right[&k]);
        let a = l.essential().minkowski_sum(r.spectrum())?;
        let b = l.spectrum().minkowski_sum(r.essential())?;
        if !a.within_zero() || !b.within_zero() {
            failing.push((j, k));
        }
    }
    Ok(failing)
}

/// `ess_j = ess'_k = ∅` for supported `j`, `k` with `j + k = i`; returns the failing pairs.
pub fn criterion_factor_essential_empty(left: &DegreeSpectra, right: &DegreeSpectra, i: i64) -> Vec<(i64, i64)> {
    let ls = spectral_support(left);
    let rs = spectral_support(right);
    ls.iter()
        .filter(|&&j| rs.contains(&(i - j)))
        .filter(|&&j| !left[&j].essential().is_empty() || !right[&(i - j)].essential().is_empty())
        .map(|&j| (j, i - j))
        .collect()
}

/// Essential spectrum of the product Laplacian in degree `i`.
pub fn criterion_product_essential(left: &DegreeSpectra, right: &DegreeSpectra, i: i64) -> Result<SpectralSet, SpectraError> {
    Ok(product_spectrum(left, right, i)?.essential().clone())
}

/// Decides compactness of the inverse Laplacian of `left ⊗ right` in degree `i`.
///
/// Without nondegeneracy the decision is "product essential spectrum within
/// `{0}`". With both factors nondegenerate the stronger emptiness criteria are
/// evaluated as well and must agree.
pub fn compactness_verdict(left: &FactorSpectra, right: &FactorSpectra, i: i64) -> Result<CompactnessReport, SpectraError> {
    let (Some(lc), Some(rc)) = (left.closed_range, right.closed_range) else {
        let side = if left.closed_range.is_none() { "left" } else { "right" };
        return Err(SpectraError::MissingAttestation(side.to_string()));
    };
    if !lc || !rc {
        let mut r = CompactnessReport::new(Verdict::Undecidable, Rule::ClosedRangeNotAttested, vec![i]);
        r.trace.push("closed range is not attested for both factors".into());
        return Ok(r);
    }

    let failing = criterion_essential_within_zero(&left.degrees, &right.degrees, i)?;
    let within_zero = failing.is_empty();
    let essential = criterion_product_essential(&left.degrees, &right.degrees, i)?;
    let mut criteria = BTreeMap::from([("essential-within-zero".to_string(), within_zero)]);

    let nondegenerate = left.effectively_nondegenerate() && right.effectively_nondegenerate();
    let (rule, witnesses) = if nondegenerate {
        let factor_failing = criterion_factor_essential_empty(&left.degrees, &right.degrees, i);
        let product_empty = essential.is_empty();
        criteria.insert("factor-essential-empty".into(), factor_failing.is_empty());
        criteria.insert("product-essential-empty".into(), product_empty);
        if factor_failing.is_empty() != within_zero || product_empty != within_zero {
            return Err(SpectraError::CriteriaDisagree { degree: i });
        }
        (Rule::FactorEssentialEmpty, factor_failing)
    } else {
        (Rule::EssentialWithinZero, failing)
    };

    let verdict = if within_zero {
        Verdict::Compact
    } else {
        Verdict::NonCompact
    };
    let mut report = CompactnessReport::new(verdict, rule, vec![i]);
    report.witnesses = witnesses.into_iter().map(|(j, k)| vec![j, k]).collect();
    report.criteria = criteria;
    report.essential = Some(essential);
    report
        .trace
        .push(format!("factors {}nondegenerate", if nondegenerate { "" } else { "not known to be " }));
    Ok(report)
}
