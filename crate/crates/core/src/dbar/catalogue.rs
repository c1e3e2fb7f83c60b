use super::{DbarFactorModel, SpaceDim};
use crate::spectra::rational::int;
use crate::spectra::{Multiplicity, OperatorSpectrum, SpectralAtom, SpectralSet};

pub const ABSTRACT_COMPACT_FACTOR: &str = "abstract-compact-factor";
pub const INFINITE_BERGMAN_FACTOR: &str = "infinite-bergman-factor";
pub const GAUSSIAN_WEIGHT_LINE: &str = "gaussian-weight-line";

/// Truncation used when the weighted-line entry was frozen.
pub const GAUSSIAN_WEIGHT_LINE_TRUNCATION: u32 = 6;

/// Output of `derive_gaussian_line_model(GAUSSIAN_WEIGHT_LINE_TRUNCATION)`,
/// `thodge catalogue --derive` recomputes it and reports whether it still matches.
const GAUSSIAN_WEIGHT_LINE_JSON: &str = include_str!("gaussian_weight_line.json");

fn op(atoms: Vec<SpectralAtom>) -> OperatorSpectrum {
    OperatorSpectrum::derived(SpectralSet::new(atoms).expect("catalogue atoms are valid"))
}

fn curve(name: &str, bottom: OperatorSpectrum, top: OperatorSpectrum, dims: [SpaceDim; 2]) -> DbarFactorModel {
    let mut m = DbarFactorModel::unknown(name, 1)
        .expect("dimension 1")
        .with_closed_range(true)
        .with_bergman_dim(dims[0]);
    for p in 0..=1 {
        m = m
            .with_box_spectrum(p, 0, bottom.clone())
            .and_then(|m| m.with_box_spectrum(p, 1, top.clone()))
            .and_then(|m| m.with_cohomology_dim(p, 0, dims[0]))
            .and_then(|m| m.with_cohomology_dim(p, 1, dims[1]))
            .expect("bidegrees within range");
    }
    m.validated().expect("catalogue entries are valid")
}

/// A curve with one-dimensional cohomology and purely discrete spectrum.
fn abstract_compact_factor() -> DbarFactorModel {
    let s = op(vec![
        SpectralAtom::point(int(0), Multiplicity::ONE),
        SpectralAtom::ap(int(1), int(1), Multiplicity::Finite(2)),
    ]);
    curve(ABSTRACT_COMPACT_FACTOR, s.clone(), s, [SpaceDim::Finite(1); 2])
}

/// A disc-like curve: infinitely many holomorphic `L²` functions, and no
/// other essential spectrum.
fn infinite_bergman_factor() -> DbarFactorModel {
    let rest = SpectralAtom::ap(int(2), int(2), Multiplicity::ONE);
    curve(
        INFINITE_BERGMAN_FACTOR,
        op(vec![SpectralAtom::point(int(0), Multiplicity::Infinite), rest.clone()]),
        op(vec![rest]),
        [SpaceDim::Infinite, SpaceDim::Finite(0)],
    )
}

fn gaussian_weight_line() -> DbarFactorModel {
    serde_json::from_str(GAUSSIAN_WEIGHT_LINE_JSON).expect("frozen catalogue entry parses")
}

/// Named factor models for use in scenarios.
pub fn builtin_models() -> Vec<DbarFactorModel> {
    vec![abstract_compact_factor(), infinite_bergman_factor(), gaussian_weight_line()]
}

pub fn builtin_model(name: &str) -> Option<DbarFactorModel> {
    builtin_models().into_iter().find(|m| m.name() == name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dbar::{derive_gaussian_line_model, neumann_compactness};
    use crate::spectra::Verdict;

    #[test]
    fn frozen_gaussian_entry_matches_its_derivation() {
        let derived = derive_gaussian_line_model(GAUSSIAN_WEIGHT_LINE_TRUNCATION).unwrap();
        assert_eq!(derived, gaussian_weight_line());
        assert_eq!(
            serde_json::to_string_pretty(&derived).unwrap().trim(),
            GAUSSIAN_WEIGHT_LINE_JSON.trim()
        );
    }

    #[test]
    fn catalogue_names_are_distinct() {
        let models = builtin_models();
        assert!(models.len() >= 3);
        for name in [ABSTRACT_COMPACT_FACTOR, INFINITE_BERGMAN_FACTOR, GAUSSIAN_WEIGHT_LINE] {
            assert_eq!(models.iter().filter(|m| m.name() == name).count(), 1);
        }
    }

    #[test]
    fn compact_factor_pairs_compactly_with_itself() {
        let x = builtin_model(ABSTRACT_COMPACT_FACTOR).unwrap();
        for p in 0..=2 {
            for q in 0..=2 {
                assert_eq!(neumann_compactness(&x, &x, p, q).unwrap().verdict, Verdict::Compact);
            }
        }
    }

    #[test]
    fn infinite_bergman_factor_breaks_every_pairing_at_the_bottom() {
        let x = builtin_model(INFINITE_BERGMAN_FACTOR).unwrap();
        for y in builtin_models() {
            assert_eq!(neumann_compactness(&x, &y, 0, 0).unwrap().verdict, Verdict::NonCompact, "{}", y.name());
            assert_eq!(neumann_compactness(&y, &x, 0, 0).unwrap().verdict, Verdict::NonCompact, "{}", y.name());
        }
    }
}
