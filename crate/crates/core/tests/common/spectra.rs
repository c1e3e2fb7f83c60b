use proptest::prelude::*;
use tensor_hodge::spectra::rational::ratio;
use tensor_hodge::spectra::{Multiplicity, SpectralAtom, SpectralSet};

pub fn nonneg_rational(max: i64) -> impl Strategy<Value = tensor_hodge::spectra::Rational> {
    (0..=max * 6, prop::sample::select(vec![1i64, 2, 3, 6])).prop_map(|(n, d)| ratio(n, d))
}

pub fn step() -> impl Strategy<Value = tensor_hodge::spectra::Rational> {
    prop::sample::select(vec![(1, 2), (1, 1), (3, 2), (2, 1), (3, 1), (5, 2), (4, 3), (5, 1)]).prop_map(|(p, q)| ratio(p, q))
}

pub fn multiplicity() -> impl Strategy<Value = Multiplicity> {
    prop_oneof![
        6 => (1u64..=3).prop_map(Multiplicity::Finite),
        1 => Just(Multiplicity::Infinite),
    ]
}

pub fn atom() -> impl Strategy<Value = SpectralAtom> {
    prop_oneof![
        (nonneg_rational(8), multiplicity()).prop_map(|(v, m)| SpectralAtom::point(v, m)),
        (nonneg_rational(6), step(), multiplicity()).prop_map(|(b, s, m)| SpectralAtom::ap(b, s, m)),
    ]
}

pub fn atoms(max: usize) -> impl Strategy<Value = Vec<SpectralAtom>> {
    prop::collection::vec(atom(), 0..=max)
}

pub fn spectral_set(max: usize) -> impl Strategy<Value = SpectralSet> {
    atoms(max).prop_map(|a| SpectralSet::new(a).unwrap())
}

use tensor_hodge::spectra::{DegreeSpectra, FactorSpectra, OperatorSpectrum};

/// Per-degree spectra on degrees `0..=2`; every present degree has a spectrum
/// that is neither empty nor `{0}`.
pub fn degree_spectra() -> impl Strategy<Value = DegreeSpectra> {
    prop::collection::btree_map(0i64..=2, atoms(3), 0..=3).prop_map(|m| {
        m.into_iter()
            .map(|(i, mut a)| {
                a.push(SpectralAtom::point(ratio(1, 1), Multiplicity::ONE));
                (i, OperatorSpectrum::derived(SpectralSet::new(a).unwrap()))
            })
            .collect()
    })
}

pub fn factor() -> impl Strategy<Value = FactorSpectra> {
    (degree_spectra(), any::<bool>()).prop_map(|(degrees, nondegenerate)| FactorSpectra {
        degrees,
        nondegenerate,
        closed_range: Some(true),
    })
}
