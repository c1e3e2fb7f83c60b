use proptest::prelude::*;
use tensor_hodge::dbar::{DbarFactorModel, SpaceDim};
use tensor_hodge::spectra::rational::int;
use tensor_hodge::spectra::{Multiplicity, OperatorSpectrum, SpectralAtom, SpectralSet};

use super::spectra::{atoms, multiplicity};

/// A nonempty spectral set without the point 0.
pub fn nonzero_part() -> impl Strategy<Value = SpectralSet> {
    atoms(3).prop_map(|mut a| {
        a.push(SpectralAtom::point(int(1), Multiplicity::ONE));
        SpectralSet::new(a).unwrap().without_zero()
    })
}

fn with_kernel(rest: &SpectralSet, kernel: Option<Multiplicity>) -> OperatorSpectrum {
    let zero = kernel.map(|m| SpectralSet::point(int(0), m).unwrap()).unwrap_or_default();
    OperatorSpectrum::derived(rest.union(&zero))
}

fn kernel_dim(kernel: Option<Multiplicity>) -> Option<SpaceDim> {
    match kernel {
        None => Some(SpaceDim::Finite(0)),
        Some(Multiplicity::Finite(k)) => Some(SpaceDim::Finite(k)),
        Some(Multiplicity::Infinite) => Some(SpaceDim::Infinite),
        Some(Multiplicity::Unquantified) => None,
    }
}

/// A curve: `□_0` and `□_1` share their nonzero part and differ in their
/// kernels. With `unknown_rate > 0` some spectra are left unknown.
pub fn curve(unknown_rate: f64) -> impl Strategy<Value = DbarFactorModel> {
    (
        nonzero_part(),
        prop::option::of(multiplicity()),
        prop::option::of(multiplicity()),
        any::<bool>(),
        prop::collection::vec(prop::bool::weighted(unknown_rate.clamp(0.0, 1.0)), 4),
    )
        .prop_map(|(rest, k0, k1, declare, hide)| {
            let mut m = DbarFactorModel::unknown("curve", 1).unwrap().with_closed_range(true);
            for p in 0..=1 {
                if !hide[2 * p] {
                    m = m.with_box_spectrum(p, 0, with_kernel(&rest, k0)).unwrap();
                }
                if !hide[2 * p + 1] {
                    m = m.with_box_spectrum(p, 1, with_kernel(&rest, k1)).unwrap();
                }
            }
            if declare {
                if let Some(d) = kernel_dim(k0) {
                    m = m.with_bergman_dim(d);
                }
            }
            m.validated().unwrap()
        })
}

/// A factor of complex dimension 2 with independent spectra per bidegree.
pub fn surface() -> impl Strategy<Value = DbarFactorModel> {
    prop::collection::vec((nonzero_part(), prop::option::of(multiplicity())), 9).prop_map(|cells| {
        let mut m = DbarFactorModel::unknown("surface", 2).unwrap().with_closed_range(true);
        for (i, (rest, k)) in cells.into_iter().enumerate() {
            m = m.with_box_spectrum(i / 3, i % 3, with_kernel(&rest, k)).unwrap();
        }
        m.validated().unwrap()
    })
}

pub fn factor() -> impl Strategy<Value = DbarFactorModel> {
    prop_oneof![curve(0.0), surface()]
}
