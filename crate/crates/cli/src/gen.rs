//! Seeded generators for the fuzz suites.

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use tensor_hodge::complexes::{random_complex, FiniteComplex};
use tensor_hodge::dbar::{DbarFactorModel, SpaceDim};
use tensor_hodge::numerics::{hermitian_eig, ComplexMatrix, Tolerance};
use tensor_hodge::spectra::rational::{int, ratio};
use tensor_hodge::spectra::{DegreeSpectra, FactorSpectra, Multiplicity, OperatorSpectrum, Rational, SpectralAtom, SpectralSet};

/// Complex with between one and `max_len` degrees, each of dimension at most `max_dim`.
pub fn complex(rng: &mut ChaCha8Rng, max_len: usize, max_dim: usize) -> FiniteComplex {
    let len = rng.gen_range(1..=max_len);
    let dims: Vec<usize> = (0..len).map(|_| rng.gen_range(0..=max_dim)).collect();
    random_complex(&dims, rng.gen())
}

fn nonneg_rational(rng: &mut ChaCha8Rng, max: i64) -> Rational {
    let d = *[1i64, 2, 3, 6].choose(rng).expect("nonempty");
    ratio(rng.gen_range(0..=max * 6), d)
}

fn step(rng: &mut ChaCha8Rng) -> Rational {
    let (p, q) = *[(1, 2), (1, 1), (3, 2), (2, 1), (3, 1), (5, 2), (4, 3), (5, 1)]
        .choose(rng)
        .expect("nonempty");
    ratio(p, q)
}

pub fn multiplicity(rng: &mut ChaCha8Rng) -> Multiplicity {
    if rng.gen_ratio(1, 7) {
        Multiplicity::Infinite
    } else {
        Multiplicity::Finite(rng.gen_range(1..=3))
    }
}

pub fn atom(rng: &mut ChaCha8Rng) -> SpectralAtom {
    if rng.gen_bool(0.5) {
        SpectralAtom::point(nonneg_rational(rng, 8), multiplicity(rng))
    } else {
        SpectralAtom::ap(nonneg_rational(rng, 6), step(rng), multiplicity(rng))
    }
}

pub fn atoms(rng: &mut ChaCha8Rng, max: usize) -> Vec<SpectralAtom> {
    let n = rng.gen_range(0..=max);
    (0..n).map(|_| atom(rng)).collect()
}

pub fn spectral_set(rng: &mut ChaCha8Rng, max: usize) -> SpectralSet {
    SpectralSet::new(atoms(rng, max)).expect("generated atoms are valid")
}

/// Spectra on a random subset of degrees `0..=2`, each neither empty nor `{0}`.
pub fn degree_spectra(rng: &mut ChaCha8Rng) -> DegreeSpectra {
    let mut out = DegreeSpectra::new();
    for i in 0..=2 {
        if rng.gen_bool(0.6) {
            let mut a = atoms(rng, 3);
            a.push(SpectralAtom::point(int(1), Multiplicity::ONE));
            out.insert(i, OperatorSpectrum::derived(SpectralSet::new(a).expect("valid atoms")));
        }
    }
    out
}

pub fn factor_spectra(rng: &mut ChaCha8Rng) -> FactorSpectra {
    FactorSpectra {
        degrees: degree_spectra(rng),
        nondegenerate: rng.gen(),
        closed_range: Some(true),
    }
}

fn with_kernel(rest: &SpectralSet, kernel: Option<Multiplicity>) -> OperatorSpectrum {
    let zero = kernel
        .map(|m| SpectralSet::point(int(0), m).expect("valid point"))
        .unwrap_or_default();
    OperatorSpectrum::derived(rest.union(&zero))
}

/// A curve whose `□_0` and `□_1` share their nonzero part; each of the four
/// spectra is left unknown with probability `unknown_rate`.
pub fn curve(rng: &mut ChaCha8Rng, unknown_rate: f64) -> DbarFactorModel {
    let mut a = atoms(rng, 3);
    a.push(SpectralAtom::point(int(1), Multiplicity::ONE));
    let rest = SpectralSet::new(a).expect("valid atoms").without_zero();
    let mut kernel = || rng.gen_bool(0.5).then(|| multiplicity(rng));
    let (k0, k1) = (kernel(), kernel());
    let declare = rng.gen_bool(0.5);
    let mut m = DbarFactorModel::unknown("curve", 1)
        .expect("dimension 1")
        .with_closed_range(true);
    for p in 0..=1 {
        if !rng.gen_bool(unknown_rate) {
            m = m.with_box_spectrum(p, 0, with_kernel(&rest, k0)).expect("in range");
        }
        if !rng.gen_bool(unknown_rate) {
            m = m.with_box_spectrum(p, 1, with_kernel(&rest, k1)).expect("in range");
        }
    }
    if declare {
        let dim = match k0 {
            None => Some(SpaceDim::Finite(0)),
            Some(Multiplicity::Finite(k)) => Some(SpaceDim::Finite(k)),
            Some(Multiplicity::Infinite) => Some(SpaceDim::Infinite),
            Some(Multiplicity::Unquantified) => None,
        };
        if let Some(d) = dim {
            m = m.with_bergman_dim(d);
        }
    }
    m.validated().expect("generated curves are consistent")
}

fn matrix(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    let data = (0..n * n)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    ComplexMatrix::from_vec(n, n, data).expect("finite entries")
}

/// Eigenvectors of a random Hermitian matrix.
fn unitary(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    hermitian_eig(&matrix(rng, n).hermitian_part(), &Tolerance::default())
        .expect("Hermitian input")
        .vectors
}

fn conjugate(u: &ComplexMatrix, d: &[Complex64]) -> ComplexMatrix {
    let mut diag = ComplexMatrix::zeros(d.len(), d.len());
    for (i, &z) in d.iter().enumerate() {
        diag[(i, i)] = z;
    }
    &(u * &diag) * &u.adjoint()
}

/// Eigenvalues drawn partly from a small pool of half-integers, so repeats are common.
fn eigenvalues(rng: &mut ChaCha8Rng, n: usize, real: bool) -> Vec<Complex64> {
    let pool: Vec<(i32, i32, f64)> = (0..3)
        .map(|_| (rng.gen_range(-2..=2), rng.gen_range(-2..=2), rng.gen_range(-1.0..1.0)))
        .collect();
    (0..n)
        .map(|_| {
            let i = rng.gen_range(0..6usize);
            let (a, b, x) = pool[i % 3];
            let z = if rng.gen() {
                Complex64::new(a as f64 / 2.0, b as f64 / 2.0)
            } else {
                Complex64::new(x, x * 0.7 + 0.1 * i as f64)
            };
            if real {
                Complex64::new(z.re, 0.0)
            } else {
                z
            }
        })
        .collect()
}

/// Random normal matrix of size `1..=max` with its eigenvalues.
pub fn normal(rng: &mut ChaCha8Rng, max: usize) -> (ComplexMatrix, Vec<Complex64>) {
    let n = rng.gen_range(1..=max);
    let u = unitary(rng, n);
    let l = eigenvalues(rng, n, false);
    (conjugate(&u, &l), l)
}

/// Random positive semidefinite matrix of size `1..=max`.
pub fn psd(rng: &mut ChaCha8Rng, max: usize) -> ComplexMatrix {
    let n = rng.gen_range(1..=max);
    let u = unitary(rng, n);
    let l: Vec<Complex64> = eigenvalues(rng, n, true)
        .into_iter()
        .map(|z| Complex64::new(z.re.abs(), 0.0))
        .collect();
    conjugate(&u, &l).hermitian_part()
}
