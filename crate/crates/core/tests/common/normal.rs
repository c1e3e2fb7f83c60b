use num_complex::Complex64;
use proptest::prelude::*;
use tensor_hodge::numerics::{hermitian_eig, ComplexMatrix, Tolerance};

use super::hermitian;

/// A random unitary: the eigenvectors of a random Hermitian matrix.
pub fn unitary(n: usize) -> impl Strategy<Value = ComplexMatrix> {
    hermitian(n).prop_map(|h| hermitian_eig(&h, &Tolerance::default()).unwrap().vectors)
}

/// `U diag(d) U^*`.
pub fn conjugate(u: &ComplexMatrix, d: &[Complex64]) -> ComplexMatrix {
    let mut diag = ComplexMatrix::zeros(d.len(), d.len());
    for (i, &z) in d.iter().enumerate() {
        diag[(i, i)] = z;
    }
    &(u * &diag) * &u.adjoint()
}

/// Eigenvalues drawn from a small pool so that repeats are common.
pub fn eigenvalues(n: usize, real: bool) -> impl Strategy<Value = Vec<Complex64>> {
    let pool = prop::collection::vec((-2i32..=2, -2i32..=2, -1.0f64..1.0), 3);
    (pool, prop::collection::vec((0usize..6, any::<bool>()), n)).prop_map(move |(pool, picks)| {
        picks
            .into_iter()
            .map(|(i, from_pool)| {
                let (a, b, x) = pool[i % 3];
                let z = if from_pool {
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
    })
}

/// A commuting normal pair with its joint eigenvalues.
pub fn commuting_pair(max: usize) -> impl Strategy<Value = (ComplexMatrix, ComplexMatrix, Vec<(Complex64, Complex64)>)> {
    (1..=max)
        .prop_flat_map(|n| (unitary(n), eigenvalues(n, false), eigenvalues(n, false)))
        .prop_map(|(u, l, m)| {
            let pairs = l.iter().copied().zip(m.iter().copied()).collect();
            (conjugate(&u, &l), conjugate(&u, &m), pairs)
        })
}

/// A normal matrix with its eigenvalues.
pub fn normal(max: usize) -> impl Strategy<Value = (ComplexMatrix, Vec<Complex64>)> {
    (1..=max)
        .prop_flat_map(|n| (unitary(n), eigenvalues(n, false)))
        .prop_map(|(u, l)| (conjugate(&u, &l), l))
}

/// A positive semidefinite matrix with its eigenvalues.
pub fn psd(max: usize) -> impl Strategy<Value = (ComplexMatrix, Vec<f64>)> {
    (1..=max)
        .prop_flat_map(|n| (unitary(n), eigenvalues(n, true)))
        .prop_map(|(u, l)| {
            let l: Vec<Complex64> = l.into_iter().map(|z| Complex64::new(z.re.abs(), 0.0)).collect();
            let m = conjugate(&u, &l).hermitian_part();
            (m, l.iter().map(|z| z.re).collect())
        })
}
