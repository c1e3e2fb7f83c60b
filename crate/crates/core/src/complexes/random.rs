use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::FiniteComplex;
use crate::numerics::{orthonormal_complement, ComplexMatrix, Tolerance};

fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> ComplexMatrix {
    let data = (0..rows * cols)
        .map(|_| Complex64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0)))
        .collect();
    ComplexMatrix::from_vec(rows, cols, data).expect("finite entries")
}

/// Seeded random complex in degrees `0..dims.len()`.
///
/// Each `d_i` is a random matrix `A_i` (full rank or, by a coin flip, of a random
/// lower rank) composed on the right with the orthogonal projection onto the
/// complement of `range(d_{i−1})`, so `d_i d_{i−1} = 0` up to rounding.
pub fn random_complex(dims: &[usize], seed: u64) -> FiniteComplex {
    let tol = Tolerance::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut differentials = BTreeMap::new();
    let mut previous: Option<ComplexMatrix> = None;
    for i in 0..dims.len().saturating_sub(1) {
        let (n, m) = (dims[i], dims[i + 1]);
        let low_rank = rng.gen_bool(0.5);
        let a = if low_rank && m.min(n) > 1 {
            let r = rng.gen_range(1..m.min(n));
            let b = random_matrix(&mut rng, m, r);
            let c = random_matrix(&mut rng, r, n);
            &b * &c
        } else {
            random_matrix(&mut rng, m, n)
        };
        let d = match &previous {
            Some(prev) if !prev.is_empty() => {
                let q = orthonormal_complement(prev, &tol).expect("Gram matrix of a finite matrix is Hermitian");
                if q.cols() == 0 {
                    ComplexMatrix::zeros(m, n)
                } else {
                    &a * &(&q * &q.adjoint())
                }
            }
            _ => a,
        };
        if m > 0 && n > 0 {
            differentials.insert(i as i64, d.clone());
        }
        previous = Some(d);
    }
    FiniteComplex::new(0, dims.to_vec(), differentials).expect("shapes follow dims")
}
