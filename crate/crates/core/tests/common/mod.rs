#![allow(dead_code)]

pub mod dbar;
pub mod normal;
pub mod spectra;

use num_complex::Complex64;
use proptest::prelude::*;
use tensor_hodge::numerics::ComplexMatrix;

pub fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = ComplexMatrix> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), rows * cols).prop_map(move |v| {
        let data = v.into_iter().map(|(re, im)| Complex64::new(re, im)).collect();
        ComplexMatrix::from_vec(rows, cols, data).unwrap()
    })
}

pub fn hermitian(n: usize) -> impl Strategy<Value = ComplexMatrix> {
    matrix(n, n).prop_map(|a| a.hermitian_part())
}

/// Product of an `m×r` and an `r×n` random factor, so the rank is at most `r`.
pub fn low_rank(m: usize, n: usize, r: usize) -> impl Strategy<Value = ComplexMatrix> {
    (matrix(m, r), matrix(r, n)).prop_map(|(b, c)| &b * &c)
}

pub fn sorted_close(a: &[f64], b: &[f64], tol: f64) -> bool {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    a.len() == b.len() && a.iter().zip(&b).all(|(x, y)| (x - y).abs() <= tol)
}
