//! Tensor products of finite complexes.
//!
//! The degree-`i` space of `a ⊗ b` is `⊕_{j+k=i} H_j ⊗ H'_k`, with the blocks laid
//! out by ascending `j` and each block in Kronecker (row-major) order.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::complexes::{ComplexError, FiniteComplex};
use crate::numerics::{kronecker_capped, ComplexMatrix, NumericsError, Tolerance, DEFAULT_KRONECKER_CAP};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TensorError {
    #[error("degree {degree} of the product has dimension {dim}, above the cap of {cap}")]
    SizeOverflow { degree: i64, dim: usize, cap: usize },
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// One summand `H_j ⊗ H'_k` of a product degree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ProductBlock {
    pub j: i64,
    pub k: i64,
    pub offset: usize,
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProductBlockIndex {
    pub degree: i64,
    pub blocks: Vec<ProductBlock>,
}

impl ProductBlockIndex {
    pub fn dim(&self) -> usize {
        self.blocks.iter().map(|b| b.size).sum()
    }

    pub fn find(&self, j: i64, k: i64) -> Option<&ProductBlock> {
        self.blocks.iter().find(|b| b.j == j && b.k == k)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TensorProduct {
    pub complex: FiniteComplex,
    pub index: Vec<ProductBlockIndex>,
}

impl TensorProduct {
    pub fn block_index(&self, i: i64) -> Option<&ProductBlockIndex> {
        self.index.iter().find(|x| x.degree == i)
    }
}

fn block_index(a: &FiniteComplex, b: &FiniteComplex, i: i64) -> ProductBlockIndex {
    let mut offset = 0;
    let mut blocks = Vec::new();
    for j in a.degrees() {
        let k = i - j;
        if !b.in_window(k) {
            continue;
        }
        let size = a.dim(j) * b.dim(k);
        blocks.push(ProductBlock { j, k, offset, size });
        offset += size;
    }
    ProductBlockIndex { degree: i, blocks }
}

fn product_window(a: &FiniteComplex, b: &FiniteComplex) -> Option<(i64, i64)> {
    if a.dims().is_empty() || b.dims().is_empty() {
        None
    } else {
        Some((a.lo() + b.lo(), a.hi() + b.hi()))
    }
}

pub fn tensor_complex(a: &FiniteComplex, b: &FiniteComplex) -> Result<TensorProduct, TensorError> {
    tensor_complex_capped(a, b, DEFAULT_KRONECKER_CAP)
}

/// `a ⊗ b` with differential `d_j ⊗ I + (−1)^j I ⊗ d'_k`, refusing any degree
/// whose dimension exceeds `cap`.
pub fn tensor_complex_capped(a: &FiniteComplex, b: &FiniteComplex, cap: usize) -> Result<TensorProduct, TensorError> {
    assemble(a, b, cap, true)
}

fn assemble(a: &FiniteComplex, b: &FiniteComplex, cap: usize, signed: bool) -> Result<TensorProduct, TensorError> {
    let Some((lo, hi)) = product_window(a, b) else {
        let lo = a.lo() + b.lo();
        return Ok(TensorProduct {
            complex: FiniteComplex::zero(lo, Vec::new()),
            index: Vec::new(),
        });
    };
    let index: Vec<ProductBlockIndex> = (lo..=hi).map(|i| block_index(a, b, i)).collect();
    for idx in &index {
        if idx.dim() > cap {
            return Err(TensorError::SizeOverflow {
                degree: idx.degree,
                dim: idx.dim(),
                cap,
            });
        }
    }
    let dims: Vec<usize> = index.iter().map(ProductBlockIndex::dim).collect();

    let mut differentials = BTreeMap::new();
    for w in index.windows(2) {
        let (src, dst) = (&w[0], &w[1]);
        let mut d = ComplexMatrix::zeros(dst.dim(), src.dim());
        for blk in &src.blocks {
            let (j, k) = (blk.j, blk.k);
            if let Some(t) = dst.find(j + 1, k) {
                let piece = kronecker_capped(&a.d(j), &ComplexMatrix::identity(b.dim(k)), cap)?;
                d.set_block(t.offset, blk.offset, &piece);
            }
            if let Some(t) = dst.find(j, k + 1) {
                let mut piece = kronecker_capped(&ComplexMatrix::identity(a.dim(j)), &b.d(k), cap)?;
                if signed && j.rem_euclid(2) == 1 {
                    piece = -&piece;
                }
                d.set_block(t.offset, blk.offset, &piece);
            }
        }
        if d.max_abs() > 0.0 {
            differentials.insert(src.degree, d);
        }
    }
    let complex = FiniteComplex::new(lo, dims, differentials)?;
    Ok(TensorProduct { complex, index })
}

/// Left fold of [`tensor_complex_capped`] over several factors.
pub fn tensor_fold(factors: &[FiniteComplex], cap: usize) -> Result<FiniteComplex, TensorError> {
    let mut iter = factors.iter();
    let Some(first) = iter.next() else {
        return Ok(FiniteComplex::zero(0, vec![1]));
    };
    let mut acc = first.clone();
    for f in iter {
        acc = tensor_complex_capped(&acc, f, cap)?.complex;
    }
    Ok(acc)
}

/// Per-block Laplacians `Δ_j ⊗ I + I ⊗ Δ'_k` of product degree `i`, in block order.
pub fn product_laplacian_blocks(
    a: &FiniteComplex,
    b: &FiniteComplex,
    i: i64,
    cap: usize,
) -> Result<Vec<(ProductBlock, ComplexMatrix)>, TensorError> {
    let idx = block_index(a, b, i);
    if idx.dim() > cap {
        return Err(TensorError::SizeOverflow {
            degree: i,
            dim: idx.dim(),
            cap,
        });
    }
    idx.blocks
        .iter()
        .map(|blk| {
            let la = a.laplacian(blk.j)?;
            let lb = b.laplacian(blk.k)?;
            let ia = ComplexMatrix::identity(a.dim(blk.j));
            let ib = ComplexMatrix::identity(b.dim(blk.k));
            let m = &kronecker_capped(&la, &ib, cap)? + &kronecker_capped(&ia, &lb, cap)?;
            Ok((*blk, m))
        })
        .collect()
}

/// Max-norm distance between the block-diagonal assembly of
/// [`product_laplacian_blocks`] and the Laplacian of the product complex.
pub fn laplacian_block_residual(a: &FiniteComplex, b: &FiniteComplex, i: i64, cap: usize) -> Result<f64, TensorError> {
    let product = tensor_complex_capped(a, b, cap)?;
    if !product.complex.in_window(i) {
        return Ok(0.0);
    }
    let direct = product.complex.laplacian(i)?;
    let mut assembled = ComplexMatrix::zeros(direct.rows(), direct.cols());
    for (blk, m) in product_laplacian_blocks(a, b, i, cap)? {
        assembled.set_block(blk.offset, blk.offset, &m);
    }
    Ok(assembled.max_diff(&direct))
}

/// Computed and expected cohomology dimension per product degree.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KuennethReport {
    pub degrees: BTreeMap<i64, (usize, usize)>,
    pub pass: bool,
}

/// Compares `dim H^i(a ⊗ b)` with `Σ_{j+k=i} dim H^j(a) · dim H^k(b)`.
pub fn kuenneth_check(
    a: &FiniteComplex,
    b: &FiniteComplex,
    tol: &Tolerance,
    cap: usize,
) -> Result<KuennethReport, TensorError> {
    let product = tensor_complex_capped(a, b, cap)?;
    let ha = a.betti_numbers(tol)?;
    let hb = b.betti_numbers(tol)?;
    let mut degrees = BTreeMap::new();
    for i in product.complex.degrees() {
        let computed = product.complex.cohomology_dim(i, tol)?;
        let expected = ha
            .iter()
            .map(|(&j, &x)| x * hb.get(&(i - j)).copied().unwrap_or(0))
            .sum();
        degrees.insert(i, (computed, expected));
    }
    let pass = degrees.values().all(|(c, e)| c == e);
    Ok(KuennethReport { degrees, pass })
}

/// Comparison of the product Laplacian's eigenvalues in one degree with the
/// union of pairwise sums of factor eigenvalues.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumMatch {
    pub degree: i64,
    pub computed: Vec<f64>,
    pub expected: Vec<f64>,
    pub max_gap: f64,
    pub pass: bool,
}

pub const SPECTRUM_MATCH_GAP: f64 = 1e-7;

/// Matches two multisets after sorting; the gap is infinite when sizes differ.
pub fn sorted_match_gap(computed: &[f64], expected: &[f64]) -> f64 {
    if computed.len() != expected.len() {
        return f64::INFINITY;
    }
    let mut x = computed.to_vec();
    let mut y = expected.to_vec();
    x.sort_by(f64::total_cmp);
    y.sort_by(f64::total_cmp);
    x.iter().zip(&y).fold(0.0, |m, (p, q)| m.max((p - q).abs()))
}

pub fn verify_product_spectrum(
    a: &FiniteComplex,
    b: &FiniteComplex,
    i: i64,
    tol: &Tolerance,
    cap: usize,
) -> Result<SpectrumMatch, TensorError> {
    let product = tensor_complex_capped(a, b, cap)?;
    let mut computed = product.complex.spectrum_multiset(i, tol)?;
    let mut expected = Vec::new();
    for j in a.degrees() {
        let k = i - j;
        if !b.in_window(k) {
            continue;
        }
        let sa = a.spectrum_multiset(j, tol)?;
        let sb = b.spectrum_multiset(k, tol)?;
        expected.extend(sa.iter().flat_map(|x| sb.iter().map(move |y| x + y)));
    }
    computed.sort_by(f64::total_cmp);
    expected.sort_by(f64::total_cmp);
    let max_gap = sorted_match_gap(&computed, &expected);
    Ok(SpectrumMatch {
        degree: i,
        computed,
        expected,
        max_gap,
        pass: max_gap <= SPECTRUM_MATCH_GAP,
    })
}
