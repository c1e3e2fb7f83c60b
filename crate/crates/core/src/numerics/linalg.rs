use num_complex::Complex64;

use super::{hermitian_eig, ComplexMatrix, EigenDecomposition, NumericsError, Tolerance};

pub const DEFAULT_KRONECKER_CAP: usize = 4096;

/// Thin singular value decomposition `A = U diag(σ) V^*` restricted to the
/// singular values above the rank threshold.
///
/// Computed from whichever Gram matrix (`A A^*` or `A^* A`) is smaller; the
/// other factor is recovered as `A^* U Σ⁻¹` or `A V Σ⁻¹`.
#[derive(Debug, Clone)]
pub struct ThinSvd {
    pub u: ComplexMatrix,
    pub sigma: Vec<f64>,
    pub v: ComplexMatrix,
}

impl ThinSvd {
    pub fn compute(a: &ComplexMatrix, tol: &Tolerance) -> Result<Self, NumericsError> {
        let (m, n) = a.shape();
        if m == 0 || n == 0 {
            return Ok(Self {
                u: ComplexMatrix::zeros(m, 0),
                sigma: Vec::new(),
                v: ComplexMatrix::zeros(n, 0),
            });
        }
        let ad = a.adjoint();
        if m <= n {
            let eig = hermitian_eig(&(a * &ad), tol)?;
            let idx = gram_range(&eig, m.max(n), tol);
            let u = eig.vectors.select_columns(&idx);
            let sigma: Vec<f64> = idx.iter().map(|&k| eig.eigenvalues[k].sqrt()).collect();
            let v = scale_columns(&(&ad * &u), &sigma);
            Ok(Self { u, sigma, v })
        } else {
            let eig = hermitian_eig(&(&ad * a), tol)?;
            let idx = gram_range(&eig, m.max(n), tol);
            let v = eig.vectors.select_columns(&idx);
            let sigma: Vec<f64> = idx.iter().map(|&k| eig.eigenvalues[k].sqrt()).collect();
            let u = scale_columns(&(a * &v), &sigma);
            Ok(Self { u, sigma, v })
        }
    }

    pub fn rank(&self) -> usize {
        self.sigma.len()
    }
}

fn gram_range(eig: &EigenDecomposition, dim: usize, tol: &Tolerance) -> Vec<usize> {
    let tau = tol.rank_threshold(dim, eig.largest_magnitude());
    (0..eig.dim())
        .filter(|&k| eig.eigenvalues[k] > tau && eig.eigenvalues[k] > 0.0)
        .collect()
}

fn scale_columns(a: &ComplexMatrix, sigma: &[f64]) -> ComplexMatrix {
    let mut out = a.clone();
    for (j, s) in sigma.iter().enumerate() {
        for i in 0..out.rows() {
            out[(i, j)] /= *s;
        }
    }
    out
}

/// Moore–Penrose inverse. Singular values at or below the rank threshold are dropped.
pub fn pseudo_inverse(a: &ComplexMatrix, tol: &Tolerance) -> Result<ComplexMatrix, NumericsError> {
    let svd = ThinSvd::compute(a, tol)?;
    let inv: Vec<f64> = svd.sigma.iter().map(|s| 1.0 / s).collect();
    let v_scaled = {
        let mut v = svd.v.clone();
        for (j, s) in inv.iter().enumerate() {
            for i in 0..v.rows() {
                v[(i, j)] *= *s;
            }
        }
        v
    };
    Ok(&v_scaled * &svd.u.adjoint())
}

/// Pseudo-inverse of a Hermitian matrix through its own eigendecomposition.
///
/// Agrees with [`pseudo_inverse`] up to rounding but shares the kernel decision
/// with the eigenvalue count of `A` itself rather than of `A²`.
pub fn hermitian_pseudo_inverse(a: &ComplexMatrix, tol: &Tolerance) -> Result<ComplexMatrix, NumericsError> {
    let eig = hermitian_eig(a, tol)?;
    let n = eig.dim();
    let tau = eig.zero_threshold(tol);
    let mut scaled = eig.vectors.clone();
    for j in 0..n {
        let lambda = eig.eigenvalues[j];
        let f = if lambda.abs() > tau { 1.0 / lambda } else { 0.0 };
        for i in 0..n {
            scaled[(i, j)] *= f;
        }
    }
    Ok(&scaled * &eig.vectors.adjoint())
}

pub fn kronecker(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix, NumericsError> {
    kronecker_capped(a, b, DEFAULT_KRONECKER_CAP)
}

/// `(A⊗B)[i·rows(B)+k, j·cols(B)+l] = A[i,j]·B[k,l]`, refusing results with more
/// than `cap` rows or columns.
pub fn kronecker_capped(a: &ComplexMatrix, b: &ComplexMatrix, cap: usize) -> Result<ComplexMatrix, NumericsError> {
    let rows = a.rows().checked_mul(b.rows());
    let cols = a.cols().checked_mul(b.cols());
    let (rows, cols) = match (rows, cols) {
        (Some(r), Some(c)) if r <= cap && c <= cap => (r, c),
        (r, c) => {
            return Err(NumericsError::SizeOverflow {
                rows: r.unwrap_or(usize::MAX),
                cols: c.unwrap_or(usize::MAX),
                cap,
            })
        }
    };
    let mut out = ComplexMatrix::zeros(rows, cols);
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            let x = a[(i, j)];
            if x == Complex64::new(0.0, 0.0) {
                continue;
            }
            for k in 0..b.rows() {
                for l in 0..b.cols() {
                    out[(i * b.rows() + k, j * b.cols() + l)] = x * b[(k, l)];
                }
            }
        }
    }
    Ok(out)
}

/// Orthonormal basis (as columns) of the numerical range of `A`, from the eigenvectors of `A A^*`.
pub fn range_basis(a: &ComplexMatrix, tol: &Tolerance) -> Result<ComplexMatrix, NumericsError> {
    let (m, n) = a.shape();
    if m == 0 || n == 0 {
        return Ok(ComplexMatrix::zeros(m, 0));
    }
    let eig = hermitian_eig(&(a * &a.adjoint()), tol)?;
    let idx = gram_range(&eig, m.max(n), tol);
    Ok(eig.vectors.select_columns(&idx))
}

/// Orthonormal basis of the orthogonal complement of the range of `A` in its codomain.
pub fn orthonormal_complement(a: &ComplexMatrix, tol: &Tolerance) -> Result<ComplexMatrix, NumericsError> {
    let (m, n) = a.shape();
    if m == 0 || n == 0 {
        return Ok(ComplexMatrix::identity(m));
    }
    let eig = hermitian_eig(&(a * &a.adjoint()), tol)?;
    let keep: std::collections::BTreeSet<usize> = gram_range(&eig, m.max(n), tol).into_iter().collect();
    let idx: Vec<usize> = (0..m).filter(|k| !keep.contains(k)).collect();
    Ok(eig.vectors.select_columns(&idx))
}

/// Orthogonal projection onto the numerical range of `A`.
pub fn range_projection(a: &ComplexMatrix, tol: &Tolerance) -> Result<ComplexMatrix, NumericsError> {
    let q = range_basis(a, tol)?;
    Ok(&q * &q.adjoint())
}

pub fn numeric_rank(a: &ComplexMatrix, tol: &Tolerance) -> Result<usize, NumericsError> {
    Ok(ThinSvd::compute(a, tol)?.rank())
}
