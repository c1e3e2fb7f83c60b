use num_complex::Complex64;

use super::{ComplexMatrix, NumericsError};

/// Numerical thresholds shared by every matrix routine.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    /// Bound on `max_j ‖A v_j − λ_j v_j‖`, relative to `max(1, ‖A‖_max)`.
    pub eigen_residual: f64,
    /// Eigenvalues of a positive semidefinite matrix (a Laplacian or a Gram
    /// matrix) at or below `factor · λ_max` count as zero. `None` means the
    /// dimension-scaled default `n · ε`.
    pub rank_threshold_factor: Option<f64>,
    /// Absolute max-norm bound for identity checks (`d∘d = 0`, projector algebra, ...).
    pub identity_check: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            eigen_residual: 1e-9,
            rank_threshold_factor: None,
            identity_check: 1e-8,
        }
    }
}

impl Tolerance {
    pub fn new(eigen_residual: f64, rank_threshold_factor: Option<f64>, identity_check: f64) -> Result<Self, NumericsError> {
        let tol = Self {
            eigen_residual,
            rank_threshold_factor,
            identity_check,
        };
        tol.validate()?;
        Ok(tol)
    }

    pub fn with_identity_check(mut self, identity_check: f64) -> Result<Self, NumericsError> {
        self.identity_check = identity_check;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<(), NumericsError> {
        let ok = |x: f64| x.is_finite() && x > 0.0;
        if !ok(self.eigen_residual) || !ok(self.identity_check) || !self.rank_threshold_factor.map_or(true, ok) {
            return Err(NumericsError::BadTolerance);
        }
        Ok(())
    }

    /// Cut-off below which an eigenvalue of an `n`-dimensional PSD matrix with
    /// largest eigenvalue `largest` is treated as zero.
    pub fn rank_threshold(&self, n: usize, largest: f64) -> f64 {
        let factor = self
            .rank_threshold_factor
            .unwrap_or(n.max(1) as f64 * f64::EPSILON);
        factor * largest.abs()
    }
}

/// Ascending eigenvalues and a unitary matrix whose columns are the matching eigenvectors.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub vectors: ComplexMatrix,
    pub residual: f64,
}

impl EigenDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn largest_magnitude(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
    }

    /// Threshold for deciding which eigenvalues of a PSD matrix vanish.
    pub fn zero_threshold(&self, tol: &Tolerance) -> f64 {
        tol.rank_threshold(self.dim(), self.largest_magnitude())
    }

    /// Indices of eigenvalues at or below the zero threshold.
    pub fn kernel_indices(&self, tol: &Tolerance) -> Vec<usize> {
        let tau = self.zero_threshold(tol);
        (0..self.dim()).filter(|&k| self.eigenvalues[k] <= tau).collect()
    }

    pub fn range_indices(&self, tol: &Tolerance) -> Vec<usize> {
        let tau = self.zero_threshold(tol);
        (0..self.dim()).filter(|&k| self.eigenvalues[k] > tau).collect()
    }

    /// `V diag(λ) V^*`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.dim();
        let mut scaled = self.vectors.clone();
        for j in 0..n {
            for i in 0..n {
                scaled[(i, j)] *= self.eigenvalues[j];
            }
        }
        &scaled * &self.vectors.adjoint()
    }
}

const MAX_SWEEPS: usize = 100;

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi rotations.
///
/// Each rotation first removes the phase of the pivot with a diagonal unitary,
/// then applies the real symmetric rotation that annihilates it.
pub fn hermitian_eig(a: &ComplexMatrix, tol: &Tolerance) -> Result<EigenDecomposition, NumericsError> {
    if !a.is_square() {
        return Err(NumericsError::NotSquare { rows: a.rows(), cols: a.cols() });
    }
    let defect = a.hermitian_defect();
    if defect > tol.identity_check {
        return Err(NumericsError::NotHermitian { defect });
    }
    let n = a.rows();
    let sym = a.hermitian_part();
    if n == 0 {
        return Ok(EigenDecomposition {
            eigenvalues: Vec::new(),
            vectors: ComplexMatrix::zeros(0, 0),
            residual: 0.0,
        });
    }

    let mut m = sym.clone();
    for i in 0..n {
        m[(i, i)].im = 0.0;
    }
    let mut v = ComplexMatrix::identity(n);
    let scale = m.frobenius();

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off == 0.0 || off <= 1e-3 * f64::EPSILON * scale {
            converged = true;
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                rotate(&mut m, &mut v, p, q);
            }
        }
    }
    if !converged {
        return Err(NumericsError::NoConvergence { sweeps: MAX_SWEEPS });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| m[(x, x)].re.total_cmp(&m[(y, y)].re));
    let eigenvalues: Vec<f64> = order.iter().map(|&k| m[(k, k)].re).collect();
    let vectors = v.select_columns(&order);

    let mut residual = 0.0_f64;
    for (j, &lambda) in eigenvalues.iter().enumerate() {
        let col = vectors.col(j);
        let av = sym.mul_vec(&col);
        let r = av
            .iter()
            .zip(&col)
            .map(|(x, y)| (x - y * lambda).norm_sqr())
            .sum::<f64>()
            .sqrt();
        residual = residual.max(r);
    }
    if residual > tol.eigen_residual * sym.max_abs().max(1.0) {
        return Err(NumericsError::NoConvergence { sweeps: MAX_SWEEPS });
    }

    Ok(EigenDecomposition {
        eigenvalues,
        vectors,
        residual,
    })
}

fn rotate(m: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let g = m[(p, q)];
    let abs = g.norm();
    if abs <= f64::MIN_POSITIVE {
        return;
    }
    let n = m.rows();
    let phase = g / abs;
    let phase_conj = phase.conj();
    let app = m[(p, p)].re;
    let aqq = m[(q, q)].re;

    let theta = (aqq - app) / (2.0 * abs);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    // signum(0) is 1, so a zero gap rotates by π/4
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    // U restricted to (p, q) is [[c, s], [-s·ē, c·ē]] with e the pivot phase.
    let u_qp = Complex64::new(-s, 0.0) * phase_conj;
    let u_qq = Complex64::new(c, 0.0) * phase_conj;

    for k in 0..n {
        let mkp = m[(k, p)];
        let mkq = m[(k, q)];
        m[(k, p)] = mkp * c + mkq * u_qp;
        m[(k, q)] = mkp * s + mkq * u_qq;
    }
    for k in 0..n {
        let mpk = m[(p, k)];
        let mqk = m[(q, k)];
        m[(p, k)] = mpk * c + mqk * u_qp.conj();
        m[(q, k)] = mpk * s + mqk * u_qq.conj();
    }
    m[(p, q)] = Complex64::new(0.0, 0.0);
    m[(q, p)] = Complex64::new(0.0, 0.0);
    m[(p, p)].im = 0.0;
    m[(q, q)].im = 0.0;

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * c + vkq * u_qp;
        v[(k, q)] = vkp * s + vkq * u_qq;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close_slice(actual: &[f64], expected: &[f64], tol: f64) {
        assert_eq!(actual.len(), expected.len(), "{actual:?} vs {expected:?}");
        for (a, e) in actual.iter().zip(expected) {
            assert!((a - e).abs() <= tol, "{actual:?} vs {expected:?}");
        }
    }

    #[test]
    fn identity_has_unit_eigenvalues() {
        let eig = hermitian_eig(&ComplexMatrix::identity(3), &Tolerance::default()).unwrap();
        assert_close_slice(&eig.eigenvalues, &[1.0, 1.0, 1.0], 1e-15);
    }

    #[test]
    fn two_by_two_matches_characteristic_roots() {
        // λ² − 4λ + 3 = 0
        let a = ComplexMatrix::from_real_rows(&[&[2.0, 1.0], &[1.0, 2.0]]).unwrap();
        let eig = hermitian_eig(&a, &Tolerance::default()).unwrap();
        assert_close_slice(&eig.eigenvalues, &[1.0, 3.0], 1e-14);
        assert!(eig.reconstruct().max_diff(&a) < 1e-14);
    }

    #[test]
    fn diagonal_is_sorted() {
        let a = ComplexMatrix::from_real_diagonal(&[5.0, 2.0, 0.0]);
        let eig = hermitian_eig(&a, &Tolerance::default()).unwrap();
        assert_eq!(eig.eigenvalues, vec![0.0, 2.0, 5.0]);
    }

    #[test]
    fn complex_hermitian_pauli_y() {
        let i = Complex64::new(0.0, 1.0);
        let a = ComplexMatrix::from_rows(&[vec![Complex64::new(0.0, 0.0), -i], vec![i, Complex64::new(0.0, 0.0)]]).unwrap();
        let eig = hermitian_eig(&a, &Tolerance::default()).unwrap();
        assert_close_slice(&eig.eigenvalues, &[-1.0, 1.0], 1e-15);
        let vtv = &eig.vectors.adjoint() * &eig.vectors;
        assert!(vtv.max_diff(&ComplexMatrix::identity(2)) < 1e-15);
    }

    #[test]
    fn rejects_non_hermitian() {
        let a = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        assert!(matches!(
            hermitian_eig(&a, &Tolerance::default()),
            Err(NumericsError::NotHermitian { .. })
        ));
    }

    #[test]
    fn rejects_non_square() {
        let a = ComplexMatrix::zeros(2, 3);
        assert!(matches!(
            hermitian_eig(&a, &Tolerance::default()),
            Err(NumericsError::NotSquare { .. })
        ));
    }

    #[test]
    fn empty_matrix() {
        let eig = hermitian_eig(&ComplexMatrix::zeros(0, 0), &Tolerance::default()).unwrap();
        assert!(eig.eigenvalues.is_empty());
    }

    #[test]
    fn tolerance_must_be_positive() {
        assert!(Tolerance::new(0.0, None, 1e-8).is_err());
        assert!(Tolerance::new(1e-9, Some(-1.0), 1e-8).is_err());
        assert!(Tolerance::new(1e-9, Some(1e-12), 1e-8).is_ok());
    }
}
