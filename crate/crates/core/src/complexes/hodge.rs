use std::collections::BTreeMap;

use serde::Serialize;

use super::{ComplexError, FiniteComplex};
use crate::numerics::{
    hermitian_eig, hermitian_pseudo_inverse, numeric_rank, pseudo_inverse, range_projection, ComplexMatrix,
    EigenDecomposition, Tolerance,
};

/// Eigenvalues below `-PSD_SLACK · max(1, λ_max)` are reported as an error.
const PSD_SLACK: f64 = 1e-9;

/// `max ‖d_{i+1} d_i‖_max` for each degree of the window.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub residuals: BTreeMap<i64, f64>,
    pub pass: bool,
}

impl ValidationReport {
    pub fn max_residual(&self) -> f64 {
        self.residuals.values().fold(0.0, |m, &r| m.max(r))
    }
}

/// Laplacians of every degree in the window together with their eigendecompositions.
#[derive(Debug, Clone)]
pub struct LaplacianBundle {
    pub lo: i64,
    pub laplacians: Vec<ComplexMatrix>,
    pub eigen: Vec<EigenDecomposition>,
}

impl LaplacianBundle {
    pub fn get(&self, i: i64) -> Option<(&ComplexMatrix, &EigenDecomposition)> {
        let k = usize::try_from(i - self.lo).ok()?;
        Some((self.laplacians.get(k)?, self.eigen.get(k)?))
    }
}

/// Orthogonal decomposition `H_i = ker Δ_i ⊕ im d_{i−1} ⊕ im d_i^*`.
#[derive(Debug, Clone)]
pub struct HodgeSplit {
    pub degree: i64,
    pub harmonic: ComplexMatrix,
    pub range_d: ComplexMatrix,
    pub range_dstar: ComplexMatrix,
    pub harmonic_dim: usize,
}

impl HodgeSplit {
    /// Largest deviation from "three Hermitian idempotents, pairwise orthogonal, summing to I".
    pub fn max_defect(&self) -> f64 {
        let ps = [&self.harmonic, &self.range_d, &self.range_dstar];
        let n = self.harmonic.rows();
        let mut worst = 0.0_f64;
        for p in ps {
            worst = worst.max(p.hermitian_defect());
            worst = worst.max((p * p).max_diff(p));
        }
        for a in 0..3 {
            for b in 0..3 {
                if a != b {
                    worst = worst.max((ps[a] * ps[b]).max_abs());
                }
            }
        }
        let sum = &(&self.harmonic + &self.range_d) + &self.range_dstar;
        worst.max(sum.max_diff(&ComplexMatrix::identity(n)))
    }
}

/// Max-norm residuals of the solution-operator identities at one degree.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityReport {
    pub degree: i64,
    pub residuals: BTreeMap<String, f64>,
    pub pass: bool,
}

impl IdentityReport {
    pub fn max_residual(&self) -> f64 {
        self.residuals.values().fold(0.0, |m, &r| m.max(r))
    }
}

/// Sizes of the differentials entering and leaving a degree.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegreeTouch {
    pub degree: i64,
    pub incoming: f64,
    pub outgoing: f64,
    pub touched: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NondegeneracyReport {
    pub nondegenerate: bool,
    pub degrees: Vec<DegreeTouch>,
}

impl NondegeneracyReport {
    pub fn untouched(&self) -> Vec<i64> {
        self.degrees.iter().filter(|w| !w.touched).map(|w| w.degree).collect()
    }
}

impl FiniteComplex {
    pub fn validate(&self, tol: &Tolerance) -> ValidationReport {
        let residuals: BTreeMap<i64, f64> = self
            .degrees()
            .map(|i| {
                let r = match (self.differentials.get(&i), self.differentials.get(&(i + 1))) {
                    (Some(a), Some(b)) => (b * a).max_abs(),
                    _ => 0.0,
                };
                (i, r)
            })
            .collect();
        let pass = residuals.values().all(|&r| r <= tol.identity_check);
        ValidationReport { residuals, pass }
    }

    /// `Δ_i = d_i^* d_i + d_{i−1} d_{i−1}^*`.
    pub fn laplacian(&self, i: i64) -> Result<ComplexMatrix, ComplexError> {
        self.check_degree(i)?;
        Ok(self.laplacian_unchecked(i))
    }

    pub(crate) fn laplacian_unchecked(&self, i: i64) -> ComplexMatrix {
        let out = self.d(i);
        let inc = self.d(i - 1);
        &(&out.adjoint() * &out) + &(&inc * &inc.adjoint())
    }

    fn laplacian_eig(&self, i: i64, tol: &Tolerance) -> Result<(ComplexMatrix, EigenDecomposition), ComplexError> {
        let lap = self.laplacian_unchecked(i);
        let eig = hermitian_eig(&lap, tol)?;
        let floor = -PSD_SLACK * eig.largest_magnitude().max(1.0);
        if let Some(&bad) = eig.eigenvalues.iter().find(|&&x| x < floor) {
            return Err(ComplexError::NotPositive { degree: i, eigenvalue: bad });
        }
        Ok((lap, eig))
    }

    pub fn laplacian_bundle(&self, tol: &Tolerance) -> Result<LaplacianBundle, ComplexError> {
        let mut laplacians = Vec::new();
        let mut eigen = Vec::new();
        for i in self.degrees() {
            let (lap, eig) = self.laplacian_eig(i, tol)?;
            laplacians.push(lap);
            eigen.push(eig);
        }
        Ok(LaplacianBundle {
            lo: self.lo(),
            laplacians,
            eigen,
        })
    }

    pub fn hodge(&self, i: i64, tol: &Tolerance) -> Result<HodgeSplit, ComplexError> {
        self.check_degree(i)?;
        let (_, eig) = self.laplacian_eig(i, tol)?;
        let kernel = eig.kernel_indices(tol);
        let q = eig.vectors.select_columns(&kernel);
        Ok(HodgeSplit {
            degree: i,
            harmonic: &q * &q.adjoint(),
            range_d: range_projection(&self.d(i - 1), tol)?,
            range_dstar: range_projection(&self.d(i).adjoint(), tol)?,
            harmonic_dim: kernel.len(),
        })
    }

    /// Dimension of the (reduced) cohomology in degree `i`, computed as
    /// `dim ker Δ_i` and cross-checked against rank-nullity.
    pub fn cohomology_dim(&self, i: i64, tol: &Tolerance) -> Result<usize, ComplexError> {
        self.check_degree(i)?;
        let (_, eig) = self.laplacian_eig(i, tol)?;
        let kernel = eig.kernel_indices(tol).len();
        let rank_out = numeric_rank(&self.d(i), tol)? as i64;
        let rank_in = numeric_rank(&self.d(i - 1), tol)? as i64;
        let rank_nullity = self.dim(i) as i64 - rank_out - rank_in;
        if rank_nullity != kernel as i64 {
            return Err(ComplexError::InconsistentRank {
                degree: i,
                kernel,
                rank_nullity,
            });
        }
        Ok(kernel)
    }

    pub fn betti_numbers(&self, tol: &Tolerance) -> Result<BTreeMap<i64, usize>, ComplexError> {
        self.degrees().map(|i| Ok((i, self.cohomology_dim(i, tol)?))).collect()
    }

    /// Minimal solution operator `S_i : H_i → H_{i−1}`, the pseudo-inverse of
    /// `d_{i−1}` (zero on the orthogonal complement of its range).
    pub fn solution_operator(&self, i: i64, tol: &Tolerance) -> Result<ComplexMatrix, ComplexError> {
        self.check_degree(i)?;
        Ok(pseudo_inverse(&self.d(i - 1), tol)?)
    }

    /// `N_i`, the inverse of `Δ_i` on the complement of its kernel, zero on the kernel.
    pub fn laplacian_inverse(&self, i: i64, tol: &Tolerance) -> Result<ComplexMatrix, ComplexError> {
        self.check_degree(i)?;
        Ok(self.laplacian_inverse_unchecked(i, tol)?)
    }

    fn laplacian_inverse_unchecked(&self, i: i64, tol: &Tolerance) -> Result<ComplexMatrix, ComplexError> {
        Ok(hermitian_pseudo_inverse(&self.laplacian_unchecked(i), tol)?)
    }

    pub fn check_identities(&self, i: i64, tol: &Tolerance) -> Result<IdentityReport, ComplexError> {
        self.check_degree(i)?;
        let d_in = self.d(i - 1);
        let d_out = self.d(i);
        let n_i = self.laplacian_inverse_unchecked(i, tol)?;
        let n_next = self.laplacian_inverse_unchecked(i + 1, tol)?;
        let s_i = pseudo_inverse(&d_in, tol)?;
        let s_next = pseudo_inverse(&d_out, tol)?;

        let mut residuals = BTreeMap::new();
        residuals.insert(
            "solution_is_adjoint_times_inverse".to_string(),
            s_i.max_diff(&(&d_in.adjoint() * &n_i)),
        );
        let not_kernel = range_projection(&d_out.adjoint(), tol)?;
        residuals.insert(
            "kernel_complement_projection".to_string(),
            not_kernel.max_diff(&(&(&d_out.adjoint() * &n_next) * &d_out)),
        );
        residuals.insert(
            "inverse_commutes_with_d".to_string(),
            (&d_out * &n_i).max_diff(&(&n_next * &d_out)),
        );
        let sum = &(&s_i.adjoint() * &s_i) + &(&s_next * &s_next.adjoint());
        residuals.insert("inverse_from_solution_operators".to_string(), n_i.max_diff(&sum));

        let pass = residuals.values().all(|&r| r <= tol.identity_check);
        Ok(IdentityReport {
            degree: i,
            residuals,
            pass,
        })
    }

    /// Best `C` in `‖x‖² ≤ C (‖d_i x‖² + ‖d_{i−1}^* x‖²)` for `x ⊥ ker Δ_i`:
    /// the reciprocal of the smallest nonzero eigenvalue of `Δ_i`. Infinite
    /// when `Δ_i` vanishes on a nonzero space, zero on an empty space.
    pub fn basic_estimate_constant(&self, i: i64, tol: &Tolerance) -> Result<f64, ComplexError> {
        self.check_degree(i)?;
        if self.dim(i) == 0 {
            return Ok(0.0);
        }
        let (_, eig) = self.laplacian_eig(i, tol)?;
        Ok(eig
            .range_indices(tol)
            .first()
            .map_or(f64::INFINITY, |&k| 1.0 / eig.eigenvalues[k]))
    }

    /// Ascending eigenvalues of `Δ_i`; values at or below the zero threshold are set to 0.
    pub fn spectrum_multiset(&self, i: i64, tol: &Tolerance) -> Result<Vec<f64>, ComplexError> {
        if !self.in_window(i) {
            return Ok(Vec::new());
        }
        let (_, eig) = self.laplacian_eig(i, tol)?;
        let tau = eig.zero_threshold(tol);
        Ok(eig
            .eigenvalues
            .iter()
            .map(|&x| if x <= tau { 0.0 } else { x })
            .collect())
    }

    /// Whether every nonzero space is touched by a nonzero differential.
    pub fn is_nondegenerate(&self, tol: &Tolerance) -> NondegeneracyReport {
        let degrees: Vec<DegreeTouch> = self
            .support()
            .into_iter()
            .map(|i| {
                let incoming = self.d(i - 1).max_abs();
                let outgoing = self.d(i).max_abs();
                DegreeTouch {
                    degree: i,
                    incoming,
                    outgoing,
                    touched: incoming > tol.identity_check || outgoing > tol.identity_check,
                }
            })
            .collect();
        NondegeneracyReport {
            nondegenerate: degrees.iter().all(|w| w.touched),
            degrees,
        }
    }
}
