//! Joint spectra of commuting normal pairs by simultaneous diagonalization, and
//! the spectrum of `T ⊗ 1 + 1 ⊗ S` for positive pairs.

use std::cmp::Ordering;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::numerics::{hermitian_eig, kronecker_capped, ComplexMatrix, NumericsError, Tolerance, DEFAULT_KRONECKER_CAP};
use crate::spectra::{rational::Rational, Multiplicity, SpectraError, SpectralAtom, SpectralSet};
use crate::tensor::{sorted_match_gap, SPECTRUM_MATCH_GAP};

/// Eigenvalues of a positive operator may dip this far below zero.
pub const PSD_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum JointError {
    #[error("{operator} is not normal: ‖AA* − A*A‖ = {defect:e}")]
    NotNormal { operator: &'static str, defect: f64 },
    #[error("the pair does not commute: ‖TS − ST‖ = {norm:e}")]
    NotCommuting { norm: f64 },
    #[error("{operator} is not Hermitian: defect {defect:e}")]
    NotHermitian { operator: &'static str, defect: f64 },
    #[error("{operator} is not positive: smallest eigenvalue {min_eigenvalue:e}")]
    NotPsd { operator: &'static str, min_eigenvalue: f64 },
    #[error("T is {t}×{t} but S is {s}×{s}")]
    SizeMismatch { t: usize, s: usize },
    #[error("joint eigenvectors have residual {residual:e}; eigenvalue clusters could not be separated")]
    EigenspaceSplitFailure { residual: f64 },
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Spectra(#[from] SpectraError),
}

fn require_square(a: &ComplexMatrix) -> Result<(), JointError> {
    if !a.is_square() {
        return Err(NumericsError::NotSquare { rows: a.rows(), cols: a.cols() }.into());
    }
    if a.entries().iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(NumericsError::NonFinite.into());
    }
    Ok(())
}

fn scale(a: &ComplexMatrix) -> f64 {
    a.max_abs().max(1.0)
}

/// `‖AA* − A*A‖_max`.
pub fn normality_defect(a: &ComplexMatrix) -> f64 {
    let adj = a.adjoint();
    (a * &adj).max_diff(&(&adj * a))
}

fn check_normal(a: &ComplexMatrix, operator: &'static str, tol: &Tolerance) -> Result<f64, JointError> {
    require_square(a)?;
    let defect = normality_defect(a);
    if defect > tol.identity_check * scale(a).powi(2) {
        return Err(JointError::NotNormal { operator, defect });
    }
    Ok(defect)
}

/// Two commuting normal matrices of the same size.
#[derive(Debug, Clone)]
pub struct CommutingPair {
    t: ComplexMatrix,
    s: ComplexMatrix,
    commutator_norm: f64,
}

impl CommutingPair {
    pub fn t(&self) -> &ComplexMatrix {
        &self.t
    }

    pub fn s(&self) -> &ComplexMatrix {
        &self.s
    }

    /// `‖TS − ST‖_max`.
    pub fn commutator_norm(&self) -> f64 {
        self.commutator_norm
    }

    pub fn dim(&self) -> usize {
        self.t.rows()
    }
}

/// Checks that `T` and `S` are normal and commute, each up to
/// `identity_check` relative to the squared entry scale.
pub fn check_pair(t: &ComplexMatrix, s: &ComplexMatrix, tol: &Tolerance) -> Result<CommutingPair, JointError> {
    tol.validate()?;
    check_normal(t, "T", tol)?;
    check_normal(s, "S", tol)?;
    if t.rows() != s.rows() {
        return Err(JointError::SizeMismatch { t: t.rows(), s: s.rows() });
    }
    let norm = (t * s).max_diff(&(s * t));
    if norm > tol.identity_check * scale(t) * scale(s) {
        return Err(JointError::NotCommuting { norm });
    }
    Ok(CommutingPair {
        t: t.clone(),
        s: s.clone(),
        commutator_norm: norm,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JointPoint {
    #[serde(serialize_with = "complex_pair")]
    pub lambda: Complex64,
    #[serde(serialize_with = "complex_pair")]
    pub mu: Complex64,
    pub mult: usize,
}

fn complex_pair<S: serde::Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeTuple;
    let mut t = s.serialize_tuple(2)?;
    t.serialize_element(&z.re)?;
    t.serialize_element(&z.im)?;
    t.end()
}

fn lex(a: &(Complex64, Complex64), b: &(Complex64, Complex64)) -> Ordering {
    a.0.re
        .total_cmp(&b.0.re)
        .then(a.0.im.total_cmp(&b.0.im))
        .then(a.1.re.total_cmp(&b.1.re))
        .then(a.1.im.total_cmp(&b.1.im))
}

/// Joint eigenvalues with multiplicities, and an orthonormal basis of joint
/// eigenvectors whose columns follow the points in order.
#[derive(Debug, Clone, Serialize)]
pub struct JointSpectrumPoints {
    pub points: Vec<JointPoint>,
    #[serde(skip)]
    pub basis: ComplexMatrix,
    /// Largest `‖Tv − λv‖` or `‖Sv − μv‖` over the basis columns.
    pub residual: f64,
}

impl JointSpectrumPoints {
    /// Every point repeated according to its multiplicity.
    pub fn expanded(&self) -> Vec<(Complex64, Complex64)> {
        self.points
            .iter()
            .flat_map(|p| std::iter::repeat_n((p.lambda, p.mu), p.mult))
            .collect()
    }

    pub fn total_multiplicity(&self) -> usize {
        self.points.iter().map(|p| p.mult).sum()
    }
}

/// Eigenvalue clusters: a new cluster starts where consecutive eigenvalues are
/// more than `1e-6·(diameter + 1)` apart.
fn clusters(eigenvalues: &[f64]) -> Vec<Vec<usize>> {
    let (Some(first), Some(last)) = (eigenvalues.first(), eigenvalues.last()) else {
        return Vec::new();
    };
    let gap = 1e-6 * (last - first + 1.0);
    let mut out: Vec<Vec<usize>> = vec![vec![0]];
    for k in 1..eigenvalues.len() {
        if eigenvalues[k] - eigenvalues[k - 1] > gap {
            out.push(Vec::new());
        }
        out.last_mut().expect("nonempty").push(k);
    }
    out
}

/// Splits the column span of `basis` into common eigenspaces of the
/// commuting Hermitian operators `ops`.
fn split(ops: &[ComplexMatrix], basis: ComplexMatrix, tol: &Tolerance, leaves: &mut Vec<ComplexMatrix>) -> Result<(), JointError> {
    let Some((first, rest)) = ops.split_first() else {
        leaves.push(basis);
        return Ok(());
    };
    if basis.cols() == 1 {
        leaves.push(basis);
        return Ok(());
    }
    let restricted = (&(&basis.adjoint() * first) * &basis).hermitian_part();
    let eig = hermitian_eig(&restricted, tol)?;
    for c in clusters(&eig.eigenvalues) {
        let sub = &basis * &eig.vectors.select_columns(&c);
        split(rest, sub, tol, leaves)?;
    }
    Ok(())
}

fn rayleigh(a: &ComplexMatrix, q: &ComplexMatrix) -> Complex64 {
    let m = &(&q.adjoint() * a) * q;
    m.diagonal().iter().sum::<Complex64>() / q.cols() as f64
}

fn column_residual(a: &ComplexMatrix, q: &ComplexMatrix, value: Complex64) -> f64 {
    let aq = a * q;
    let shifted = &aq - &q.scale(value);
    shifted.max_abs()
}

/// Simultaneous diagonalization of a commuting normal pair.
///
/// The Hermitian and skew-Hermitian parts of `T` and `S` are four commuting
/// Hermitian matrices; the space is split by the eigenvalue clusters of each
/// in turn. Points come out in lexicographic order of `(Re λ, Im λ, Re μ, Im μ)`.
pub fn joint_spectrum(pair: &CommutingPair, tol: &Tolerance) -> Result<JointSpectrumPoints, JointError> {
    let n = pair.dim();
    let ops = [
        pair.t.hermitian_part(),
        pair.t.skew_part_over_i(),
        pair.s.hermitian_part(),
        pair.s.skew_part_over_i(),
    ];
    let mut leaves = Vec::new();
    if n > 0 {
        split(&ops, ComplexMatrix::identity(n), tol, &mut leaves)?;
    }
    let limit = 10.0 * tol.eigen_residual;
    let mut residual: f64 = 0.0;
    let mut found = Vec::with_capacity(leaves.len());
    for q in leaves {
        let lambda = rayleigh(&pair.t, &q);
        let mu = rayleigh(&pair.s, &q);
        let r = (column_residual(&pair.t, &q, lambda) / scale(&pair.t)).max(column_residual(&pair.s, &q, mu) / scale(&pair.s));
        residual = residual.max(r);
        found.push(((lambda, mu), q));
    }
    if residual > limit {
        return Err(JointError::EigenspaceSplitFailure { residual });
    }
    found.sort_by(|a, b| lex(&a.0, &b.0));
    let mut basis = ComplexMatrix::zeros(n, n);
    let mut col = 0;
    let mut points = Vec::with_capacity(found.len());
    for ((lambda, mu), q) in found {
        basis.set_block(0, col, &q);
        col += q.cols();
        points.push(JointPoint { lambda, mu, mult: q.cols() });
    }
    Ok(JointSpectrumPoints { points, basis, residual })
}

/// Joint spectrum of `(T ⊗ 1, 1 ⊗ S)` for normal `T` and `S`.
pub fn tensor_pair_spectrum(t: &ComplexMatrix, s: &ComplexMatrix, tol: &Tolerance) -> Result<JointSpectrumPoints, JointError> {
    tensor_pair_spectrum_capped(t, s, tol, DEFAULT_KRONECKER_CAP)
}

pub fn tensor_pair_spectrum_capped(t: &ComplexMatrix, s: &ComplexMatrix, tol: &Tolerance, cap: usize) -> Result<JointSpectrumPoints, JointError> {
    check_normal(t, "T", tol)?;
    check_normal(s, "S", tol)?;
    let left = kronecker_capped(t, &ComplexMatrix::identity(s.rows()), cap)?;
    let right = kronecker_capped(&ComplexMatrix::identity(t.rows()), s, cap)?;
    joint_spectrum(&check_pair(&left, &right, tol)?, tol)
}

/// Eigenvalues of a normal matrix with multiplicities.
pub fn normal_eigenvalues(a: &ComplexMatrix, tol: &Tolerance) -> Result<Vec<Complex64>, JointError> {
    let pair = check_pair(a, &ComplexMatrix::identity(a.rows()), tol)?;
    Ok(joint_spectrum(&pair, tol)?.expanded().into_iter().map(|(l, _)| l).collect())
}

/// Largest distance in a greedy nearest-point matching of two multisets of
/// pairs; infinite when the sizes differ.
pub fn pair_match_gap(computed: &[(Complex64, Complex64)], expected: &[(Complex64, Complex64)]) -> f64 {
    if computed.len() != expected.len() {
        return f64::INFINITY;
    }
    let mut used = vec![false; computed.len()];
    let mut gap: f64 = 0.0;
    let mut order: Vec<_> = expected.to_vec();
    order.sort_by(lex);
    for e in &order {
        let best = computed
            .iter()
            .enumerate()
            .filter(|(i, _)| !used[*i])
            .map(|(i, c)| (i, (c.0 - e.0).norm().max((c.1 - e.1).norm())))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("sizes agree");
        used[best.0] = true;
        gap = gap.max(best.1);
    }
    gap
}

/// `{f(λ, μ)}` with the multiplicities of the points.
pub fn spectral_mapping(points: &JointSpectrumPoints, f: impl Fn(Complex64, Complex64) -> Complex64) -> Vec<(Complex64, usize)> {
    points.points.iter().map(|p| (f(p.lambda, p.mu), p.mult)).collect()
}

/// Eigenvalues of `T ⊗ 1 + 1 ⊗ S` three ways: assembled, as pairwise sums of
/// the factor eigenvalues, and through exact Minkowski sums of the factor
/// spectra.
#[derive(Debug, Clone, Serialize)]
pub struct SumOperatorReport {
    pub assembled: Vec<f64>,
    pub pairwise: Vec<f64>,
    pub symbolic: Vec<f64>,
    pub max_gap: f64,
    pub symbolic_gap: f64,
    pub pass: bool,
}

fn psd_eigenvalues(a: &ComplexMatrix, operator: &'static str, tol: &Tolerance) -> Result<Vec<f64>, JointError> {
    require_square(a)?;
    let defect = a.hermitian_defect();
    if defect > tol.identity_check * scale(a) {
        return Err(JointError::NotHermitian { operator, defect });
    }
    let eig = hermitian_eig(&a.hermitian_part(), tol)?;
    let min = eig.eigenvalues.first().copied().unwrap_or(0.0);
    if min < -PSD_SLACK {
        return Err(JointError::NotPsd { operator, min_eigenvalue: min });
    }
    Ok(eig.eigenvalues)
}

/// Exact spectral set of a finite eigenvalue list, clamping the allowed
/// negative slack to zero.
fn finite_set(values: &[f64]) -> Result<SpectralSet, JointError> {
    let atoms = values
        .iter()
        .map(|&v| {
            let r = Rational::from_float(v.max(0.0)).ok_or(NumericsError::NonFinite)?;
            Ok(SpectralAtom::point(r, Multiplicity::ONE))
        })
        .collect::<Result<Vec<_>, JointError>>()?;
    Ok(SpectralSet::new(atoms)?)
}

pub fn sum_operator_check(t: &ComplexMatrix, s: &ComplexMatrix, tol: &Tolerance) -> Result<SumOperatorReport, JointError> {
    let et = psd_eigenvalues(t, "T", tol)?;
    let es = psd_eigenvalues(s, "S", tol)?;
    let a = &kronecker_capped(t, &ComplexMatrix::identity(s.rows()), DEFAULT_KRONECKER_CAP)?
        + &kronecker_capped(&ComplexMatrix::identity(t.rows()), s, DEFAULT_KRONECKER_CAP)?;
    let assembled = hermitian_eig(&a.hermitian_part(), tol)?.eigenvalues;
    let mut pairwise: Vec<f64> = et.iter().flat_map(|x| es.iter().map(move |y| x + y)).collect();
    pairwise.sort_by(f64::total_cmp);

    let sum = finite_set(&et)?.minkowski_sum(&finite_set(&es)?)?;
    let cutoff = sum.anchor().map(|a| a + Rational::from_integer(1.into())).unwrap_or_default();
    let mut symbolic = Vec::new();
    for (x, m) in sum.enumerate_below(&cutoff) {
        let count = m.exact().expect("finite sums keep exact counts");
        let v = crate::spectra::rational::to_f64(&x);
        symbolic.extend(std::iter::repeat_n(v, count as usize));
    }
    let max_gap = sorted_match_gap(&assembled, &pairwise);
    let symbolic_gap = sorted_match_gap(&assembled, &symbolic);
    Ok(SumOperatorReport {
        pass: max_gap <= SPECTRUM_MATCH_GAP && symbolic_gap <= SPECTRUM_MATCH_GAP,
        assembled,
        pairwise,
        symbolic,
        max_gap,
        symbolic_gap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn real(rows: &[&[f64]]) -> ComplexMatrix {
        ComplexMatrix::from_real_rows(rows).unwrap()
    }

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn pts(j: &JointSpectrumPoints) -> Vec<(Complex64, Complex64)> {
        j.expanded()
    }

    #[test]
    fn diagonal_pair() {
        let t = ComplexMatrix::from_real_diagonal(&[1.0, 2.0]);
        let s = ComplexMatrix::from_real_diagonal(&[3.0, 4.0]);
        let p = check_pair(&t, &s, &tol()).unwrap();
        assert_eq!(p.commutator_norm(), 0.0);
        let j = joint_spectrum(&p, &tol()).unwrap();
        assert!(pair_match_gap(&pts(&j), &[(c(1.0, 0.0), c(3.0, 0.0)), (c(2.0, 0.0), c(4.0, 0.0))]) < 1e-12);
    }

    #[test]
    fn identity_and_swap() {
        let swap = real(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let j = joint_spectrum(&check_pair(&ComplexMatrix::identity(2), &swap, &tol()).unwrap(), &tol()).unwrap();
        assert!(pair_match_gap(&pts(&j), &[(c(1.0, 0.0), c(1.0, 0.0)), (c(1.0, 0.0), c(-1.0, 0.0))]) < 1e-12);
        assert!(j.residual < 1e-12);
        // the basis diagonalizes the swap
        let d = &(&j.basis.adjoint() * &swap) * &j.basis;
        assert!((d[(0, 1)]).norm() < 1e-12);
    }

    #[test]
    fn nilpotent_is_rejected() {
        let n = real(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!(matches!(check_pair(&n, &ComplexMatrix::identity(2), &tol()), Err(JointError::NotNormal { .. })));
    }

    #[test]
    fn non_commuting_pair_is_rejected() {
        let a = real(&[&[1.0, 0.0], &[0.0, -1.0]]);
        let b = real(&[&[0.0, 1.0], &[1.0, 0.0]]);
        assert!(matches!(check_pair(&a, &b, &tol()), Err(JointError::NotCommuting { .. })));
    }

    #[test]
    fn rotation_has_complex_spectrum() {
        // a real rotation is normal but not Hermitian
        let r = real(&[&[0.0, -1.0], &[1.0, 0.0]]);
        let ev = normal_eigenvalues(&r, &tol()).unwrap();
        assert!((ev[0] - c(0.0, -1.0)).norm() < 1e-12 && (ev[1] - c(0.0, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn tensor_pair_is_the_cartesian_product() {
        let t = ComplexMatrix::from_real_diagonal(&[1.0, 2.0]);
        let s = ComplexMatrix::from_real_diagonal(&[0.0, 5.0]);
        let j = tensor_pair_spectrum(&t, &s, &tol()).unwrap();
        let expected: Vec<_> = [(1.0, 0.0), (1.0, 5.0), (2.0, 0.0), (2.0, 5.0)]
            .iter()
            .map(|&(a, b)| (c(a, 0.0), c(b, 0.0)))
            .collect();
        assert!(pair_match_gap(&pts(&j), &expected) < 1e-12);
        let z = ComplexMatrix::zeros(2, 2);
        let j = tensor_pair_spectrum(&z, &z, &tol()).unwrap();
        assert_eq!(j.points.len(), 1);
        assert_eq!(j.points[0].mult, 4);
    }

    #[test]
    fn mapping_sums_points() {
        let t = ComplexMatrix::from_real_diagonal(&[1.0, 2.0]);
        let s = ComplexMatrix::from_real_diagonal(&[3.0, 4.0]);
        let j = joint_spectrum(&check_pair(&t, &s, &tol()).unwrap(), &tol()).unwrap();
        let m = spectral_mapping(&j, |a, b| a + b);
        assert_eq!(m, vec![(c(4.0, 0.0), 1), (c(6.0, 0.0), 1)]);
        let zero = spectral_mapping(&j, |_, _| c(0.0, 0.0));
        assert!(zero.iter().all(|&(v, _)| v == c(0.0, 0.0)));
    }

    #[test]
    fn sum_operator_examples() {
        let t = ComplexMatrix::from_real_diagonal(&[1.0, 2.0]);
        let s = ComplexMatrix::from_real_diagonal(&[3.0]);
        let r = sum_operator_check(&t, &s, &tol()).unwrap();
        assert!(r.pass);
        assert_eq!(r.symbolic, vec![4.0, 5.0]);
        let s = real(&[&[2.0, 1.0], &[1.0, 2.0]]);
        let r = sum_operator_check(&ComplexMatrix::zeros(3, 3), &s, &tol()).unwrap();
        assert!(r.pass);
        assert!(sorted_match_gap(&r.assembled, &[1.0, 1.0, 1.0, 3.0, 3.0, 3.0]) < 1e-12);
    }

    #[test]
    fn negative_operator_is_rejected() {
        let t = ComplexMatrix::from_real_diagonal(&[-1.0, 2.0]);
        assert!(matches!(
            sum_operator_check(&t, &ComplexMatrix::identity(1), &tol()),
            Err(JointError::NotPsd { operator: "T", .. })
        ));
    }

    #[test]
    fn close_but_distinct_eigenvalues_are_split() {
        let t = ComplexMatrix::from_real_diagonal(&[1.0, 1.0 + 1e-3, 2.0]);
        let j = joint_spectrum(&check_pair(&t, &t, &tol()).unwrap(), &tol()).unwrap();
        assert_eq!(j.points.len(), 3);
    }
}
