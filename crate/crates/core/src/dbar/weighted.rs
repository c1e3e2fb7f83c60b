//! Spectra of the ∂̄-Laplacian on `ℂ` with the weight `e^{-|z|²}`, derived by
//! Rayleigh–Ritz on polynomial subspaces.
//!
//! The inner product of monomials is `⟨z^j z̄^k, z^l z̄^m⟩ = (j+m)!` when
//! `j + m = k + l` and zero otherwise (after dividing out `π`), with `dz̄` of
//! unit length. The truncated space `span{z^j z̄^k : j, k ≤ N}` is invariant
//! under both Laplacians, so its Ritz values are eigenvalues. A value whose
//! multiplicity keeps growing with `N` is recorded as infinite.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, Zero};

use super::{DbarError, DbarFactorModel, SpaceDim};
use crate::numerics::{hermitian_eig, ComplexMatrix, Tolerance};
use crate::spectra::rational::{self, Rational};
use crate::spectra::{Multiplicity, OperatorSpectrum, SpectralAtom, SpectralSet};

/// Coefficients of `z^j z̄^k`, keyed by `(j, k)`.
type Poly = BTreeMap<(u32, u32), Rational>;

fn monomial(j: u32, k: u32) -> Poly {
    Poly::from([((j, k), Rational::one())])
}

fn factorial(n: u32) -> Rational {
    Rational::from_integer((1..=n).map(BigInt::from).product())
}

fn inner(a: &Poly, b: &Poly) -> Rational {
    let mut acc = Rational::zero();
    for (&(j, k), x) in a {
        for (&(l, m), y) in b {
            if j + m == k + l {
                acc += x * y * factorial(j + m);
            }
        }
    }
    acc
}

fn add_term(p: &mut Poly, key: (u32, u32), c: Rational) {
    if c.is_zero() {
        return;
    }
    let slot = p.entry(key).or_insert_with(Rational::zero);
    *slot += c;
    if slot.is_zero() {
        p.remove(&key);
    }
}

/// `∂̄f`, as the coefficient of `dz̄`.
fn dbar(f: &Poly) -> Poly {
    let mut out = Poly::new();
    for (&(j, k), c) in f {
        if k > 0 {
            add_term(&mut out, (j, k - 1), c * rational::int(k as i64));
        }
    }
    out
}

/// Weighted adjoint of `∂̄` on `u dz̄`: `-e^{|z|²} ∂_z(e^{-|z|²} u) = -∂_z u + z̄ u`.
fn dbar_adjoint(u: &Poly) -> Poly {
    let mut out = Poly::new();
    for (&(j, k), c) in u {
        if j > 0 {
            add_term(&mut out, (j - 1, k), -(c * rational::int(j as i64)));
        }
        add_term(&mut out, (j, k + 1), c.clone());
    }
    out
}

/// Generalized eigenvalues of `Q x = λ G x` for exact symmetric `Q` and
/// positive definite `G`, via `G = L D Lᵀ` in exact arithmetic.
fn ritz_values(g: &[Vec<Rational>], q: &[Vec<Rational>]) -> Result<Vec<f64>, DbarError> {
    let n = g.len();
    let mut l = vec![vec![Rational::zero(); n]; n];
    let mut d = vec![Rational::zero(); n];
    for i in 0..n {
        l[i][i] = Rational::one();
        for j in 0..=i {
            let mut s = g[i][j].clone();
            for k in 0..j {
                s -= &l[i][k] * &l[j][k] * &d[k];
            }
            if i == j {
                if !s.is_positive() {
                    return Err(DbarError::Oracle("Gram matrix is not positive definite".into()));
                }
                d[i] = s;
            } else {
                l[i][j] = s / &d[j];
            }
        }
    }
    // B = L⁻¹ Q L⁻ᵀ by two forward substitutions, using the symmetry of Q
    let forward = |m: &[Vec<Rational>]| -> Vec<Vec<Rational>> {
        let mut x = vec![vec![Rational::zero(); n]; n];
        for c in 0..n {
            for r in 0..n {
                let mut s = m[r][c].clone();
                for k in 0..r {
                    s -= &l[r][k] * &x[k][c];
                }
                x[r][c] = s;
            }
        }
        x
    };
    let x = forward(q);
    let xt: Vec<Vec<Rational>> = (0..n).map(|r| (0..n).map(|c| x[c][r].clone()).collect()).collect();
    let b = forward(&xt);
    let scale: Vec<f64> = d.iter().map(|v| rational::to_f64(v).sqrt()).collect();
    let mut entries = Vec::with_capacity(n * n);
    for r in 0..n {
        for c in 0..n {
            entries.push(Complex64::new(rational::to_f64(&b[r][c]) / (scale[r] * scale[c]), 0.0));
        }
    }
    let m = ComplexMatrix::from_vec(n, n, entries)?.hermitian_part();
    Ok(hermitian_eig(&m, &Tolerance::default())?.eigenvalues)
}

/// Ritz values of the Laplacian with quadratic form `‖L·‖²` on the monomials
/// of bidegree at most `(truncation, truncation)`, rounded to integers.
fn truncated_spectrum(truncation: u32, form: fn(&Poly) -> Poly) -> Result<BTreeMap<i64, u64>, DbarError> {
    // the weight is rotation invariant, so monomials with different j − k are orthogonal
    let mut sectors: BTreeMap<i64, Vec<Poly>> = BTreeMap::new();
    for j in 0..=truncation {
        for k in 0..=truncation {
            sectors.entry(j as i64 - k as i64).or_default().push(monomial(j, k));
        }
    }
    let mut counts = BTreeMap::new();
    for basis in sectors.values() {
        let images: Vec<Poly> = basis.iter().map(form).collect();
        let g: Vec<Vec<Rational>> = basis.iter().map(|a| basis.iter().map(|b| inner(a, b)).collect()).collect();
        let q: Vec<Vec<Rational>> = images.iter().map(|a| images.iter().map(|b| inner(a, b)).collect()).collect();
        for v in ritz_values(&g, &q)? {
            let r = v.round();
            if (v - r).abs() > 1e-6 * (1.0 + r.abs()) {
                return Err(DbarError::Oracle(format!("Ritz value {v} is not close to an integer")));
            }
            *counts.entry(r as i64).or_insert(0) += 1;
        }
    }
    Ok(counts)
}

/// Reads a spectral set off two truncations: values whose multiplicity grows
/// are infinite, and a run of equally spaced infinite values is extended to a
/// progression.
fn infer_set(small: &BTreeMap<i64, u64>, large: &BTreeMap<i64, u64>) -> Result<SpectralSet, DbarError> {
    let values: Vec<i64> = small.keys().copied().collect();
    let growing = values.iter().all(|v| large.get(v).is_some_and(|&m| m > small[v]));
    if !growing {
        return Err(DbarError::Oracle("some eigenvalue multiplicity does not grow with the truncation".into()));
    }
    let step = match values.as_slice() {
        [a, b, ..] => b - a,
        _ => return Err(DbarError::Oracle("too few distinct eigenvalues to recognize a progression".into())),
    };
    if step <= 0 || values.windows(2).any(|w| w[1] - w[0] != step) {
        return Err(DbarError::Oracle("eigenvalues are not equally spaced".into()));
    }
    Ok(SpectralSet::new(vec![SpectralAtom::ap(
        rational::int(values[0]),
        rational::int(step),
        Multiplicity::Infinite,
    )])?)
}

/// Spectra of `□_0` and `□_1` on `ℂ` with the weight `e^{-|z|²}`, from
/// truncations `truncation` and `truncation + 2`.
pub fn gaussian_line_spectra(truncation: u32) -> Result<[SpectralSet; 2], DbarError> {
    if truncation < 2 {
        return Err(DbarError::Oracle("truncation must be at least 2".into()));
    }
    let bottom = infer_set(&truncated_spectrum(truncation, dbar)?, &truncated_spectrum(truncation + 2, dbar)?)?;
    let top = infer_set(
        &truncated_spectrum(truncation, dbar_adjoint)?,
        &truncated_spectrum(truncation + 2, dbar_adjoint)?,
    )?;
    Ok([bottom, top])
}

/// The weighted line as a factor model. `dz` is parallel of unit length, so
/// the `(1,q)` Laplacians agree with the `(0,q)` ones.
pub fn derive_gaussian_line_model(truncation: u32) -> Result<DbarFactorModel, DbarError> {
    let [bottom, top] = gaussian_line_spectra(truncation)?;
    let kernel_dim = |s: &SpectralSet| match s.multiplicity_at(&Rational::zero()) {
        None => SpaceDim::Finite(0),
        Some(m) if m.is_infinite() => SpaceDim::Infinite,
        Some(m) => SpaceDim::Finite(m.exact().unwrap_or(0)),
    };
    let mut m = DbarFactorModel::unknown(super::GAUSSIAN_WEIGHT_LINE, 1)?
        .with_closed_range(true)
        .with_bergman_dim(kernel_dim(&bottom));
    for p in 0..=1 {
        m = m
            .with_box_spectrum(p, 0, OperatorSpectrum::derived(bottom.clone()))?
            .with_box_spectrum(p, 1, OperatorSpectrum::derived(top.clone()))?
            .with_cohomology_dim(p, 0, kernel_dim(&bottom))?
            .with_cohomology_dim(p, 1, kernel_dim(&top))?;
    }
    m.validated()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn adjoint_is_the_weighted_adjoint() {
        for (j, k) in [(0, 1), (2, 1), (1, 3), (3, 0)] {
            for (l, m) in [(0, 0), (1, 0), (2, 2), (3, 1), (0, 2)] {
                let f = monomial(j, k);
                let u = monomial(l, m);
                assert_eq!(inner(&dbar(&f), &u), inner(&f, &dbar_adjoint(&u)), "{j},{k} vs {l},{m}");
            }
        }
    }

    #[test]
    fn truncation_counts() {
        let c = truncated_spectrum(3, dbar).unwrap();
        assert_eq!(c, BTreeMap::from([(0, 4), (1, 4), (2, 4), (3, 4)]));
        let c = truncated_spectrum(3, dbar_adjoint).unwrap();
        assert_eq!(c, BTreeMap::from([(1, 4), (2, 4), (3, 4), (4, 4)]));
    }

    #[test]
    fn spectra_are_shifted_progressions() {
        let [bottom, top] = gaussian_line_spectra(4).unwrap();
        assert_eq!(bottom, SpectralSet::ap(rational::int(0), rational::int(1), Multiplicity::Infinite).unwrap());
        assert_eq!(top, SpectralSet::ap(rational::int(1), rational::int(1), Multiplicity::Infinite).unwrap());
    }

    #[test]
    fn derived_model_is_valid() {
        let m = derive_gaussian_line_model(4).unwrap();
        assert_eq!(m.bergman_dim(), Some(SpaceDim::Infinite));
        assert_eq!(m.cohomology_dim(0, 1), Some(SpaceDim::Finite(0)));
    }
}
