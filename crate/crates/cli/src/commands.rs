//! One function per command, plus the checks the fuzz suites reuse.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Serialize;
use serde_json::json;
use tensor_hodge::complexes::{FiniteComplex, IdentityReport, NondegeneracyReport};
use tensor_hodge::dbar::{
    builtin_model, builtin_models, derive_gaussian_line_model, neumann_compactness, product_box_spectrum,
    riemann_surface_product_report, CompactnessReport, GAUSSIAN_WEIGHT_LINE, GAUSSIAN_WEIGHT_LINE_TRUNCATION,
};
use tensor_hodge::jointspec::{
    check_pair, joint_spectrum, normal_eigenvalues, pair_match_gap, spectral_mapping, sum_operator_check,
    tensor_pair_spectrum_capped, JointPoint, SumOperatorReport,
};
use tensor_hodge::numerics::{kronecker_capped, ComplexMatrix, Tolerance};
use tensor_hodge::spectra::{
    compactness_verdict, minkowski_oracle_check, product_spectrum, spectral_support, OperatorSpectrum, SpectralSet,
};
use tensor_hodge::tensor::{kuenneth_check, laplacian_block_residual, tensor_complex_capped, verify_product_spectrum, KuennethReport, SpectrumMatch, SPECTRUM_MATCH_GAP};

use crate::scenario::{Expectation, Payload, PairPayload, Scenario};
use crate::{Command, Error, Flags, Outcome, Series};

pub fn dispatch(command: Command, scenario: &Scenario, flags: &Flags) -> Result<Outcome, Error> {
    let tol = flags.tolerance()?;
    match command {
        Command::Validate => validate(&complex_of(scenario, flags)?, &tol),
        Command::Spectrum => spectrum(&complex_of(scenario, flags)?, &tol),
        Command::Hodge => hodge(&complex_of(scenario, flags)?, &tol),
        Command::Identities => {
            let s = identity_summary(&complex_of(scenario, flags)?, &tol)?;
            let pass = s.pass;
            Ok(Outcome::new(s, pass))
        }
        Command::Tensor => {
            let (a, b) = complex_pair(scenario, flags)?;
            let s = tensor_summary(&a, &b, &tol, flags.cap())?;
            let pass = s.pass;
            Ok(Outcome::new(s, pass))
        }
        Command::Symbolic => symbolic(scenario, flags),
        Command::Dbar => dbar(scenario),
        Command::DbarN => dbar_n(scenario),
        Command::Joint => match &scenario.payload {
            Payload::FinitePair(PairPayload::Operators { t, s }) => {
                let summary = joint_summary(t, s, &tol, flags.cap())?;
                let pass = summary.pass;
                Ok(Outcome::new(summary, pass))
            }
            _ => Err(wrong_kind(command, scenario, "a finite-pair scenario with operators")),
        },
        Command::Fuzz | Command::Catalogue => unreachable!("handled without a scenario"),
    }
}

fn wrong_kind(command: Command, scenario: &Scenario, wanted: &str) -> Error {
    Error::Usage(format!(
        "`{}` needs {wanted}, got a {} scenario",
        command.name(),
        scenario.kind
    ))
}

fn seed(scenario: &Scenario, flags: &Flags) -> u64 {
    flags.seed.or(scenario.rng_seed).unwrap_or(0)
}

fn complex_pair(scenario: &Scenario, flags: &Flags) -> Result<(FiniteComplex, FiniteComplex), Error> {
    match &scenario.payload {
        Payload::FinitePair(PairPayload::Complexes { left, right }) => {
            let s = seed(scenario, flags);
            Ok((left.build(s), right.build(s)))
        }
        _ => Err(wrong_kind(Command::Tensor, scenario, "a finite-pair scenario with complexes")),
    }
}

/// The scenario's complex; for a pair of complexes, their tensor product.
fn complex_of(scenario: &Scenario, flags: &Flags) -> Result<FiniteComplex, Error> {
    match &scenario.payload {
        Payload::FiniteComplex(p) => Ok(p.complex.build(seed(scenario, flags))),
        Payload::FinitePair(PairPayload::Complexes { .. }) => {
            let (a, b) = complex_pair(scenario, flags)?;
            Ok(tensor_complex_capped(&a, &b, flags.cap())?.complex)
        }
        _ => Err(Error::Usage(format!(
            "this command needs a complex, got a {} scenario",
            scenario.kind
        ))),
    }
}

fn validate(c: &FiniteComplex, tol: &Tolerance) -> Result<Outcome, Error> {
    #[derive(Serialize)]
    struct Results {
        dims: Vec<usize>,
        lo: i64,
        residuals: BTreeMap<i64, f64>,
        max_residual: f64,
        nondegeneracy: NondegeneracyReport,
    }
    let v = c.validate(tol);
    let pass = v.pass;
    Ok(Outcome::new(
        Results {
            dims: c.dims().to_vec(),
            lo: c.lo(),
            max_residual: v.max_residual(),
            residuals: v.residuals,
            nondegeneracy: c.is_nondegenerate(tol),
        },
        pass,
    ))
}

fn spectrum(c: &FiniteComplex, tol: &Tolerance) -> Result<Outcome, Error> {
    let mut degrees = BTreeMap::new();
    let mut series = Vec::new();
    for i in c.degrees() {
        let values = c.spectrum_multiset(i, tol)?;
        series.push(Series {
            label: format!("degree {i}"),
            values: values.clone(),
        });
        degrees.insert(i, values);
    }
    Ok(Outcome::new(json!({ "eigenvalues": degrees }), true).with_series(series))
}

fn hodge(c: &FiniteComplex, tol: &Tolerance) -> Result<Outcome, Error> {
    #[derive(Serialize)]
    struct Degree {
        degree: i64,
        harmonic_dim: usize,
        cohomology_dim: usize,
        projector_defect: f64,
        basic_estimate_constant: f64,
    }
    let mut degrees = Vec::new();
    let mut pass = true;
    for i in c.degrees() {
        let split = c.hodge(i, tol)?;
        let defect = split.max_defect();
        pass &= defect <= tol.identity_check;
        degrees.push(Degree {
            degree: i,
            harmonic_dim: split.harmonic_dim,
            cohomology_dim: c.cohomology_dim(i, tol)?,
            projector_defect: defect,
            basic_estimate_constant: c.basic_estimate_constant(i, tol)?,
        });
    }
    Ok(Outcome::new(json!({ "degrees": degrees }), pass))
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentitySummary {
    pub degrees: Vec<IdentityReport>,
    /// Largest deviation of the Hodge projectors from an orthogonal resolution of the identity.
    pub projector_defects: BTreeMap<i64, f64>,
    pub max_residual: f64,
    pub max_projector_defect: f64,
    pub pass: bool,
}

pub fn identity_summary(c: &FiniteComplex, tol: &Tolerance) -> Result<IdentitySummary, Error> {
    let mut degrees = Vec::new();
    let mut projector_defects = BTreeMap::new();
    for i in c.degrees() {
        degrees.push(c.check_identities(i, tol)?);
        projector_defects.insert(i, c.hodge(i, tol)?.max_defect());
    }
    let max_residual = degrees.iter().map(IdentityReport::max_residual).fold(0.0, f64::max);
    let max_projector_defect = projector_defects.values().copied().fold(0.0, f64::max);
    let pass = degrees.iter().all(|r| r.pass) && max_projector_defect <= tol.identity_check;
    Ok(IdentitySummary {
        degrees,
        projector_defects,
        max_residual,
        max_projector_defect,
        pass,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct TensorSummary {
    pub dims: Vec<usize>,
    pub lo: i64,
    pub d_squared_residual: f64,
    pub spectra: Vec<SpectrumMatch>,
    pub max_spectrum_gap: f64,
    /// Distance between the product Laplacian and its block-diagonal assembly from the factors.
    pub max_block_residual: f64,
    pub kuenneth: KuennethReport,
    pub pass: bool,
}

pub fn tensor_summary(a: &FiniteComplex, b: &FiniteComplex, tol: &Tolerance, cap: usize) -> Result<TensorSummary, Error> {
    let product = tensor_complex_capped(a, b, cap)?.complex;
    let validation = product.validate(tol);
    let mut spectra = Vec::new();
    let mut max_block_residual: f64 = 0.0;
    for i in product.degrees() {
        spectra.push(verify_product_spectrum(a, b, i, tol, cap)?);
        max_block_residual = max_block_residual.max(laplacian_block_residual(a, b, i, cap)?);
    }
    let max_spectrum_gap = spectra.iter().map(|s| s.max_gap).fold(0.0, f64::max);
    let kuenneth = kuenneth_check(a, b, tol, cap)?;
    let pass = validation.pass
        && spectra.iter().all(|s| s.pass)
        && max_block_residual <= tol.identity_check
        && kuenneth.pass;
    Ok(TensorSummary {
        dims: product.dims().to_vec(),
        lo: product.lo(),
        d_squared_residual: validation.max_residual(),
        spectra,
        max_spectrum_gap,
        max_block_residual,
        kuenneth,
        pass,
    })
}

fn symbolic(scenario: &Scenario, flags: &Flags) -> Result<Outcome, Error> {
    let Payload::SpectralModel(p) = &scenario.payload else {
        return Err(wrong_kind(Command::Symbolic, scenario, "a spectral-model scenario"));
    };
    let mut pass = true;

    let mut sets = BTreeMap::new();
    for (name, s) in &p.sets {
        sets.insert(
            name.clone(),
            json!({ "set": s, "essential": s.essential_part(), "finite": s.is_finite() }),
        );
    }

    let mut pairs = Vec::new();
    let names: Vec<&String> = p.sets.keys().collect();
    for (x, a) in names.iter().enumerate() {
        for b in &names[x + 1..] {
            let (sa, sb) = (&p.sets[*a], &p.sets[*b]);
            let sum = sa.minkowski_sum(sb)?;
            let oracle = match &flags.oracle_cutoff {
                Some(cutoff) => Some(minkowski_oracle_check(sa, sb, cutoff)?),
                None => None,
            };
            pass &= oracle != Some(false);
            pairs.push(json!({
                "left": a,
                "right": b,
                "union": sa.union(sb),
                "sum": sum,
                "sum_essential": sum.essential_part(),
                "oracle": oracle,
            }));
        }
    }

    let mut expectations = Vec::new();
    for (key, expected) in &p.expect_sums {
        let computed = sum_by_key(&p.sets, key)?;
        let matches = &computed == expected;
        pass &= matches;
        expectations.push(json!({ "sum": key, "expected": expected, "computed": computed, "matches": matches }));
    }

    let mut products = Vec::new();
    match (&p.left, &p.right) {
        (Some(left), Some(right)) => {
            let degrees = p.degrees.clone().unwrap_or_else(|| {
                let span = |s: &tensor_hodge::spectra::DegreeSpectra| {
                    let keys: Vec<i64> = s.keys().copied().collect();
                    (keys.first().copied().unwrap_or(0), keys.last().copied().unwrap_or(0))
                };
                let ((l0, l1), (r0, r1)) = (span(&left.degrees), span(&right.degrees));
                (l0 + r0..=l1 + r1).collect()
            });
            for i in degrees {
                let spectrum: OperatorSpectrum = product_spectrum(&left.degrees, &right.degrees, i)?;
                let report = compactness_verdict(left, right, i)?;
                products.push(json!({
                    "degree": i,
                    "spectrum": spectrum.spectrum(),
                    "essential": spectrum.essential(),
                    "report": report,
                }));
            }
        }
        (None, None) => {}
        _ => return Err(Error::Usage("spectral-model payload needs both `left` and `right`, or neither".into())),
    }

    let results = json!({
        "sets": sets,
        "pairs": pairs,
        "expected_sums": expectations,
        "products": products,
        "oracle_cutoff": flags.oracle_cutoff.as_ref().map(tensor_hodge::spectra::rational::format),
        "left_support": p.left.as_ref().map(|f| spectral_support(&f.degrees)),
        "right_support": p.right.as_ref().map(|f| spectral_support(&f.degrees)),
    });
    Ok(Outcome::new(results, pass))
}

/// Evaluates `"a+b"` over the named sets.
fn sum_by_key(sets: &BTreeMap<String, SpectralSet>, key: &str) -> Result<SpectralSet, Error> {
    let mut acc = SpectralSet::zero();
    for name in key.split('+').map(str::trim) {
        let s = sets
            .get(name)
            .ok_or_else(|| Error::Usage(format!("expect_sums refers to unknown set {name:?}")))?;
        acc = acc.minkowski_sum(s)?;
    }
    Ok(acc)
}

#[derive(Serialize)]
struct ExpectationResult<'a> {
    expected: &'a Expectation,
    verdict: tensor_hodge::dbar::Verdict,
    rule: tensor_hodge::dbar::Rule,
    matches: bool,
}

fn check_expectation<'a>(e: &'a Expectation, report: &CompactnessReport) -> ExpectationResult<'a> {
    let matches = e.verdict == report.verdict && e.rule.is_none_or(|r| r == report.rule);
    ExpectationResult {
        expected: e,
        verdict: report.verdict,
        rule: report.rule,
        matches,
    }
}

fn dbar(scenario: &Scenario) -> Result<Outcome, Error> {
    let Payload::DbarFactors(p) = &scenario.payload else {
        return Err(wrong_kind(Command::Dbar, scenario, "a dbar-factors scenario"));
    };
    let [x, y] = scenario.factors.as_slice() else {
        return Err(Error::Usage(format!("`dbar` needs exactly two factors, got {}", scenario.factors.len())));
    };
    let n = x.complex_dimension() + y.complex_dimension();
    let bidegrees: Vec<[usize; 2]> = match p.bidegree {
        Some(b) => vec![b],
        None => (0..=n).flat_map(|p| (0..=n).map(move |q| [p, q])).collect(),
    };
    let mut cells = Vec::new();
    let mut reports = BTreeMap::new();
    for [bp, bq] in bidegrees {
        let spectrum = match product_box_spectrum(x, y, bp, bq) {
            Ok(s) => Some(s),
            Err(tensor_hodge::dbar::DbarError::UnknownSpectrum { .. }) => None,
            Err(e) => return Err(e.into()),
        };
        let report = neumann_compactness(x, y, bp, bq)?;
        cells.push(json!({
            "bidegree": [bp, bq],
            "spectrum": spectrum.as_ref().map(OperatorSpectrum::spectrum),
            "essential": spectrum.as_ref().map(OperatorSpectrum::essential),
            "report": report,
        }));
        reports.insert(vec![bp, bq], report);
    }
    let mut expectations = Vec::new();
    for e in &p.expect {
        let report = match reports.get(&e.at) {
            Some(r) => r.clone(),
            None if e.at.len() == 2 => neumann_compactness(x, y, e.at[0], e.at[1])?,
            None => return Err(Error::Usage(format!("`dbar` expectations need a bidegree [p, q], got {:?}", e.at))),
        };
        expectations.push(serde_json::to_value(check_expectation(e, &report)).expect("serializable"));
    }
    let pass = expectations.iter().all(|e| e["matches"] == true);
    let results = json!({
        "factors": [x.name(), y.name()],
        "complex_dimension": n,
        "bidegrees": cells,
        "expectations": expectations,
    });
    Ok(Outcome::new(results, pass))
}

fn dbar_n(scenario: &Scenario) -> Result<Outcome, Error> {
    let Payload::DbarFactors(p) = &scenario.payload else {
        return Err(wrong_kind(Command::DbarN, scenario, "a dbar-factors scenario"));
    };
    let r = riemann_surface_product_report(&scenario.factors, p.q)?;
    let mut expectations = Vec::new();
    for e in &p.expect {
        let [q] = e.at.as_slice() else {
            return Err(Error::Usage(format!("`dbar-n` expectations need a form degree [q], got {:?}", e.at)));
        };
        let d = r.degrees.get(*q).ok_or(tensor_hodge::dbar::DbarError::DegreeOutOfRange {
            q: *q,
            n: scenario.factors.len(),
        })?;
        let mut report = CompactnessReport::new(d.verdict, d.rule, vec![*q as i64]);
        report.witnesses = d.witnesses.clone();
        expectations.push(serde_json::to_value(check_expectation(e, &report)).expect("serializable"));
    }
    let pass = expectations.iter().all(|e| e["matches"] == true);
    let names: Vec<&str> = scenario.factors.iter().map(|f| f.name()).collect();
    let results = json!({
        "factors": names,
        "q": p.q,
        "report": r.report,
        "degrees": r.degrees,
        "expectations": expectations,
    });
    Ok(Outcome::new(results, pass))
}

#[derive(Debug, Clone, Serialize)]
pub struct JointSummary {
    /// Joint spectrum of `(T, S)` on one space, when they commute.
    pub pair: Option<Vec<JointPoint>>,
    pub pair_note: Option<String>,
    /// Joint spectrum of `(T ⊗ 1, 1 ⊗ S)`.
    pub tensor_pair: Vec<JointPoint>,
    pub tensor_pair_residual: f64,
    /// Gap to the Cartesian product of the factor spectra.
    pub cartesian_gap: f64,
    /// Gap between `{λ + μ}` over the tensor joint spectrum and the eigenvalues of `T ⊗ 1 + 1 ⊗ S`.
    pub mapping_gap: f64,
    pub sum_operator: Option<SumOperatorReport>,
    pub sum_operator_note: Option<String>,
    pub pass: bool,
}

fn complex_gap(a: &[Complex64], b: &[Complex64]) -> f64 {
    let pad = |v: &[Complex64]| v.iter().map(|&z| (z, Complex64::new(0.0, 0.0))).collect::<Vec<_>>();
    pair_match_gap(&pad(a), &pad(b))
}

pub fn joint_summary(t: &ComplexMatrix, s: &ComplexMatrix, tol: &Tolerance, cap: usize) -> Result<JointSummary, Error> {
    let tensor = tensor_pair_spectrum_capped(t, s, tol, cap)?;
    let et = normal_eigenvalues(t, tol)?;
    let es = normal_eigenvalues(s, tol)?;
    let cartesian: Vec<(Complex64, Complex64)> = et.iter().flat_map(|&l| es.iter().map(move |&m| (l, m))).collect();
    let cartesian_gap = pair_match_gap(&tensor.expanded(), &cartesian);

    let mapped: Vec<Complex64> = spectral_mapping(&tensor, |l, m| l + m)
        .into_iter()
        .flat_map(|(z, k)| std::iter::repeat_n(z, k))
        .collect();
    let sum = &kronecker_capped(t, &ComplexMatrix::identity(s.rows()), cap)?
        + &kronecker_capped(&ComplexMatrix::identity(t.rows()), s, cap)?;
    let mapping_gap = complex_gap(&mapped, &normal_eigenvalues(&sum, tol)?);

    let (pair, pair_note) = match check_pair(t, s, tol).and_then(|p| joint_spectrum(&p, tol)) {
        Ok(points) => (Some(points.points), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let (sum_operator, sum_operator_note) = match sum_operator_check(t, s, tol) {
        Ok(r) => (Some(r), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let pass = cartesian_gap <= SPECTRUM_MATCH_GAP
        && mapping_gap <= SPECTRUM_MATCH_GAP
        && sum_operator.as_ref().is_none_or(|r| r.pass);
    Ok(JointSummary {
        pair,
        pair_note,
        tensor_pair: tensor.points,
        tensor_pair_residual: tensor.residual,
        cartesian_gap,
        mapping_gap,
        sum_operator,
        sum_operator_note,
        pass,
    })
}

pub fn catalogue(flags: &Flags) -> Result<Outcome, Error> {
    let models = builtin_models();
    if !flags.derive {
        let factors: Vec<_> = models.iter().map(|m| json!({ "model": m })).collect();
        let bundle = json!({
            "version": crate::scenario::SCENARIO_VERSION,
            "kind": "dbar-factors",
            "payload": { "factors": factors },
        });
        let names: Vec<&str> = models.iter().map(|m| m.name()).collect();
        return Ok(Outcome::new(json!({ "names": names, "bundle": bundle }), true));
    }
    let derived = derive_gaussian_line_model(GAUSSIAN_WEIGHT_LINE_TRUNCATION)?;
    let frozen = builtin_model(GAUSSIAN_WEIGHT_LINE).expect("catalogue entry exists");
    let matches = derived == frozen;
    let results = json!({
        "name": GAUSSIAN_WEIGHT_LINE,
        "truncation": GAUSSIAN_WEIGHT_LINE_TRUNCATION,
        "derived": derived,
        "matches_frozen": matches,
    });
    Ok(Outcome::new(results, matches))
}

