//! Seeded property suites. Every case draws its inputs from one ChaCha stream
//! per suite, so a (suite, seed, cases) triple always replays the same inputs.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use tensor_hodge::dbar::{riemann_surface_product_report, Verdict};
use tensor_hodge::numerics::{ComplexMatrix, Tolerance};
use tensor_hodge::spectra::rational::int;
use tensor_hodge::spectra::{
    compactness_verdict, criterion_essential_within_zero, criterion_factor_essential_empty, criterion_product_essential,
    minkowski_oracle_check, product_spectrum, Multiplicity, SpectralAtom, SpectralSet,
};
use tensor_hodge::tensor::kuenneth_check;

use crate::commands::{identity_summary, joint_summary, tensor_summary};
use crate::{gen, Error, Flags, Outcome};

/// Suite names with their default case counts.
pub const SUITES: [(&str, usize); 7] = [
    ("tensor-spectrum", 200),
    ("identities", 200),
    ("kuenneth", 200),
    ("minkowski-oracle", 1000),
    ("compactness", 500),
    ("curve-products", 500),
    ("joint", 200),
];

/// Random complexes have at most this many degrees ...
const MAX_LENGTH: usize = 3;
/// ... each of at most this dimension.
const MAX_DEGREE_DIM: usize = 4;
/// Largest normal or positive matrix in the joint suite.
const MAX_OPERATOR_DIM: usize = 8;
const ORACLE_CUTOFF: i64 = 100;

#[derive(Debug, Clone, Serialize)]
pub struct SuiteOutcome {
    pub suite: String,
    pub seed: u64,
    pub cases: usize,
    pub failures: usize,
    /// Description of the first failing case.
    pub first_failure: Option<String>,
    /// Worst values of the measured quantities.
    pub stats: BTreeMap<String, f64>,
    pub pass: bool,
}

struct Tally {
    failures: usize,
    first_failure: Option<String>,
    stats: BTreeMap<String, f64>,
}

impl Tally {
    fn new() -> Self {
        Self {
            failures: 0,
            first_failure: None,
            stats: BTreeMap::new(),
        }
    }

    fn max(&mut self, key: &str, v: f64) {
        let slot = self.stats.entry(key.to_string()).or_insert(0.0);
        *slot = slot.max(v);
    }

    fn count(&mut self, key: &str) {
        *self.stats.entry(key.to_string()).or_insert(0.0) += 1.0;
    }

    fn check(&mut self, case: usize, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.failures += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(format!("case {case}: {}", what()));
            }
        }
    }

    fn error(&mut self, case: usize, e: impl std::fmt::Display) {
        self.check(case, false, || format!("error: {e}"));
    }
}

/// Per-suite seed, so suites do not share a stream.
fn suite_seed(seed: u64, name: &str) -> u64 {
    name.bytes().fold(seed ^ 0x9e37_79b9_7f4a_7c15, |h, b| {
        (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3)
    })
}

fn unknown_suite(name: &str) -> Error {
    let names: Vec<&str> = SUITES.iter().map(|s| s.0).collect();
    Error::Usage(format!("unknown suite {name:?}; known: {}", names.join(", ")))
}

pub fn run_suite(name: &str, seed: u64, cases: usize, tol: &Tolerance) -> Result<SuiteOutcome, Error> {
    if !SUITES.iter().any(|s| s.0 == name) {
        return Err(unknown_suite(name));
    }
    // the Künneth suite replays the pairs of the tensor-spectrum suite
    let stream = if name == "kuenneth" { "tensor-spectrum" } else { name };
    let mut rng = ChaCha8Rng::seed_from_u64(suite_seed(seed, stream));
    let mut t = Tally::new();
    for case in 0..cases {
        match name {
            "tensor-spectrum" => tensor_spectrum(&mut rng, case, tol, &mut t),
            "identities" => identities(&mut rng, case, tol, &mut t),
            "kuenneth" => kuenneth(&mut rng, case, tol, &mut t),
            "minkowski-oracle" => minkowski_oracle(&mut rng, case, &mut t),
            "compactness" => compactness(&mut rng, case, &mut t),
            "curve-products" => curve_products(&mut rng, case, &mut t),
            "joint" => joint(&mut rng, case, tol, &mut t),
            other => return Err(unknown_suite(other)),
        }
    }
    if name == "minkowski-oracle" {
        worked_sum(&mut t);
    }
    Ok(SuiteOutcome {
        suite: name.to_string(),
        seed,
        cases,
        pass: t.failures == 0,
        failures: t.failures,
        first_failure: t.first_failure,
        stats: t.stats,
    })
}

pub fn run(flags: &Flags) -> Result<Outcome, Error> {
    let tol = flags.tolerance()?;
    let seed = flags.seed.unwrap_or(0);
    let selected: Vec<(&str, usize)> = match &flags.suite {
        Some(name) => match SUITES.iter().find(|s| s.0 == name) {
            Some(&(name, default)) => vec![(name, default)],
            None => return Err(unknown_suite(name)),
        },
        None => SUITES.to_vec(),
    };
    let mut suites = Vec::new();
    for (name, default) in selected {
        suites.push(run_suite(name, seed, flags.cases.unwrap_or(default), &tol)?);
    }
    let pass = suites.iter().all(|s| s.pass);
    Ok(Outcome::new(serde_json::json!({ "suites": suites }), pass))
}

fn complex_pair(rng: &mut ChaCha8Rng) -> (tensor_hodge::complexes::FiniteComplex, tensor_hodge::complexes::FiniteComplex) {
    let a = gen::complex(rng, MAX_LENGTH, MAX_DEGREE_DIM);
    let b = gen::complex(rng, MAX_LENGTH, MAX_DEGREE_DIM);
    (a, b)
}

fn tensor_spectrum(rng: &mut ChaCha8Rng, case: usize, tol: &Tolerance, t: &mut Tally) {
    let (a, b) = complex_pair(rng);
    match tensor_summary(&a, &b, tol, usize::MAX) {
        Ok(s) => {
            t.max("max_spectrum_gap", s.max_spectrum_gap);
            t.max("max_block_residual", s.max_block_residual);
            t.max("max_d_squared_residual", s.d_squared_residual);
            let ok = s.spectra.iter().all(|m| m.pass);
            t.check(case, ok, || {
                format!("dims {:?} ⊗ {:?}: spectrum gap {:e}", a.dims(), b.dims(), s.max_spectrum_gap)
            });
        }
        Err(e) => t.error(case, e),
    }
}

fn identities(rng: &mut ChaCha8Rng, case: usize, tol: &Tolerance, t: &mut Tally) {
    let c = gen::complex(rng, MAX_LENGTH, MAX_DEGREE_DIM);
    match identity_summary(&c, tol) {
        Ok(s) => {
            for r in &s.degrees {
                for (k, v) in &r.residuals {
                    t.max(k, *v);
                }
            }
            t.max("projector_defect", s.max_projector_defect);
            t.check(case, s.pass, || {
                format!(
                    "dims {:?}: identity residual {:e}, projector defect {:e}",
                    c.dims(),
                    s.max_residual,
                    s.max_projector_defect
                )
            });
        }
        Err(e) => t.error(case, e),
    }
}

fn kuenneth(rng: &mut ChaCha8Rng, case: usize, tol: &Tolerance, t: &mut Tally) {
    let (a, b) = complex_pair(rng);
    match kuenneth_check(&a, &b, tol, usize::MAX) {
        Ok(r) => {
            let total: usize = r.degrees.values().map(|d| d.0).sum();
            t.max("max_total_cohomology", total as f64);
            t.check(case, r.pass, || format!("dims {:?} ⊗ {:?}: {:?}", a.dims(), b.dims(), r.degrees));
        }
        Err(e) => t.error(case, e),
    }
}

fn minkowski_oracle(rng: &mut ChaCha8Rng, case: usize, t: &mut Tally) {
    let a = gen::spectral_set(rng, 4);
    let b = gen::spectral_set(rng, 4);
    match minkowski_oracle_check(&a, &b, &int(ORACLE_CUTOFF)) {
        Ok(ok) => {
            t.max("max_atoms", a.atoms().len().max(b.atoms().len()) as f64);
            t.check(case, ok, || format!("{a:?} ⊕ {b:?}"));
        }
        Err(e) => t.error(case, e),
    }
}

/// `AP(0,2) ⊕ AP(0,3) = {0} ∪ AP(2,1)`.
fn worked_sum(t: &mut Tally) {
    let ap = |b, s| SpectralSet::ap(int(b), int(s), Multiplicity::ONE).expect("valid progression");
    let Ok(sum) = ap(0, 2).minkowski_sum(&ap(0, 3)) else {
        t.check(usize::MAX, false, || "worked sum failed".into());
        return;
    };
    // counts on a sum of two progressions are not tracked
    let expected = SpectralSet::new(vec![
        SpectralAtom::point(int(0), Multiplicity::Unquantified),
        SpectralAtom::ap(int(2), int(1), Multiplicity::Unquantified),
    ])
    .expect("valid atoms");
    let ok = sum == expected;
    t.check(usize::MAX, ok, || format!("worked sum: got {sum:?}"));
}

fn compactness(rng: &mut ChaCha8Rng, case: usize, t: &mut Tally) {
    let left = gen::factor_spectra(rng);
    let right = gen::factor_spectra(rng);
    let i = rng.gen_range(0..=4);
    let cutoff = int(ORACLE_CUTOFF);
    let result = (|| -> Result<(), Error> {
        let p = product_spectrum(&left.degrees, &right.degrees, i)?;
        let spectrum: BTreeMap<_, _> = p.spectrum().enumerate_below(&cutoff).into_iter().collect();
        let contained = p
            .essential()
            .enumerate_below(&cutoff)
            .iter()
            .all(|(x, _)| spectrum.contains_key(x));
        t.check(case, contained, || format!("degree {i}: essential spectrum leaves the spectrum"));

        let within_zero = criterion_essential_within_zero(&left.degrees, &right.degrees, i)?.is_empty();
        let factors_empty = criterion_factor_essential_empty(&left.degrees, &right.degrees, i).is_empty();
        let product_empty = criterion_product_essential(&left.degrees, &right.degrees, i)?.is_empty();
        let report = compactness_verdict(&left, &right, i)?;
        if left.effectively_nondegenerate() && right.effectively_nondegenerate() {
            t.count("nondegenerate_cases");
            t.check(case, within_zero == factors_empty && within_zero == product_empty, || {
                format!("degree {i}: criteria {within_zero}/{factors_empty}/{product_empty} disagree")
            });
        }
        let expected = if within_zero { Verdict::Compact } else { Verdict::NonCompact };
        t.check(case, report.verdict == expected, || {
            format!("degree {i}: verdict {:?}, criterion says {expected:?}", report.verdict)
        });
        if report.verdict == Verdict::NonCompact {
            t.count("non_compact_cases");
        }
        Ok(())
    })();
    if let Err(e) = result {
        t.error(case, e);
    }
}

fn curve_products(rng: &mut ChaCha8Rng, case: usize, t: &mut Tally) {
    let n = rng.gen_range(2..=4);
    let fs: Vec<_> = (0..n).map(|_| gen::curve(rng, 0.15)).collect();
    let r = match riemann_surface_product_report(&fs, 0) {
        Ok(r) => r,
        Err(e) => return t.error(case, e),
    };
    let v: Vec<Verdict> = r.degrees.iter().map(|d| d.verdict).collect();
    let nc = |q: usize| v[q] == Verdict::NonCompact;
    let c = |q: usize| v[q] == Verdict::Compact;
    let mut ok = true;
    // bottom and top degrees decide the middle ones
    for q in 1..n {
        ok &= c(q) == (c(0) && c(n));
        if nc(q) {
            ok &= (1..n).all(nc);
        }
    }
    if nc(0) {
        ok &= (0..n).all(nc);
    }
    if nc(n) {
        ok &= (1..=n).all(nc);
    }
    let solution_noncompact = fs.iter().any(|f| {
        (0..=1).any(|k| f.box_spectrum(0, k).is_some_and(|s| !s.essential().within_zero()))
    });
    if solution_noncompact {
        ok &= (0..=n).all(nc);
    }
    if fs.iter().any(|f| f.has_infinite_bergman_space()) {
        t.count("infinite_bergman_cases");
        ok &= (0..n).all(nc);
    }
    if fs.iter().all(|f| f.box_spectrum(0, 0).is_some() && f.box_spectrum(0, 1).is_some()) {
        ok &= v.iter().all(|&x| x != Verdict::Undecidable);
    }
    t.count(if nc(0) { "non_compact_bottom" } else { "other_bottom" });
    t.check(case, ok, || format!("{n} curves: verdicts {v:?}"));
}

fn joint(rng: &mut ChaCha8Rng, case: usize, tol: &Tolerance, t: &mut Tally) {
    let (a, _) = gen::normal(rng, MAX_OPERATOR_DIM);
    let (b, _) = gen::normal(rng, MAX_OPERATOR_DIM);
    check_joint(case, &a, &b, tol, t, false);
    let p = gen::psd(rng, MAX_OPERATOR_DIM);
    let q = gen::psd(rng, MAX_OPERATOR_DIM);
    check_joint(case, &p, &q, tol, t, true);
}

fn check_joint(case: usize, a: &ComplexMatrix, b: &ComplexMatrix, tol: &Tolerance, t: &mut Tally, positive: bool) {
    match joint_summary(a, b, tol, usize::MAX) {
        Ok(s) => {
            t.max("cartesian_gap", s.cartesian_gap);
            t.max("mapping_gap", s.mapping_gap);
            t.max("tensor_pair_residual", s.tensor_pair_residual);
            if let Some(r) = &s.sum_operator {
                t.max("sum_operator_gap", r.max_gap.max(r.symbolic_gap));
            }
            let ok = s.pass && (!positive || s.sum_operator.is_some());
            t.check(case, ok, || {
                format!(
                    "{}x{} and {}x{}: cartesian gap {:e}, mapping gap {:e}, sum operator {:?}",
                    a.rows(),
                    a.rows(),
                    b.rows(),
                    b.rows(),
                    s.cartesian_gap,
                    s.mapping_gap,
                    s.sum_operator.as_ref().map(|r| (r.max_gap, r.symbolic_gap)).ok_or(&s.sum_operator_note)
                )
            });
        }
        Err(e) => t.error(case, e),
    }
}
