//! Scenario files: a versioned JSON envelope around a kind-specific payload.

use std::fmt;
use std::path::Path;

use serde::de::{DeserializeOwned, IgnoredAny};
use serde::{Deserialize, Serialize};
use tensor_hodge::complexes::{random_complex, FiniteComplex};
use tensor_hodge::dbar::{builtin_model, DbarFactorModel, Rule, Verdict};
use tensor_hodge::numerics::ComplexMatrix;
use tensor_hodge::spectra::{FactorSpectra, SpectralSet};
use thiserror::Error;

pub const SCENARIO_VERSION: &str = "1";

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{file}: at `{field}`, line {line} column {column}: {message}")]
    Syntax {
        file: String,
        field: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{file}: unsupported scenario version {found:?} (expected {expected:?})")]
    Version {
        file: String,
        found: String,
        expected: &'static str,
    },
    #[error("{file}: at `{field}`: {message}")]
    Invalid { file: String, field: String, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioKind {
    FiniteComplex,
    FinitePair,
    SpectralModel,
    DbarFactors,
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ScenarioKind::FiniteComplex => "finite-complex",
            ScenarioKind::FinitePair => "finite-pair",
            ScenarioKind::SpectralModel => "spectral-model",
            ScenarioKind::DbarFactors => "dbar-factors",
        };
        f.write_str(s)
    }
}

/// A complex given explicitly, or generated from the scenario seed.
#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum ComplexSource {
    Complex(FiniteComplex),
    Random {
        dims: Vec<usize>,
        /// Added to the scenario seed so two random factors differ.
        #[serde(default)]
        seed_offset: u64,
    },
}

impl ComplexSource {
    pub fn build(&self, seed: u64) -> FiniteComplex {
        match self {
            ComplexSource::Complex(c) => c.clone(),
            ComplexSource::Random { dims, seed_offset } => random_complex(dims, seed.wrapping_add(*seed_offset)),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexPayload {
    pub complex: ComplexSource,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum PairPayload {
    /// Two complexes, for the tensor product.
    Complexes { left: ComplexSource, right: ComplexSource },
    /// Two matrices, for joint spectra.
    Operators { t: ComplexMatrix, s: ComplexMatrix },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectralPayload {
    /// Named sets; every ordered pair `(a, b)` with `a ≤ b` is combined.
    #[serde(default)]
    pub sets: std::collections::BTreeMap<String, SpectralSet>,
    /// Expected Minkowski sums, keyed `"a+b"`.
    #[serde(default)]
    pub expect_sums: std::collections::BTreeMap<String, SpectralSet>,
    #[serde(default)]
    pub left: Option<FactorSpectra>,
    #[serde(default)]
    pub right: Option<FactorSpectra>,
    /// Product degrees to decide; defaults to every degree the factors reach.
    #[serde(default)]
    pub degrees: Option<Vec<i64>>,
}

/// A catalogue entry by name, or an inline model.
#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum FactorSource {
    Builtin(String),
    Model(DbarFactorModel),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expectation {
    /// `[p, q]` for pairwise products, `[q]` for curve products.
    pub at: Vec<usize>,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rule: Option<Rule>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DbarPayload {
    pub factors: Vec<FactorSource>,
    /// Bidegree `[p, q]` for `dbar`; every bidegree when absent.
    #[serde(default)]
    pub bidegree: Option<[usize; 2]>,
    /// Form degree highlighted by `dbar-n`.
    #[serde(default)]
    pub q: usize,
    #[serde(default)]
    pub expect: Vec<Expectation>,
}

#[derive(Debug, Clone)]
pub enum Payload {
    FiniteComplex(ComplexPayload),
    FinitePair(PairPayload),
    SpectralModel(SpectralPayload),
    DbarFactors(DbarPayload),
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub version: String,
    pub kind: ScenarioKind,
    pub payload: Payload,
    pub rng_seed: Option<u64>,
    /// Resolved factor models, for `dbar-factors`.
    pub factors: Vec<DbarFactorModel>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Envelope {
    version: String,
    kind: ScenarioKind,
    #[allow(dead_code)]
    payload: IgnoredAny,
    #[serde(default)]
    rng_seed: Option<u64>,
}

#[derive(Deserialize)]
struct Typed<P> {
    payload: P,
}

fn decode<T: DeserializeOwned>(file: &str, text: &str) -> Result<T, ParseError> {
    let mut de = serde_json::Deserializer::from_str(text);
    let value: T = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let field = e.path().to_string();
        let inner = e.into_inner();
        ParseError::Syntax {
            file: file.to_string(),
            field,
            line: inner.line(),
            column: inner.column(),
            message: strip_position(&inner.to_string()),
        }
    })?;
    de.end().map_err(|e| ParseError::Syntax {
        file: file.to_string(),
        field: ".".into(),
        line: e.line(),
        column: e.column(),
        message: strip_position(&e.to_string()),
    })?;
    Ok(value)
}

/// serde_json appends " at line L column C", which the error reports separately.
fn strip_position(msg: &str) -> String {
    match msg.rfind(" at line ") {
        Some(i) => msg[..i].to_string(),
        None => msg.to_string(),
    }
}

impl Scenario {
    pub fn load(path: &Path) -> Result<(Self, String), ParseError> {
        let text = std::fs::read_to_string(path).map_err(|source| ParseError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let scenario = Self::parse(&path.display().to_string(), &text)?;
        Ok((scenario, text))
    }

    pub fn parse(file: &str, text: &str) -> Result<Self, ParseError> {
        let env: Envelope = decode(file, text)?;
        if env.version != SCENARIO_VERSION {
            return Err(ParseError::Version {
                file: file.to_string(),
                found: env.version,
                expected: SCENARIO_VERSION,
            });
        }
        let payload = match env.kind {
            ScenarioKind::FiniteComplex => Payload::FiniteComplex(decode::<Typed<_>>(file, text)?.payload),
            ScenarioKind::FinitePair => Payload::FinitePair(decode::<Typed<_>>(file, text)?.payload),
            ScenarioKind::SpectralModel => Payload::SpectralModel(decode::<Typed<_>>(file, text)?.payload),
            ScenarioKind::DbarFactors => Payload::DbarFactors(decode::<Typed<_>>(file, text)?.payload),
        };
        let factors = match &payload {
            Payload::DbarFactors(p) => resolve_factors(file, &p.factors)?,
            _ => Vec::new(),
        };
        Ok(Scenario {
            version: env.version,
            kind: env.kind,
            payload,
            rng_seed: env.rng_seed,
            factors,
        })
    }
}

fn resolve_factors(file: &str, sources: &[FactorSource]) -> Result<Vec<DbarFactorModel>, ParseError> {
    sources
        .iter()
        .enumerate()
        .map(|(i, s)| match s {
            FactorSource::Builtin(name) => builtin_model(name).ok_or_else(|| ParseError::Invalid {
                file: file.to_string(),
                field: format!("payload.factors[{i}].builtin"),
                message: format!("no catalogue model named {name:?}"),
            }),
            FactorSource::Model(m) => Ok(m.clone()),
        })
        .collect()
}
