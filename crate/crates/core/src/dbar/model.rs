use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::DbarError;
use crate::spectra::{Multiplicity, OperatorSpectrum};

/// Dimension of a space of sections or of a cohomology group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SpaceDim {
    Finite(u64),
    Infinite,
}

impl SpaceDim {
    pub fn is_infinite(self) -> bool {
        self == SpaceDim::Infinite
    }
}

impl fmt::Display for SpaceDim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpaceDim::Finite(n) => write!(f, "{n}"),
            SpaceDim::Infinite => f.write_str("infinite"),
        }
    }
}

impl Serialize for SpaceDim {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            SpaceDim::Finite(n) => s.serialize_u64(*n),
            SpaceDim::Infinite => s.serialize_str("infinite"),
        }
    }
}

impl<'de> Deserialize<'de> for SpaceDim {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            N(u64),
            S(String),
        }
        match Repr::deserialize(d)? {
            Repr::N(n) => Ok(SpaceDim::Finite(n)),
            Repr::S(s) if s == "infinite" || s == "inf" => Ok(SpaceDim::Infinite),
            Repr::S(s) => Err(serde::de::Error::custom(format!(
                "expected a count or \"infinite\", got {s:?}"
            ))),
        }
    }
}

/// One factor `E → X`: per-bidegree spectra of the ∂̄-Laplacian together with
/// what is known about its kernel and cohomology.
///
/// Grids are dense over `{0..n}²`; a `None` entry means unknown, never empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ModelRepr", into = "ModelRepr")]
pub struct DbarFactorModel {
    name: String,
    complex_dimension: usize,
    box_spectrum: Vec<Option<OperatorSpectrum>>,
    closed_range: Option<bool>,
    bergman_dim: Option<SpaceDim>,
    cohomology_dim: Vec<Option<SpaceDim>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelRepr {
    name: String,
    complex_dimension: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    closed_range: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    bergman_dim: Option<SpaceDim>,
    #[serde(default)]
    box_spectrum: BTreeMap<String, OperatorSpectrum>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    cohomology_dim: BTreeMap<String, SpaceDim>,
}

fn bidegree_key(p: usize, q: usize) -> String {
    format!("{p},{q}")
}

fn parse_bidegree(key: &str) -> Option<(usize, usize)> {
    let (p, q) = key.split_once(',')?;
    Some((p.trim().parse().ok()?, q.trim().parse().ok()?))
}

impl TryFrom<ModelRepr> for DbarFactorModel {
    type Error = DbarError;

    fn try_from(r: ModelRepr) -> Result<Self, DbarError> {
        let mut m = DbarFactorModel::unknown(&r.name, r.complex_dimension)?;
        m.closed_range = r.closed_range;
        m.bergman_dim = r.bergman_dim;
        let n = r.complex_dimension;
        let locate = |key: &str| {
            parse_bidegree(key)
                .filter(|&(p, q)| p <= n && q <= n)
                .ok_or_else(|| m.invalid(format!("bad bidegree key {key:?}; expected \"p,q\" with 0 ≤ p,q ≤ {n}")))
        };
        let mut spectra = Vec::new();
        for (key, s) in r.box_spectrum {
            spectra.push((locate(&key)?, s));
        }
        let mut dims = Vec::new();
        for (key, d) in r.cohomology_dim {
            dims.push((locate(&key)?, d));
        }
        for ((p, q), s) in spectra {
            m.box_spectrum[p * (n + 1) + q] = Some(s);
        }
        for ((p, q), d) in dims {
            m.cohomology_dim[p * (n + 1) + q] = Some(d);
        }
        m.validate()?;
        Ok(m)
    }
}

impl From<DbarFactorModel> for ModelRepr {
    fn from(m: DbarFactorModel) -> Self {
        let n = m.complex_dimension;
        let mut box_spectrum = BTreeMap::new();
        let mut cohomology_dim = BTreeMap::new();
        for p in 0..=n {
            for q in 0..=n {
                if let Some(s) = &m.box_spectrum[p * (n + 1) + q] {
                    box_spectrum.insert(bidegree_key(p, q), s.clone());
                }
                if let Some(d) = m.cohomology_dim[p * (n + 1) + q] {
                    cohomology_dim.insert(bidegree_key(p, q), d);
                }
            }
        }
        ModelRepr {
            name: m.name,
            complex_dimension: n,
            closed_range: m.closed_range,
            bergman_dim: m.bergman_dim,
            box_spectrum,
            cohomology_dim,
        }
    }
}

impl DbarFactorModel {
    /// A model with every datum unknown.
    pub fn unknown(name: &str, complex_dimension: usize) -> Result<Self, DbarError> {
        if complex_dimension == 0 {
            return Err(DbarError::InvalidModel {
                name: name.to_string(),
                reason: "complex dimension must be at least 1".into(),
            });
        }
        let cells = (complex_dimension + 1) * (complex_dimension + 1);
        Ok(Self {
            name: name.to_string(),
            complex_dimension,
            box_spectrum: vec![None; cells],
            closed_range: None,
            bergman_dim: None,
            cohomology_dim: vec![None; cells],
        })
    }

    pub fn with_closed_range(mut self, attested: bool) -> Self {
        self.closed_range = Some(attested);
        self
    }

    pub fn with_bergman_dim(mut self, dim: SpaceDim) -> Self {
        self.bergman_dim = Some(dim);
        self
    }

    pub fn with_box_spectrum(mut self, p: usize, q: usize, s: OperatorSpectrum) -> Result<Self, DbarError> {
        let at = self.cell(p, q)?;
        self.box_spectrum[at] = Some(s);
        Ok(self)
    }

    pub fn with_cohomology_dim(mut self, p: usize, q: usize, d: SpaceDim) -> Result<Self, DbarError> {
        let at = self.cell(p, q)?;
        self.cohomology_dim[at] = Some(d);
        Ok(self)
    }

    /// Checks the invariants; the builder methods leave this to the caller.
    pub fn validated(self) -> Result<Self, DbarError> {
        self.validate()?;
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn complex_dimension(&self) -> usize {
        self.complex_dimension
    }

    pub fn closed_range(&self) -> Option<bool> {
        self.closed_range
    }

    pub fn bergman_dim(&self) -> Option<SpaceDim> {
        self.bergman_dim
    }

    /// Spectral data of `□_{p,q}`, `None` when unknown or out of range.
    pub fn box_spectrum(&self, p: usize, q: usize) -> Option<&OperatorSpectrum> {
        self.cell(p, q).ok().and_then(|at| self.box_spectrum[at].as_ref())
    }

    pub fn cohomology_dim(&self, p: usize, q: usize) -> Option<SpaceDim> {
        self.cell(p, q).ok().and_then(|at| self.cohomology_dim[at])
    }

    /// Whether the Bergman space is infinite-dimensional, either as declared
    /// or as read off `0 ∈ σ_ess(□_{0,0})`.
    pub fn has_infinite_bergman_space(&self) -> bool {
        self.bergman_dim == Some(SpaceDim::Infinite)
            || self
                .box_spectrum(0, 0)
                .is_some_and(|s| s.essential().contains(&Zero::zero()))
    }

    pub(crate) fn require_attestation(&self) -> Result<bool, DbarError> {
        self.closed_range.ok_or_else(|| DbarError::MissingAttestation(self.name.clone()))
    }

    fn cell(&self, p: usize, q: usize) -> Result<usize, DbarError> {
        let n = self.complex_dimension;
        if p > n || q > n {
            return Err(DbarError::BidegreeOutOfRange {
                p: p as i64,
                q: q as i64,
                max: n,
            });
        }
        Ok(p * (n + 1) + q)
    }

    fn invalid(&self, reason: String) -> DbarError {
        DbarError::InvalidModel {
            name: self.name.clone(),
            reason,
        }
    }

    fn validate(&self) -> Result<(), DbarError> {
        let n = self.complex_dimension;
        let zero = Zero::zero();
        for p in 0..=n {
            for q in 0..=n {
                let Some(s) = self.box_spectrum(p, q) else { continue };
                // the complex is nondegenerate, so no Laplacian vanishes identically
                if s.spectrum().within_zero() {
                    return Err(self.invalid(format!("spectrum of □ in bidegree ({p},{q}) must contain a nonzero point")));
                }
                let mut declared = Vec::new();
                if (p, q) == (0, 0) {
                    // the Bergman space is the kernel of □_{0,0}, and so is the cohomology there
                    declared.extend(self.bergman_dim);
                    declared.extend(self.cohomology_dim(0, 0));
                } else if self.closed_range == Some(true) {
                    declared.extend(self.cohomology_dim(p, q));
                }
                for d in declared {
                    let ok = match (d, s.spectrum().multiplicity_at(&zero)) {
                        (SpaceDim::Infinite, _) => s.essential().contains(&zero),
                        (SpaceDim::Finite(0), m) => m.is_none(),
                        (SpaceDim::Finite(k), Some(Multiplicity::Finite(m))) => k == m && !s.essential().contains(&zero),
                        (SpaceDim::Finite(_), Some(Multiplicity::Unquantified)) => !s.essential().contains(&zero),
                        (SpaceDim::Finite(_), _) => false,
                    };
                    if !ok {
                        return Err(self.invalid(format!(
                            "dimension {d} in bidegree ({p},{q}) disagrees with the multiplicity of 0 in the spectrum"
                        )));
                    }
                }
            }
        }
        if let (Some(b), Some(c)) = (self.bergman_dim, self.cohomology_dim(0, 0)) {
            if b != c {
                return Err(self.invalid(format!("Bergman dimension {b} differs from cohomology dimension {c} in bidegree (0,0)")));
            }
        }
        if n == 1 {
            // □_{p,0} = ∂̄*∂̄ and □_{p,1} = ∂̄∂̄* share their nonzero spectrum
            for p in 0..=1 {
                if let (Some(a), Some(b)) = (self.box_spectrum(p, 0), self.box_spectrum(p, 1)) {
                    if a.spectrum().without_zero() != b.spectrum().without_zero()
                        || a.essential().without_zero() != b.essential().without_zero()
                    {
                        return Err(self.invalid(format!(
                            "bidegrees ({p},0) and ({p},1) must have the same nonzero spectrum"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectra::rational::int;
    use crate::spectra::{SpectralAtom, SpectralSet};
    use Multiplicity::*;

    fn op(atoms: Vec<SpectralAtom>) -> OperatorSpectrum {
        OperatorSpectrum::derived(SpectralSet::new(atoms).unwrap())
    }

    fn line(kernel: Option<Multiplicity>) -> DbarFactorModel {
        let mut atoms = vec![SpectralAtom::ap(int(1), int(1), Finite(1))];
        let rest = op(atoms.clone());
        if let Some(m) = kernel {
            atoms.push(SpectralAtom::point(int(0), m));
        }
        DbarFactorModel::unknown("line", 1)
            .unwrap()
            .with_box_spectrum(0, 0, op(atoms))
            .unwrap()
            .with_box_spectrum(0, 1, rest)
            .unwrap()
    }

    #[test]
    fn bergman_must_match_kernel() {
        assert!(line(Some(Infinite)).with_bergman_dim(SpaceDim::Infinite).validated().is_ok());
        assert!(line(Some(Finite(2))).with_bergman_dim(SpaceDim::Finite(2)).validated().is_ok());
        assert!(line(None).with_bergman_dim(SpaceDim::Finite(0)).validated().is_ok());
        assert!(line(Some(Finite(2))).with_bergman_dim(SpaceDim::Infinite).validated().is_err());
        assert!(line(Some(Infinite)).with_bergman_dim(SpaceDim::Finite(3)).validated().is_err());
        assert!(line(None).with_bergman_dim(SpaceDim::Finite(1)).validated().is_err());
    }

    #[test]
    fn infinite_bergman_is_read_off_the_spectrum() {
        assert!(line(Some(Infinite)).has_infinite_bergman_space());
        assert!(!line(Some(Finite(4))).has_infinite_bergman_space());
        let declared = DbarFactorModel::unknown("x", 2).unwrap().with_bergman_dim(SpaceDim::Infinite);
        assert!(declared.has_infinite_bergman_space());
    }

    #[test]
    fn vanishing_laplacian_is_rejected() {
        let m = DbarFactorModel::unknown("flat", 1)
            .unwrap()
            .with_box_spectrum(0, 0, op(vec![SpectralAtom::point(int(0), Infinite)]))
            .unwrap();
        assert!(m.validated().is_err());
    }

    #[test]
    fn nonzero_spectra_must_agree_on_a_curve() {
        let m = DbarFactorModel::unknown("bad", 1)
            .unwrap()
            .with_box_spectrum(0, 0, op(vec![SpectralAtom::ap(int(1), int(1), Finite(1))]))
            .unwrap()
            .with_box_spectrum(0, 1, op(vec![SpectralAtom::ap(int(2), int(1), Finite(1))]))
            .unwrap();
        assert!(m.validated().is_err());
    }

    #[test]
    fn out_of_range_bidegree() {
        let m = DbarFactorModel::unknown("x", 1).unwrap();
        assert!(matches!(
            m.with_cohomology_dim(2, 0, SpaceDim::Finite(0)),
            Err(DbarError::BidegreeOutOfRange { .. })
        ));
    }

    #[test]
    fn serde_round_trip_keeps_unknowns() {
        let json = r#"{
            "name": "disc",
            "complex_dimension": 1,
            "closed_range": true,
            "bergman_dim": "infinite",
            "box_spectrum": {
                "0,0": {"spectrum": [{"kind": "point", "value": "0", "mult": "infinite"},
                                     {"kind": "ap", "base": "2", "step": "2"}]}
            },
            "cohomology_dim": {"0,1": 0}
        }"#;
        let m: DbarFactorModel = serde_json::from_str(json).unwrap();
        assert!(m.box_spectrum(0, 1).is_none());
        assert_eq!(m.cohomology_dim(0, 1), Some(SpaceDim::Finite(0)));
        let back: DbarFactorModel = serde_json::from_str(&serde_json::to_string(&m).unwrap()).unwrap();
        assert_eq!(back, m);
        let bad = json.replace("\"0,1\"", "\"0,2\"");
        assert!(serde_json::from_str::<DbarFactorModel>(&bad).is_err());
    }
}
