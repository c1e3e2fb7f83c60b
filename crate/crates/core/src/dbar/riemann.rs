use std::collections::BTreeMap;

use serde::Serialize;

use super::{DbarError, DbarFactorModel};
use crate::spectra::{CompactnessReport, Rule, SpectralSet, Verdict};

/// Largest number of curve factors; the essential-spectrum formula enumerates
/// all `2ⁿ` form-degree splittings.
pub const MAX_CURVE_FACTORS: usize = 16;

/// Verdict for one form degree `q` of the product.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DegreeVerdict {
    pub q: usize,
    pub verdict: Verdict,
    pub rule: Rule,
    pub witnesses: Vec<Vec<i64>>,
    /// `σ_ess(□_q)` when all factor data it depends on is known.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub essential: Option<SpectralSet>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RiemannSurfaceReport {
    /// Verdict for the requested degree.
    pub report: CompactnessReport,
    /// Verdicts for every degree `0..=n`.
    pub degrees: Vec<DegreeVerdict>,
}

/// What the essential-spectrum formula alone says about one degree.
struct FormulaOutcome {
    verdict: Verdict,
    witnesses: Vec<Vec<i64>>,
    essential: Option<SpectralSet>,
}

/// Evaluates `σ_ess(□_q)` as the union over `K ∈ {0,1}ⁿ` with `|K| = q` and
/// over factors `j` of `σ_ess(□^j_{K_j}) + Σ_{j' ≠ j} σ(□^{j'}_{K_{j'}})`.
fn formula(factors: &[DbarFactorModel], q: usize) -> Result<FormulaOutcome, DbarError> {
    let n = factors.len();
    let mut parts = Vec::new();
    let mut witnesses = Vec::new();
    let mut complete = true;
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != q {
            continue;
        }
        let k: Vec<usize> = (0..n).map(|j| ((mask >> j) & 1) as usize).collect();
        for j in 0..n {
            let ess = factors[j].box_spectrum(0, k[j]).map(|s| s.essential());
            let others: Option<Vec<&SpectralSet>> = (0..n)
                .filter(|&i| i != j)
                .map(|i| factors[i].box_spectrum(0, k[i]).map(|s| s.spectrum()))
                .collect();
            let (Some(ess), Some(others)) = (ess, others) else {
                complete = false;
                continue;
            };
            let mut term = ess.clone();
            for s in others {
                if term.is_empty() {
                    break;
                }
                term = term.minkowski_sum(s)?;
            }
            if !term.is_empty() {
                let mut w: Vec<i64> = k.iter().map(|&v| v as i64).collect();
                w.push(j as i64);
                witnesses.push(w);
                parts.push(term);
            }
        }
    }
    let verdict = if !witnesses.is_empty() {
        Verdict::NonCompact
    } else if complete {
        Verdict::Compact
    } else {
        Verdict::Undecidable
    };
    Ok(FormulaOutcome {
        verdict,
        witnesses,
        essential: complete.then(|| SpectralSet::union_all(&parts)),
    })
}

/// `Some(true)` if every factor has empty `σ_ess(□_k)`, `Some(false)` if a
/// known factor does not, `None` when that depends on unknown data.
fn all_essential_empty(factors: &[DbarFactorModel], k: usize) -> Option<bool> {
    let known: Vec<_> = factors.iter().map(|f| f.box_spectrum(0, k)).collect();
    if known.iter().flatten().any(|s| !s.essential().is_empty()) {
        Some(false)
    } else if known.iter().all(Option::is_some) {
        Some(true)
    } else {
        None
    }
}

/// Factors with a known nonempty essential spectrum in a form degree that
/// degree `d` of the product draws on.
fn factor_witnesses(factors: &[DbarFactorModel], d: usize) -> Vec<Vec<i64>> {
    let n = factors.len();
    let ks: &[usize] = if d == 0 { &[0] } else if d == n { &[1] } else { &[0, 1] };
    (0..n)
        .filter(|&j| ks.iter().any(|&k| factors[j].box_spectrum(0, k).is_some_and(|s| !s.essential().is_empty())))
        .map(|j| vec![j as i64])
        .collect()
}

fn compact_flag(v: Option<bool>) -> Verdict {
    match v {
        Some(true) => Verdict::Compact,
        Some(false) => Verdict::NonCompact,
        None => Verdict::Undecidable,
    }
}

/// Compactness of `N_q` on `(0,q)`-forms over a product of `n ≥ 2` curves,
/// together with the verdicts for every other degree.
///
/// Each degree is decided by the essential-spectrum formula; the propagation
/// rules between degrees are then applied on top, so that missing factor data
/// can still lead to a verdict, and the rule reported is the first one that
/// applies in the order: infinite Bergman space, first solution operator,
/// middle, bottom, top propagation, formula.
pub fn riemann_surface_product_report(factors: &[DbarFactorModel], q: usize) -> Result<RiemannSurfaceReport, DbarError> {
    let n = factors.len();
    if n < 2 {
        return Err(DbarError::TooFewFactors(n));
    }
    if n > MAX_CURVE_FACTORS {
        return Err(DbarError::TooManyFactors { count: n, max: MAX_CURVE_FACTORS });
    }
    for f in factors {
        if f.complex_dimension() != 1 {
            return Err(DbarError::BadDimension {
                name: f.name().to_string(),
                dim: f.complex_dimension(),
            });
        }
    }
    let mut attested = true;
    for f in factors {
        attested &= f.require_attestation()?;
    }
    if q > n {
        return Err(DbarError::DegreeOutOfRange { q, n });
    }
    if !attested {
        let degrees = (0..=n)
            .map(|d| DegreeVerdict {
                q: d,
                verdict: Verdict::Undecidable,
                rule: Rule::ClosedRangeNotAttested,
                witnesses: Vec::new(),
                essential: None,
            })
            .collect();
        let mut report = CompactnessReport::new(Verdict::Undecidable, Rule::ClosedRangeNotAttested, vec![q as i64]);
        report.trace.push("closed range is not attested for every factor".into());
        return Ok(RiemannSurfaceReport { report, degrees });
    }

    let outcomes = (0..=n).map(|d| formula(factors, d)).collect::<Result<Vec<_>, _>>()?;
    let mut trace = Vec::new();
    let mut criteria = BTreeMap::new();

    // the bottom, top and middle degrees read off the factor essential spectra
    let bottom = all_essential_empty(factors, 0);
    let top = all_essential_empty(factors, 1);
    let middle = match (bottom, top) {
        (Some(false), _) | (_, Some(false)) => Some(false),
        (Some(true), Some(true)) => Some(true),
        _ => None,
    };
    let factor_flag = |d: usize| compact_flag(if d == 0 { bottom } else if d == n { top } else { middle });
    for (d, o) in outcomes.iter().enumerate() {
        let flag = factor_flag(d);
        if o.verdict != Verdict::Undecidable && flag != Verdict::Undecidable && o.verdict != flag {
            return Err(DbarError::CriteriaDisagree { location: vec![d as i64] });
        }
    }
    for (name, v) in [("bottom-compact", bottom), ("top-compact", top), ("middle-compact", middle)] {
        if let Some(v) = v {
            criteria.insert(name.to_string(), v);
        }
    }
    trace.push(format!("bottom degree: every factor has empty σ_ess(□_0): {}", show(bottom)));
    trace.push(format!("top degree: every factor has empty σ_ess(□_1): {}", show(top)));
    trace.push(format!("middle degrees: both of the above: {}", show(middle)));

    let bergman = factors.iter().position(DbarFactorModel::has_infinite_bergman_space);
    let first_solution = factors.iter().position(|f| {
        (0..=1).any(|k| f.box_spectrum(0, k).is_some_and(|s| !s.essential().within_zero()))
    });
    match bergman {
        Some(j) => trace.push(format!("factor {j} has an infinite-dimensional Bergman space: degrees 0..={} are non-compact", n - 1)),
        None => trace.push("no factor is known to have an infinite-dimensional Bergman space".into()),
    }
    match first_solution {
        Some(j) => trace.push(format!("factor {j} has a non-compact first solution operator: every degree is non-compact")),
        None => trace.push("no factor is known to have a non-compact first solution operator".into()),
    }
    criteria.insert("infinite-bergman-space".into(), bergman.is_some());
    criteria.insert("first-solution-operator-non-compact".into(), first_solution.is_some());

    let mut current: Vec<Verdict> = outcomes
        .iter()
        .enumerate()
        .map(|(d, o)| match o.verdict {
            Verdict::Undecidable => factor_flag(d),
            v => v,
        })
        .collect();
    let rules = |d: usize, current: &[Verdict]| -> Option<(Rule, Vec<Vec<i64>>)> {
        let is_middle = |e: usize| e >= 1 && e < n;
        if let Some(j) = bergman.filter(|_| d < n) {
            return Some((Rule::InfiniteBergmanSpace, vec![vec![j as i64]]));
        }
        if let Some(j) = first_solution {
            return Some((Rule::FirstSolutionOperator, vec![vec![j as i64]]));
        }
        if is_middle(d) {
            let others: Vec<_> = (1..n)
                .filter(|&e| e != d && current[e] == Verdict::NonCompact)
                .map(|e| vec![e as i64])
                .collect();
            if !others.is_empty() {
                return Some((Rule::MiddleDegreePropagation, others));
            }
        }
        if d != 0 && d < n && current[0] == Verdict::NonCompact {
            return Some((Rule::BottomDegreePropagation, vec![vec![0]]));
        }
        if d != n && d >= 1 && current[n] == Verdict::NonCompact {
            return Some((Rule::TopDegreePropagation, vec![vec![n as i64]]));
        }
        None
    };
    loop {
        let mut changed = false;
        for d in 0..=n {
            if current[d] != Verdict::NonCompact && rules(d, &current).is_some() {
                if current[d] == Verdict::Compact {
                    return Err(DbarError::CriteriaDisagree { location: vec![d as i64] });
                }
                current[d] = Verdict::NonCompact;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }

    let degrees: Vec<DegreeVerdict> = outcomes
        .into_iter()
        .enumerate()
        .map(|(d, o)| {
            let (rule, witnesses) = match rules(d, &current) {
                Some(hit) => hit,
                None if o.verdict != Verdict::Undecidable => (Rule::EssentialSpectrumFormula, o.witnesses),
                None if current[d] != Verdict::Undecidable => (Rule::FactorEssentialEmpty, factor_witnesses(factors, d)),
                None => (Rule::SpectralDataMissing, Vec::new()),
            };
            DegreeVerdict {
                q: d,
                verdict: current[d],
                rule,
                witnesses,
                essential: o.essential,
            }
        })
        .collect();
    for d in &degrees {
        trace.push(format!("degree {}: {:?} by {:?}", d.q, d.verdict, d.rule));
    }

    let target = &degrees[q];
    let mut report = CompactnessReport::new(target.verdict, target.rule, vec![q as i64]);
    report.witnesses = target.witnesses.clone();
    report.criteria = criteria;
    report.essential = target.essential.clone();
    report.trace = trace;
    Ok(RiemannSurfaceReport { report, degrees })
}

fn show(v: Option<bool>) -> &'static str {
    match v {
        Some(true) => "yes",
        Some(false) => "no",
        None => "unknown",
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dbar::{product_box_spectrum, SpaceDim};
    use crate::spectra::rational::int;
    use crate::spectra::{Multiplicity, Multiplicity::*, OperatorSpectrum, SpectralAtom};

    fn op(atoms: Vec<SpectralAtom>) -> OperatorSpectrum {
        OperatorSpectrum::derived(SpectralSet::new(atoms).unwrap())
    }

    /// A curve whose Laplacians share the nonzero part `AP(1,1)` with
    /// multiplicity `rest`, plus kernels of the given multiplicities.
    fn curve(name: &str, rest: Multiplicity, k0: Option<Multiplicity>, k1: Option<Multiplicity>) -> DbarFactorModel {
        let base = vec![SpectralAtom::ap(int(1), int(1), rest)];
        let with = |k: Option<Multiplicity>| {
            let mut a = base.clone();
            a.extend(k.map(|m| SpectralAtom::point(int(0), m)));
            op(a)
        };
        let mut m = DbarFactorModel::unknown(name, 1).unwrap().with_closed_range(true);
        for p in 0..=1 {
            m = m.with_box_spectrum(p, 0, with(k0)).unwrap().with_box_spectrum(p, 1, with(k1)).unwrap();
        }
        m.validated().unwrap()
    }

    fn verdicts(r: &RiemannSurfaceReport) -> Vec<Verdict> {
        r.degrees.iter().map(|d| d.verdict).collect()
    }

    #[test]
    fn compact_curves() {
        let fs = vec![curve("a", Finite(1), Some(Finite(1)), None); 3];
        let r = riemann_surface_product_report(&fs, 1).unwrap();
        assert!(verdicts(&r).iter().all(|&v| v == Verdict::Compact));
        assert_eq!(r.report.rule, Rule::EssentialSpectrumFormula);
        assert_eq!(r.report.essential, Some(SpectralSet::empty()));
    }

    #[test]
    fn infinite_bergman_space_on_three_curves() {
        let mut fs = vec![curve("a", Finite(1), None, None); 3];
        fs[1] = curve("disc", Finite(1), Some(Infinite), None);
        let r = riemann_surface_product_report(&fs, 1).unwrap();
        use Verdict::*;
        assert_eq!(verdicts(&r), vec![NonCompact, NonCompact, NonCompact, Compact]);
        for d in 0..3 {
            assert_eq!(r.degrees[d].rule, Rule::InfiniteBergmanSpace);
            assert_eq!(r.degrees[d].witnesses, vec![vec![1]]);
        }
    }

    #[test]
    fn infinite_top_cohomology_spreads_through_the_middle() {
        let mut fs = vec![curve("a", Finite(1), None, None); 3];
        fs[2] = curve("b", Finite(1), None, Some(Infinite));
        let r = riemann_surface_product_report(&fs, 1).unwrap();
        use Verdict::*;
        assert_eq!(verdicts(&r), vec![Compact, NonCompact, NonCompact, NonCompact]);
        assert_eq!(r.degrees[1].rule, Rule::MiddleDegreePropagation);
        assert_eq!(r.degrees[3].rule, Rule::EssentialSpectrumFormula);
    }

    #[test]
    fn essential_nonzero_spectrum_spreads_everywhere() {
        let mut fs = vec![curve("a", Finite(1), None, None); 2];
        fs[0] = curve("b", Infinite, None, None);
        let r = riemann_surface_product_report(&fs, 0).unwrap();
        assert!(verdicts(&r).iter().all(|&v| v == Verdict::NonCompact));
        assert_eq!(r.report.rule, Rule::FirstSolutionOperator);
    }

    #[test]
    fn unknown_data_is_filled_in_by_propagation() {
        let disc = curve("disc", Finite(1), Some(Infinite), None);
        let blank = DbarFactorModel::unknown("blank", 1).unwrap().with_closed_range(true);
        let r = riemann_surface_product_report(&[disc, blank], 2).unwrap();
        use Verdict::*;
        assert_eq!(verdicts(&r), vec![NonCompact, NonCompact, Undecidable]);
        assert_eq!(r.report.rule, Rule::SpectralDataMissing);
        assert_eq!(r.degrees[0].essential, None);
    }

    #[test]
    fn two_curves_match_the_pairwise_formula() {
        let x = curve("x", Finite(2), Some(Infinite), Some(Finite(1)));
        let y = curve("y", Finite(1), Some(Finite(3)), None);
        let r = riemann_surface_product_report(&[x.clone(), y.clone()], 0).unwrap();
        for d in r.degrees {
            let pair = product_box_spectrum(&x, &y, 0, d.q).unwrap();
            assert_eq!(d.essential.as_ref(), Some(pair.essential()), "degree {}", d.q);
        }
    }

    #[test]
    fn input_checks() {
        let a = curve("a", Finite(1), None, None);
        assert!(matches!(riemann_surface_product_report(&[a.clone()], 0), Err(DbarError::TooFewFactors(1))));
        assert!(matches!(
            riemann_surface_product_report(&[a.clone(), a.clone()], 3),
            Err(DbarError::DegreeOutOfRange { .. })
        ));
        let surface = DbarFactorModel::unknown("s", 2).unwrap().with_closed_range(true);
        assert!(matches!(
            riemann_surface_product_report(&[a.clone(), surface], 0),
            Err(DbarError::BadDimension { .. })
        ));
        let unattested = DbarFactorModel::unknown("u", 1).unwrap().with_bergman_dim(SpaceDim::Finite(0));
        assert!(matches!(
            riemann_surface_product_report(&[a, unattested], 0),
            Err(DbarError::MissingAttestation(_))
        ));
    }
}
