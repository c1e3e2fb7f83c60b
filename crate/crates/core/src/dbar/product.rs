use std::collections::BTreeMap;

use super::{DbarError, DbarFactorModel};
use crate::spectra::{union_of_sums, CompactnessReport, OperatorSpectrum, Rule, Verdict};

/// Factor bidegrees `(p', q', p'', q'')` with `p' + p'' = p` and `q' + q'' = q`,
/// each inside its factor's range.
fn terms(x: &DbarFactorModel, y: &DbarFactorModel, p: usize, q: usize) -> Vec<[usize; 4]> {
    let (nx, ny) = (x.complex_dimension(), y.complex_dimension());
    let mut out = Vec::new();
    for p1 in p.saturating_sub(ny)..=p.min(nx) {
        for q1 in q.saturating_sub(ny)..=q.min(nx) {
            out.push([p1, q1, p - p1, q - q1]);
        }
    }
    out
}

fn check_range(x: &DbarFactorModel, y: &DbarFactorModel, p: usize, q: usize) -> Result<(), DbarError> {
    let max = x.complex_dimension() + y.complex_dimension();
    if p > max || q > max {
        return Err(DbarError::BidegreeOutOfRange {
            p: p as i64,
            q: q as i64,
            max,
        });
    }
    Ok(())
}

type Term<'a> = ([usize; 4], Option<(&'a OperatorSpectrum, &'a OperatorSpectrum)>);

fn lookup<'a>(x: &'a DbarFactorModel, y: &'a DbarFactorModel, p: usize, q: usize) -> Vec<Term<'a>> {
    terms(x, y, p, q)
        .into_iter()
        .map(|t| {
            let pair = x.box_spectrum(t[0], t[1]).zip(y.box_spectrum(t[2], t[3]));
            (t, pair)
        })
        .collect()
}

/// Spectrum of `□_{p,q}` on the product `E ⊠ F → X × Y`: the union over all
/// splittings of the bidegree of `σ(□^E) + σ(□^F)`, and likewise for the
/// essential spectrum.
pub fn product_box_spectrum(x: &DbarFactorModel, y: &DbarFactorModel, p: usize, q: usize) -> Result<OperatorSpectrum, DbarError> {
    check_range(x, y, p, q)?;
    let mut pairs = Vec::new();
    for (t, pair) in lookup(x, y, p, q) {
        let Some(pair) = pair else {
            let (name, a, b) = if x.box_spectrum(t[0], t[1]).is_none() {
                (x.name(), t[0], t[1])
            } else {
                (y.name(), t[2], t[3])
            };
            return Err(DbarError::UnknownSpectrum {
                name: name.to_string(),
                p: a,
                q: b,
            });
        };
        pairs.push(pair);
    }
    Ok(union_of_sums(&pairs)?)
}

fn witness(t: [usize; 4]) -> Vec<i64> {
    t.iter().map(|&v| v as i64).collect()
}

/// Decides compactness of the ∂̄-Neumann operator `N_{p,q}` on the product.
///
/// The ∂̄-complex is nondegenerate, so `N_{p,q}` is compact exactly when the
/// product essential spectrum is empty, which in turn happens exactly when
/// every factor Laplacian met by the bidegree splitting has empty essential
/// spectrum. Unknown factor data makes the verdict undecidable unless a known
/// term or an infinite Bergman space already forces non-compactness.
pub fn neumann_compactness(x: &DbarFactorModel, y: &DbarFactorModel, p: usize, q: usize) -> Result<CompactnessReport, DbarError> {
    check_range(x, y, p, q)?;
    let location = vec![p as i64, q as i64];
    let attested = x.require_attestation()? & y.require_attestation()?;
    if !attested {
        let mut r = CompactnessReport::new(Verdict::Undecidable, Rule::ClosedRangeNotAttested, location);
        r.trace.push("closed range is not attested for both factors".into());
        return Ok(r);
    }

    let mut trace = Vec::new();
    let mut criteria = BTreeMap::new();
    let entries = lookup(x, y, p, q);
    let missing: Vec<_> = entries.iter().filter(|(_, pair)| pair.is_none()).map(|(t, _)| witness(*t)).collect();
    let factor_failing: Vec<_> = entries
        .iter()
        .filter_map(|(t, pair)| pair.map(|(a, b)| (t, a, b)))
        .filter(|(_, a, b)| !a.essential().is_empty() || !b.essential().is_empty())
        .map(|(t, _, _)| witness(*t))
        .collect();
    trace.push(format!(
        "{} bidegree splittings, {} with unknown data, {} with a nonempty factor essential spectrum",
        entries.len(),
        missing.len(),
        factor_failing.len()
    ));

    let essential = if missing.is_empty() {
        Some(product_box_spectrum(x, y, p, q)?.essential().clone())
    } else {
        None
    };
    if let Some(ess) = &essential {
        let factor_empty = factor_failing.is_empty();
        criteria.insert("factor-essential-empty".to_string(), factor_empty);
        criteria.insert("product-essential-empty".to_string(), ess.is_empty());
        criteria.insert("essential-within-zero".to_string(), ess.within_zero());
        if ess.is_empty() != factor_empty || ess.within_zero() != factor_empty {
            return Err(DbarError::CriteriaDisagree { location });
        }
    }

    // an infinite Bergman space on one side reaches every bidegree the other side covers
    let bergman = [(x, y, true), (y, x, false)].into_iter().find_map(|(a, b, left)| {
        let nb = b.complex_dimension();
        (a.has_infinite_bergman_space() && p <= nb && q <= nb).then(|| {
            let t = if left { [0, 0, p, q] } else { [p, q, 0, 0] };
            (a.name().to_string(), t)
        })
    });
    if let Some((name, t)) = &bergman {
        trace.push(format!("{name:?} has an infinite-dimensional Bergman space"));
        if essential.as_ref().is_some_and(|e| e.is_empty()) {
            return Err(DbarError::CriteriaDisagree { location });
        }
        let mut r = CompactnessReport::new(Verdict::NonCompact, Rule::InfiniteBergmanSpace, location);
        r.witnesses = vec![witness(*t)];
        r.criteria = criteria;
        r.essential = essential;
        r.trace = trace;
        return Ok(r);
    }

    let (verdict, rule, witnesses) = if !factor_failing.is_empty() {
        (Verdict::NonCompact, Rule::FactorEssentialEmpty, factor_failing)
    } else if !missing.is_empty() {
        (Verdict::Undecidable, Rule::SpectralDataMissing, missing)
    } else {
        (Verdict::Compact, Rule::FactorEssentialEmpty, Vec::new())
    };
    let mut r = CompactnessReport::new(verdict, rule, location);
    r.witnesses = witnesses;
    r.criteria = criteria;
    r.essential = essential;
    r.trace = trace;
    Ok(r)
}
