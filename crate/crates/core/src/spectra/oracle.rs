//! Brute-force check of Minkowski sums by enumerating points below a cutoff.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use super::rational::Rational;
use super::{Multiplicity, SpectraError, SpectralSet};

/// Enumerated points scaled by a common denominator.
type Scaled = BTreeMap<i128, Multiplicity>;

fn scale(points: &[(Rational, Multiplicity)], denom: &BigInt) -> Option<Scaled> {
    points
        .iter()
        .map(|(x, m)| {
            let v = (x * Rational::from_integer(denom.clone())).to_integer().to_i128()?;
            Some((v, *m))
        })
        .collect()
}

/// Whether the multiplicity claimed by the algebra is compatible with the
/// brute-force count: exact counts must agree, an untracked finite count must
/// face a finite count, and infinite must face infinite.
fn compatible(claimed: Multiplicity, counted: Multiplicity) -> bool {
    use Multiplicity::*;
    match (claimed, counted) {
        (Infinite, c) => c == Infinite,
        (_, Infinite) => false,
        (Finite(a), Finite(b)) => a == b,
        (Finite(_), Unquantified) => false,
        (Unquantified, _) => true,
    }
}

/// Compares `minkowski_sum(a, b)` below `cutoff` with all pairwise sums of
/// the points of `a` and `b` below `cutoff`. Values are nonnegative, so no
/// pair involving a point at or above the cutoff can land below it.
pub fn minkowski_oracle_check(a: &SpectralSet, b: &SpectralSet, cutoff: &Rational) -> Result<bool, SpectraError> {
    let claimed = a.minkowski_sum(b)?.enumerate_below(cutoff);
    let pa = a.enumerate_below(cutoff);
    let pb = b.enumerate_below(cutoff);

    let denom = pa
        .iter()
        .chain(&pb)
        .chain(&claimed)
        .map(|(x, _)| x.denom().clone())
        .fold(cutoff.denom().clone(), |acc, d| acc.lcm(&d));
    let scaled = (
        scale(&pa, &denom),
        scale(&pb, &denom),
        scale(&claimed, &denom),
        (cutoff * Rational::from_integer(denom.clone())).to_integer().to_i128(),
    );
    let (Some(sa), Some(sb), Some(sc), Some(limit)) = scaled else {
        return Ok(exact_check(&pa, &pb, &claimed, cutoff));
    };

    let mut counted: Scaled = BTreeMap::new();
    for (&x, &mx) in &sa {
        for (&y, &my) in sb.range(..limit - x) {
            let slot = counted.entry(x + y).or_insert(Multiplicity::Finite(0));
            *slot = *slot + mx * my;
        }
    }
    Ok(counted.len() == sc.len()
        && counted
            .iter()
            .zip(&sc)
            .all(|((x, m), (y, c))| x == y && compatible(*c, *m)))
}

fn exact_check(
    pa: &[(Rational, Multiplicity)],
    pb: &[(Rational, Multiplicity)],
    claimed: &[(Rational, Multiplicity)],
    cutoff: &Rational,
) -> bool {
    let mut counted: BTreeMap<Rational, Multiplicity> = BTreeMap::new();
    for (x, mx) in pa {
        for (y, my) in pb {
            let s = x + y;
            if &s < cutoff {
                let slot = counted.entry(s).or_insert(Multiplicity::Finite(0));
                *slot = *slot + *mx * *my;
            }
        }
    }
    counted.len() == claimed.len()
        && counted
            .iter()
            .zip(claimed)
            .all(|((x, m), (y, c))| x == y && compatible(*c, *m))
}
