use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::rational::{self, Rational};
use super::{Multiplicity, SpectraError};

/// Largest exceptional set materialized by a progression sum.
pub const MAX_EXCEPTIONAL_SPAN: u64 = 5_000_000;

/// A single eigenvalue, or the progression `{base + n·step : n ≥ 0}` with the
/// same multiplicity at every point.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum SpectralAtom {
    Point {
        #[serde(with = "rational::text")]
        value: Rational,
        #[serde(default = "one")]
        mult: Multiplicity,
    },
    #[serde(rename = "ap")]
    Progression {
        #[serde(with = "rational::text")]
        base: Rational,
        #[serde(with = "rational::text")]
        step: Rational,
        #[serde(default = "one")]
        mult: Multiplicity,
    },
}

fn one() -> Multiplicity {
    Multiplicity::ONE
}

impl SpectralAtom {
    pub fn point(value: Rational, mult: Multiplicity) -> Self {
        SpectralAtom::Point { value, mult }
    }

    pub fn ap(base: Rational, step: Rational, mult: Multiplicity) -> Self {
        SpectralAtom::Progression { base, step, mult }
    }

    pub fn mult(&self) -> Multiplicity {
        match self {
            SpectralAtom::Point { mult, .. } | SpectralAtom::Progression { mult, .. } => *mult,
        }
    }

    fn with_mult(&self, mult: Multiplicity) -> Self {
        match self {
            SpectralAtom::Point { value, .. } => SpectralAtom::point(value.clone(), mult),
            SpectralAtom::Progression { base, step, .. } => SpectralAtom::ap(base.clone(), step.clone(), mult),
        }
    }

    /// Smallest value of the atom.
    pub fn start(&self) -> &Rational {
        match self {
            SpectralAtom::Point { value, .. } => value,
            SpectralAtom::Progression { base, .. } => base,
        }
    }

    pub fn step(&self) -> Option<&Rational> {
        match self {
            SpectralAtom::Point { .. } => None,
            SpectralAtom::Progression { step, .. } => Some(step),
        }
    }

    pub fn contains(&self, x: &Rational) -> bool {
        match self {
            SpectralAtom::Point { value, .. } => value == x,
            SpectralAtom::Progression { base, step, .. } => rational::is_multiple(&(x - base), step),
        }
    }

    fn validate(&self) -> Result<(), SpectraError> {
        if self.start().is_negative() {
            return Err(SpectraError::NegativeValue(rational::format(self.start())));
        }
        if let Some(step) = self.step() {
            if !step.is_positive() {
                return Err(SpectraError::NonPositiveStep(rational::format(step)));
            }
        }
        if self.mult() == Multiplicity::Finite(0) {
            return Err(SpectraError::ZeroMultiplicity);
        }
        Ok(())
    }

    fn key(&self) -> (Rational, u8, Rational) {
        match self {
            SpectralAtom::Point { value, .. } => (value.clone(), 0, Rational::zero()),
            SpectralAtom::Progression { base, step, .. } => (base.clone(), 1, step.clone()),
        }
    }

    /// Points of the atom strictly below `cutoff`.
    fn points_below(&self, cutoff: &Rational) -> Vec<Rational> {
        match self {
            SpectralAtom::Point { value, .. } => {
                if value < cutoff {
                    vec![value.clone()]
                } else {
                    Vec::new()
                }
            }
            SpectralAtom::Progression { base, step, .. } => {
                let mut out = Vec::new();
                let mut x = base.clone();
                while &x < cutoff {
                    out.push(x.clone());
                    x += step;
                }
                out
            }
        }
    }

    fn points_up_to(&self, bound: &Rational) -> Vec<Rational> {
        let mut pts = self.points_below(bound);
        if self.contains(bound) {
            pts.push(bound.clone());
        }
        pts
    }
}

/// A subset of `[0, ∞)` built from points and upward arithmetic progressions,
/// together with a multiplicity at each point (the sum over the atoms that
/// contain it).
///
/// Stored in a canonical form, so two sets with the same points and
/// multiplicities compare equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<SpectralAtom>", into = "Vec<SpectralAtom>")]
pub struct SpectralSet {
    atoms: Vec<SpectralAtom>,
}

impl TryFrom<Vec<SpectralAtom>> for SpectralSet {
    type Error = SpectraError;

    fn try_from(atoms: Vec<SpectralAtom>) -> Result<Self, Self::Error> {
        SpectralSet::new(atoms)
    }
}

impl From<SpectralSet> for Vec<SpectralAtom> {
    fn from(s: SpectralSet) -> Self {
        s.atoms
    }
}

impl SpectralSet {
    pub fn new(atoms: Vec<SpectralAtom>) -> Result<Self, SpectraError> {
        for a in &atoms {
            a.validate()?;
        }
        Ok(Self::normalized(atoms))
    }

    fn normalized(atoms: Vec<SpectralAtom>) -> Self {
        Self {
            atoms: normalize(atoms),
        }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn point(value: Rational, mult: Multiplicity) -> Result<Self, SpectraError> {
        Self::new(vec![SpectralAtom::point(value, mult)])
    }

    pub fn ap(base: Rational, step: Rational, mult: Multiplicity) -> Result<Self, SpectraError> {
        Self::new(vec![SpectralAtom::ap(base, step, mult)])
    }

    /// `{0}` with multiplicity one, the identity for [`SpectralSet::minkowski_sum`].
    pub fn zero() -> Self {
        Self::normalized(vec![SpectralAtom::point(Rational::zero(), Multiplicity::ONE)])
    }

    pub fn atoms(&self) -> &[SpectralAtom] {
        &self.atoms
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.atoms.iter().all(|a| a.step().is_none())
    }

    pub fn multiplicity_at(&self, x: &Rational) -> Option<Multiplicity> {
        multiplicity_at(&self.atoms, x)
    }

    pub fn contains(&self, x: &Rational) -> bool {
        self.atoms.iter().any(|a| a.contains(x))
    }

    /// Whether the underlying point set is contained in `{0}`.
    pub fn within_zero(&self) -> bool {
        self.atoms
            .iter()
            .all(|a| matches!(a, SpectralAtom::Point { value, .. } if value.is_zero()))
    }

    /// Whether the underlying point set is exactly `{0}`.
    pub fn is_zero_set(&self) -> bool {
        !self.is_empty() && self.within_zero()
    }

    /// Largest point or progression start.
    pub fn anchor(&self) -> Option<Rational> {
        self.atoms.iter().map(|a| a.start().clone()).max()
    }

    /// Smallest common period of all progressions.
    pub fn period(&self) -> Option<Rational> {
        common_period(&self.atoms)
    }

    pub fn union(&self, other: &Self) -> Self {
        let mut atoms = self.atoms.clone();
        atoms.extend(other.atoms.iter().cloned());
        Self::normalized(atoms)
    }

    pub fn union_all<'a>(sets: impl IntoIterator<Item = &'a SpectralSet>) -> Self {
        let atoms = sets.into_iter().flat_map(|s| s.atoms.iter().cloned()).collect();
        Self::normalized(atoms)
    }

    /// `{x + y : x ∈ self, y ∈ other}`, empty when either side is empty.
    ///
    /// Finite counts are kept exactly only when neither side has untracked
    /// counts and at most one side is infinite. Otherwise every finite count
    /// in the result becomes untracked, which keeps the result independent of
    /// the order in which sums are taken.
    pub fn minkowski_sum(&self, other: &Self) -> Result<Self, SpectraError> {
        let mut atoms = Vec::new();
        for a in &self.atoms {
            for b in &other.atoms {
                atoms.extend(atom_sum(a, b)?);
            }
        }
        let untracked = self.has_untracked_counts()
            || other.has_untracked_counts()
            || (!self.is_finite() && !other.is_finite());
        if untracked {
            for a in &mut atoms {
                if let Multiplicity::Finite(_) = a.mult() {
                    *a = a.with_mult(Multiplicity::Unquantified);
                }
            }
        }
        Ok(Self::normalized(atoms))
    }

    pub fn has_untracked_counts(&self) -> bool {
        self.atoms.iter().any(|a| a.mult() == Multiplicity::Unquantified)
    }

    /// Points of infinite multiplicity. Atoms have no finite accumulation
    /// points, so this is the whole essential spectrum.
    pub fn essential_part(&self) -> Self {
        let atoms = self
            .atoms
            .iter()
            .filter(|a| a.mult().is_infinite())
            .cloned()
            .collect();
        Self::normalized(atoms)
    }

    /// The same set with the point 0 removed.
    pub fn without_zero(&self) -> Self {
        let atoms = self
            .atoms
            .iter()
            .filter_map(|a| match a {
                SpectralAtom::Point { value, .. } if value.is_zero() => None,
                SpectralAtom::Progression { base, step, mult } if base.is_zero() => {
                    Some(SpectralAtom::ap(step.clone(), step.clone(), *mult))
                }
                other => Some(other.clone()),
            })
            .collect();
        Self::normalized(atoms)
    }

    /// All points below `cutoff` with their multiplicities, ascending.
    pub fn enumerate_below(&self, cutoff: &Rational) -> Vec<(Rational, Multiplicity)> {
        let mut acc: BTreeMap<Rational, Multiplicity> = BTreeMap::new();
        for a in &self.atoms {
            for x in a.points_below(cutoff) {
                let slot = acc.entry(x).or_insert(Multiplicity::Finite(0));
                *slot = *slot + a.mult();
            }
        }
        acc.into_iter().collect()
    }

    /// Point-set inclusion, ignoring multiplicities.
    pub fn is_subset_of(&self, other: &Self) -> bool {
        let mut all = self.atoms.clone();
        all.extend(other.atoms.iter().cloned());
        let Some(anchor) = all.iter().map(|a| a.start().clone()).max() else {
            return true;
        };
        let bound = match common_period(&all) {
            Some(p) => anchor + p,
            None => anchor,
        };
        self.atoms
            .iter()
            .flat_map(|a| a.points_up_to(&bound))
            .all(|x| other.contains(&x))
    }
}

fn multiplicity_at(atoms: &[SpectralAtom], x: &Rational) -> Option<Multiplicity> {
    atoms
        .iter()
        .filter(|a| a.contains(x))
        .map(SpectralAtom::mult)
        .reduce(|m, n| m + n)
}

fn common_period(atoms: &[SpectralAtom]) -> Option<Rational> {
    atoms.iter().filter_map(SpectralAtom::step).fold(None, |acc, s| match acc {
        None => Some(s.clone()),
        Some(p) => Some(rational::lcm(&p, s)),
    })
}

fn normalize(atoms: Vec<SpectralAtom>) -> Vec<SpectralAtom> {
    match normalize_scaled(&atoms) {
        Some(out) => out,
        None => normalize_exact(atoms),
    }
}

/// Scaled values beyond this fall back to exact rational arithmetic.
const SCALED_LIMIT: i64 = 1 << 40;

/// [`normalize_exact`] on integers: every value is multiplied by the common
/// denominator first. `None` when there is no progression or the scaled
/// window would be too large.
fn normalize_scaled(atoms: &[SpectralAtom]) -> Option<Vec<SpectralAtom>> {
    use num_integer::Integer;

    let mut denom = BigInt::from(1);
    for a in atoms {
        denom = denom.lcm(a.start().denom());
        if let Some(s) = a.step() {
            denom = denom.lcm(s.denom());
        }
    }
    let scale = |r: &Rational| (r.numer() * (&denom / r.denom())).to_i64().filter(|v| *v <= SCALED_LIMIT);
    let mut scaled = Vec::with_capacity(atoms.len());
    for a in atoms {
        let step = match a.step() {
            Some(s) => Some(scale(s)?),
            None => None,
        };
        scaled.push((scale(a.start())?, step, a.mult()));
    }
    let mut period: Option<i64> = None;
    for s in scaled.iter().filter_map(|a| a.1) {
        let p = period.map_or(s, |p| p.lcm(&s));
        if p > SCALED_LIMIT {
            return None;
        }
        period = Some(p);
    }
    let period = period?;
    let anchor = scaled.iter().map(|a| a.0).max()?;
    let window_end = anchor + period;

    let mut values: BTreeMap<i64, Multiplicity> = BTreeMap::new();
    for &(start, step, mult) in &scaled {
        let mut x = start;
        while x <= window_end {
            let slot = values.entry(x).or_insert(Multiplicity::Finite(0));
            *slot = *slot + mult;
            match step {
                Some(s) => x += s,
                None => break,
            }
        }
    }
    let levels: BTreeSet<Multiplicity> = values.values().copied().collect();

    let unscale = |v: i64| Rational::new(BigInt::from(v), denom.clone());
    let mut out: Vec<SpectralAtom> = Vec::new();
    let mut previous = None;
    for level in levels {
        let weight = level.increment_over(previous);
        previous = Some(level);
        let layer: Vec<i64> = values.iter().filter(|(_, &m)| m >= level).map(|(&x, _)| x).collect();
        let tail: BTreeSet<i64> = layer.iter().copied().filter(|&x| x > anchor).collect();

        let mut starts: Vec<(i64, i64)> = Vec::new();
        if !tail.is_empty() {
            let q = minimal_period_scaled(&tail, anchor, period);
            for &r in tail.iter().filter(|&&x| x <= anchor + q) {
                let mut x = r;
                while x - q >= 0 && values.get(&(x - q)).is_some_and(|&m| m >= level) {
                    x -= q;
                }
                starts.push((x, q));
            }
        }
        for &x in &layer {
            if !starts.iter().any(|&(s, q)| x >= s && (x - s) % q == 0) {
                out.push(SpectralAtom::point(unscale(x), weight));
            }
        }
        out.extend(starts.into_iter().map(|(s, q)| SpectralAtom::ap(unscale(s), unscale(q), weight)));
    }
    Some(merge_identical(out))
}

fn minimal_period_scaled(tail: &BTreeSet<i64>, anchor: i64, period: i64) -> i64 {
    let n = tail.len() as i64;
    let end = anchor + period;
    for k in (2..=n).rev() {
        if n % k != 0 || period % k != 0 {
            continue;
        }
        let q = period / k;
        let invariant = tail.iter().all(|&x| {
            let y = if x + q > end { x + q - period } else { x + q };
            tail.contains(&y)
        });
        if invariant {
            return q;
        }
    }
    period
}

fn merge_identical(atoms: Vec<SpectralAtom>) -> Vec<SpectralAtom> {
    let mut merged: BTreeMap<(Rational, u8, Rational), SpectralAtom> = BTreeMap::new();
    for a in atoms {
        merged
            .entry(a.key())
            .and_modify(|e| *e = e.with_mult(e.mult() + a.mult()))
            .or_insert(a);
    }
    merged.into_values().collect()
}

/// Canonical form of a multiplicity function given by atoms.
///
/// The function `f` is split into level sets `{f ≥ v}` for its distinct values
/// `v`; each level set is written as progressions with its own minimal period
/// (each extended downward as far as possible) plus leftover points, weighted
/// by the increment `v − v_prev`. Identical atoms are then merged. The result
/// depends only on `f`.
fn normalize_exact(atoms: Vec<SpectralAtom>) -> Vec<SpectralAtom> {
    if atoms.is_empty() {
        return atoms;
    }
    let Some(period) = common_period(&atoms) else {
        let mut acc: BTreeMap<Rational, Multiplicity> = BTreeMap::new();
        for a in atoms {
            let m = a.mult();
            let slot = acc.entry(a.start().clone()).or_insert(Multiplicity::Finite(0));
            *slot = *slot + m;
        }
        return acc.into_iter().map(|(v, m)| SpectralAtom::point(v, m)).collect();
    };
    let anchor = atoms.iter().map(|a| a.start().clone()).max().expect("nonempty");
    let window_end = &anchor + &period;

    let mut values: BTreeMap<Rational, Multiplicity> = BTreeMap::new();
    for a in &atoms {
        for x in a.points_up_to(&window_end) {
            let slot = values.entry(x).or_insert(Multiplicity::Finite(0));
            *slot = *slot + a.mult();
        }
    }
    let levels: BTreeSet<Multiplicity> = values.values().copied().collect();

    let mut out: Vec<SpectralAtom> = Vec::new();
    let mut previous = None;
    for level in levels {
        let weight = level.increment_over(previous);
        previous = Some(level);
        let layer: Vec<&Rational> = values.iter().filter(|(_, &m)| m >= level).map(|(x, _)| x).collect();
        let tail: BTreeSet<&Rational> = layer.iter().copied().filter(|x| **x > anchor).collect();

        let mut starts: Vec<(Rational, Rational)> = Vec::new();
        if !tail.is_empty() {
            let q = minimal_period(&tail, &anchor, &period);
            let first_block = &anchor + &q;
            for r in tail.iter().filter(|x| ***x <= first_block) {
                let mut x = (*r).clone();
                loop {
                    let y = &x - &q;
                    if y.is_negative() || values.get(&y).map_or(true, |&m| m < level) {
                        break;
                    }
                    x = y;
                }
                starts.push((x, q.clone()));
            }
        }
        for x in &layer {
            let covered = starts
                .iter()
                .any(|(s, q)| *x >= s && rational::is_multiple(&(*x - s), q));
            if !covered {
                out.push(SpectralAtom::point((*x).clone(), weight));
            }
        }
        out.extend(starts.into_iter().map(|(s, q)| SpectralAtom::ap(s, q, weight)));
    }
    merge_identical(out)
}

/// Smallest `period / k` under which the tail window `(anchor, anchor + period]`
/// of a periodic set is invariant.
fn minimal_period(tail: &BTreeSet<&Rational>, anchor: &Rational, period: &Rational) -> Rational {
    let n = tail.len();
    let end = anchor + period;
    for k in (2..=n).rev() {
        if n % k != 0 {
            continue;
        }
        let q = period / Rational::from_integer(BigInt::from(k));
        let invariant = tail.iter().all(|x| {
            let mut y = *x + &q;
            if y > end {
                y -= period;
            }
            tail.contains(&y)
        });
        if invariant {
            return q;
        }
    }
    period.clone()
}

fn atom_sum(a: &SpectralAtom, b: &SpectralAtom) -> Result<Vec<SpectralAtom>, SpectraError> {
    use SpectralAtom::*;
    let m = a.mult() * b.mult();
    Ok(match (a, b) {
        (Point { value: x, .. }, Point { value: y, .. }) => vec![SpectralAtom::point(x + y, m)],
        (Point { value: x, .. }, Progression { base, step, .. }) | (Progression { base, step, .. }, Point { value: x, .. }) => {
            vec![SpectralAtom::ap(x + base, step.clone(), m)]
        }
        (Progression { base: a0, step: s, .. }, Progression { base: b0, step: t, .. }) => {
            let mult = if m.is_infinite() {
                Multiplicity::Infinite
            } else {
                Multiplicity::Unquantified
            };
            progression_sum(&(a0 + b0), s, t, mult)?
        }
    })
}

/// `{start + i·s + j·t : i, j ≥ 0}` as exceptional points plus a tail with step `gcd(s, t)`.
fn progression_sum(start: &Rational, s: &Rational, t: &Rational, mult: Multiplicity) -> Result<Vec<SpectralAtom>, SpectraError> {
    let g = rational::gcd(s, t);
    let p = (s / &g).to_integer();
    let q = (t / &g).to_integer();
    let frobenius = &p * &q - &p - &q;
    if frobenius.is_negative() {
        return Ok(vec![SpectralAtom::ap(start.clone(), g, mult)]);
    }
    let span = frobenius
        .to_u64()
        .filter(|&f| f <= MAX_EXCEPTIONAL_SPAN)
        .ok_or_else(|| SpectraError::ExceptionalSetTooLarge(frobenius.to_string()))?;
    let (p, q) = (p.to_u64().expect("p ≤ F"), q.to_u64().expect("q ≤ F"));
    let mut representable = vec![false; span as usize + 1];
    let mut i = 0;
    while i <= span {
        let mut k = i;
        while k <= span {
            representable[k as usize] = true;
            k += q;
        }
        i += p;
    }
    let mut out: Vec<SpectralAtom> = representable
        .iter()
        .enumerate()
        .filter(|(_, &r)| r)
        .map(|(k, _)| SpectralAtom::point(start + &g * Rational::from_integer(BigInt::from(k)), mult))
        .collect();
    out.push(SpectralAtom::ap(
        start + &g * Rational::from_integer(BigInt::from(span + 1)),
        g,
        mult,
    ));
    Ok(out)
}
