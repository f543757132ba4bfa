//! Ambiguity sets and the sublinear expectation they generate.
//!
//! The upper expectation of `phi(X)` is the maximum of the classical
//! expectations over the members, the lower expectation is its conjugate
//! `-E[-phi]`, and the capacities are the same functionals on indicators.

use serde::{Deserialize, Serialize};

use super::distribution::{Distribution, TailClass};
use super::interval::IntervalSet;
use super::quadrature::Quadrature;
use super::test_function::{Growth, TestFunction};
use crate::error::{Error, Result};

/// Default cap on the number of members of one ambiguity set.
pub const DEFAULT_MEMBER_LIMIT: usize = 64;

/// A nonempty finite family of laws for one coordinate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Distribution>", into = "Vec<Distribution>")]
pub struct AmbiguitySet {
    members: Vec<Distribution>,
}

impl TryFrom<Vec<Distribution>> for AmbiguitySet {
    type Error = Error;

    fn try_from(members: Vec<Distribution>) -> Result<Self> {
        AmbiguitySet::new(members)
    }
}

impl From<AmbiguitySet> for Vec<Distribution> {
    fn from(a: AmbiguitySet) -> Self {
        a.members
    }
}

/// An extremal value together with the member that attains it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremum {
    pub value: f64,
    pub member: usize,
}

impl AmbiguitySet {
    pub fn new(members: Vec<Distribution>) -> Result<Self> {
        Self::with_limit(members, DEFAULT_MEMBER_LIMIT)
    }

    pub fn with_limit(members: Vec<Distribution>, limit: usize) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::InvalidAmbiguitySet("no members".into()));
        }
        if members.len() > limit {
            return Err(Error::InvalidAmbiguitySet(format!(
                "{} members exceed the limit of {limit}",
                members.len()
            )));
        }
        Ok(AmbiguitySet { members })
    }

    pub fn singleton(d: Distribution) -> Self {
        AmbiguitySet { members: vec![d] }
    }

    pub fn members(&self) -> &[Distribution] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn is_discrete(&self) -> bool {
        self.members.iter().all(Distribution::is_discrete)
    }

    pub fn upper_expect(&self, phi: &TestFunction) -> Result<Extremum> {
        upper_expect(self, phi)
    }

    pub fn lower_expect(&self, phi: &TestFunction) -> Result<Extremum> {
        lower_expect(self, phi)
    }

    pub fn upper_capacity(&self, event: &IntervalSet) -> Extremum {
        upper_capacity(self, event)
    }

    pub fn lower_capacity(&self, event: &IntervalSet) -> Extremum {
        lower_capacity(self, event)
    }
}

fn integrable(dist: &Distribution, growth: Growth) -> bool {
    match (dist.tail_class(), growth) {
        (_, Growth::Bounded) | (TailClass::Bounded, _) => true,
        (TailClass::Light, _) => true,
        (TailClass::Heavy { index }, Growth::Polynomial(p)) => p < index,
        (TailClass::Heavy { .. }, Growth::Exponential) => false,
    }
}

/// Classical expectation `E^P phi(X)` under one law.
///
/// Atom laws are summed exactly in atom order. Continuous laws are
/// integrated in the probability domain, `int_0^1 phi(Q(u)) du`, with the
/// upper half folded onto `v = 1 - u` so both tails keep full precision.
pub fn expect_under(dist: &Distribution, phi: &TestFunction) -> Result<f64> {
    expect_under_with(dist, phi, &Quadrature::default())
}

pub fn expect_under_with(dist: &Distribution, phi: &TestFunction, quad: &Quadrature) -> Result<f64> {
    if let Some(atoms) = dist.discrete_atoms() {
        return Ok(atoms.iter().map(|a| a.prob * phi.eval(a.value)).sum());
    }
    if !integrable(dist, phi.growth()) {
        return Err(Error::NonIntegrable {
            function: phi.name().to_string(),
            distribution: dist.to_string(),
        });
    }
    let mut lower_breaks: Vec<f64> = Vec::new();
    let mut upper_breaks: Vec<f64> = Vec::new();
    for &b in phi.breakpoints() {
        let u = dist.cdf(b);
        if u > 0.0 && u < 0.5 {
            lower_breaks.push(u);
        }
        let v = dist.sf(b);
        if v > 0.0 && v < 0.5 {
            upper_breaks.push(v);
        }
    }
    for &u in dist.quantile_breaks() {
        if u < 0.5 {
            lower_breaks.push(u);
        } else if u > 0.5 {
            upper_breaks.push(1.0 - u);
        }
    }
    let lower = quad.integrate(|u| phi.eval(dist.lower_quantile(u)), 0.0, 0.5, &lower_breaks)?;
    let upper = quad.integrate(|v| phi.eval(dist.inverse_sf(v)), 0.0, 0.5, &upper_breaks)?;
    Ok(lower + upper)
}

/// `E phi(X) = max over members of E^theta phi(X)`, with the maximizing member.
///
/// A singleton set returns the member's classical expectation unchanged.
pub fn upper_expect(amb: &AmbiguitySet, phi: &TestFunction) -> Result<Extremum> {
    let mut best: Option<Extremum> = None;
    for (idx, d) in amb.members().iter().enumerate() {
        let value = expect_under(d, phi).map_err(|e| Error::member(idx, e))?;
        if best.is_none_or(|b| value > b.value) {
            best = Some(Extremum { value, member: idx });
        }
    }
    best.ok_or_else(|| Error::InvalidAmbiguitySet("no members".into()))
}

/// `E_lower phi(X) := -E(-phi(X))`; the member is the minimizer.
pub fn lower_expect(amb: &AmbiguitySet, phi: &TestFunction) -> Result<Extremum> {
    let up = upper_expect(amb, &phi.neg())?;
    Ok(Extremum {
        value: -up.value,
        member: up.member,
    })
}

/// `P(X in B)` for one law, from cdf differences or exact atom sums.
pub fn probability_of(dist: &Distribution, event: &IntervalSet) -> f64 {
    if let Some(atoms) = dist.discrete_atoms() {
        return atoms
            .iter()
            .filter(|a| event.contains(a.value))
            // fold from +0: an empty float sum is -0
            .fold(0.0, |acc, a| acc + a.prob)
            .clamp(0.0, 1.0);
    }
    let mut total = 0.0;
    for i in event.intervals() {
        // use whichever tail keeps the difference well conditioned
        let p = if i.lo.is_finite() && dist.cdf(i.lo) > 0.5 {
            let a = if i.lo_closed { dist.sf_inclusive(i.lo) } else { dist.sf(i.lo) };
            let b = if i.hi_closed { dist.sf(i.hi) } else { dist.sf_inclusive(i.hi) };
            a - b
        } else {
            let b = if i.hi_closed { dist.cdf(i.hi) } else { dist.cdf_left(i.hi) };
            let a = if i.lo_closed { dist.cdf_left(i.lo) } else { dist.cdf(i.lo) };
            b - a
        };
        total += p.max(0.0);
    }
    total.clamp(0.0, 1.0)
}

/// Upper capacity `V(X in B) = max over members of P(X in B)`.
pub fn upper_capacity(amb: &AmbiguitySet, event: &IntervalSet) -> Extremum {
    extremal_probability(amb, event, |a, b| a > b)
}

/// Lower capacity `v(X in B) = min over members of P(X in B)`.
pub fn lower_capacity(amb: &AmbiguitySet, event: &IntervalSet) -> Extremum {
    extremal_probability(amb, event, |a, b| a < b)
}

fn extremal_probability(amb: &AmbiguitySet, event: &IntervalSet, better: impl Fn(f64, f64) -> bool) -> Extremum {
    let mut best = Extremum {
        value: probability_of(&amb.members()[0], event),
        member: 0,
    };
    for (idx, d) in amb.members().iter().enumerate().skip(1) {
        let p = probability_of(d, event);
        if better(p, best.value) {
            best = Extremum { value: p, member: idx };
        }
    }
    best
}
