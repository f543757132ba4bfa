//! Sequence models: per-coordinate ambiguity sets plus a dependence rule.
//!
//! Coordinates are numbered from 1, as in `X_1, X_2, ...`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nlexp::distribution::ATOM_MASS_TOLERANCE;
use crate::nlexp::{AmbiguitySet, Distribution};

/// Tolerance when matching a joint law's marginals against declared members.
pub const MARGINAL_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum Coordinates {
    /// One ambiguity set reused for every coordinate.
    Repeated(AmbiguitySet),
    /// `X_1 .. X_N` listed explicitly.
    Explicit(Vec<AmbiguitySet>),
}

/// A joint atom law of a coordinate pair `(X_i, X_k)` with `i < k`; `first`
/// is the value of `X_i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointAtom {
    pub first: f64,
    pub second: f64,
    pub prob: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<JointAtom>", into = "Vec<JointAtom>")]
pub struct JointLaw {
    atoms: Vec<JointAtom>,
}

impl TryFrom<Vec<JointAtom>> for JointLaw {
    type Error = Error;

    fn try_from(atoms: Vec<JointAtom>) -> Result<Self> {
        JointLaw::new(atoms)
    }
}

impl From<JointLaw> for Vec<JointAtom> {
    fn from(law: JointLaw) -> Self {
        law.atoms
    }
}

impl JointLaw {
    pub fn new(atoms: Vec<JointAtom>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidDistribution("joint law has no atoms".into()));
        }
        let mut total = 0.0;
        for a in &atoms {
            if !(a.first.is_finite() && a.second.is_finite()) || !(a.prob >= 0.0 && a.prob <= 1.0) {
                return Err(Error::InvalidDistribution(format!(
                    "joint atom ({}, {}) with probability {}",
                    a.first, a.second, a.prob
                )));
            }
            total += a.prob;
        }
        if (total - 1.0).abs() > ATOM_MASS_TOLERANCE {
            return Err(Error::InvalidDistribution(format!("joint probabilities sum to {total}")));
        }
        Ok(JointLaw { atoms })
    }

    /// From `(first, second, prob)` triples.
    pub fn from_triples(triples: &[(f64, f64, f64)]) -> Result<Self> {
        Self::new(
            triples
                .iter()
                .map(|&(first, second, prob)| JointAtom { first, second, prob })
                .collect(),
        )
    }

    pub fn atoms(&self) -> &[JointAtom] {
        &self.atoms
    }

    pub fn first_marginal(&self) -> Result<Distribution> {
        Distribution::atoms(&self.atoms.iter().map(|a| (a.first, a.prob)).collect::<Vec<_>>())
    }

    pub fn second_marginal(&self) -> Result<Distribution> {
        Distribution::atoms(&self.atoms.iter().map(|a| (a.second, a.prob)).collect::<Vec<_>>())
    }
}

/// Joint atom laws for coordinate pairs. Pairs without an explicit entry
/// use `default`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct JointPairs {
    explicit: BTreeMap<(usize, usize), Vec<JointLaw>>,
    default: Option<Vec<JointLaw>>,
}

impl JointPairs {
    pub fn new() -> Self {
        JointPairs::default()
    }

    /// The same joint ambiguity set for every pair.
    pub fn uniform(members: Vec<JointLaw>) -> Self {
        JointPairs {
            explicit: BTreeMap::new(),
            default: Some(members),
        }
    }

    /// Joint members for the pair `{i, k}`; the law's first component is
    /// the smaller index.
    pub fn with_pair(mut self, i: usize, k: usize, members: Vec<JointLaw>) -> Self {
        self.explicit.insert((i.min(k), i.max(k)), members);
        self
    }

    pub fn explicit(&self) -> &BTreeMap<(usize, usize), Vec<JointLaw>> {
        &self.explicit
    }

    pub fn default_members(&self) -> Option<&[JointLaw]> {
        self.default.as_deref()
    }

    pub fn members(&self, i: usize, k: usize) -> Result<&[JointLaw]> {
        self.explicit
            .get(&(i.min(k), i.max(k)))
            .map(Vec::as_slice)
            .or(self.default.as_deref())
            .filter(|m| !m.is_empty())
            .ok_or(Error::MissingJoint { i, k })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Dependence {
    /// Independent coordinates; path laws are products of member choices.
    Product,
    JointPairs(JointPairs),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SequenceModel {
    coordinates: Coordinates,
    dependence: Dependence,
}

impl SequenceModel {
    pub fn repeated(amb: AmbiguitySet) -> Self {
        SequenceModel {
            coordinates: Coordinates::Repeated(amb),
            dependence: Dependence::Product,
        }
    }

    pub fn explicit(coords: Vec<AmbiguitySet>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::invalid("coordinates", "need at least one coordinate"));
        }
        Ok(SequenceModel {
            coordinates: Coordinates::Explicit(coords),
            dependence: Dependence::Product,
        })
    }

    /// Replaces product dependence by explicit joint pair laws, checking
    /// that every joint member's marginals are members of the declared
    /// coordinate ambiguity sets.
    pub fn with_joint_pairs(mut self, pairs: JointPairs) -> Result<Self> {
        for (&(i, k), members) in &pairs.explicit {
            if i == k || i == 0 {
                return Err(Error::invalid("pairs", format!("bad coordinate pair ({i}, {k})")));
            }
            self.check_marginals(i, k, members)?;
        }
        if let Some(members) = &pairs.default {
            match &self.coordinates {
                Coordinates::Repeated(_) => self.check_marginals(1, 2, members)?,
                Coordinates::Explicit(c) => {
                    for i in 1..=c.len() {
                        for k in i + 1..=c.len() {
                            if !pairs.explicit.contains_key(&(i, k)) {
                                self.check_marginals(i, k, members)?;
                            }
                        }
                    }
                }
            }
        }
        self.dependence = Dependence::JointPairs(pairs);
        Ok(self)
    }

    fn check_marginals(&self, i: usize, k: usize, members: &[JointLaw]) -> Result<()> {
        let (ai, ak) = (self.coordinate(i)?, self.coordinate(k)?);
        for law in members {
            let ok = declared(ai, &law.first_marginal()?) && declared(ak, &law.second_marginal()?);
            if !ok {
                return Err(Error::MarginalMismatch { i, k });
            }
        }
        Ok(())
    }

    pub fn coordinates(&self) -> &Coordinates {
        &self.coordinates
    }

    pub fn dependence(&self) -> &Dependence {
        &self.dependence
    }

    pub fn is_product(&self) -> bool {
        matches!(self.dependence, Dependence::Product)
    }

    /// Number of coordinates, or `None` for a repetition rule.
    pub fn available(&self) -> Option<usize> {
        match &self.coordinates {
            Coordinates::Repeated(_) => None,
            Coordinates::Explicit(c) => Some(c.len()),
        }
    }

    /// Ambiguity set of `X_k`, `k >= 1`.
    pub fn coordinate(&self, k: usize) -> Result<&AmbiguitySet> {
        match &self.coordinates {
            Coordinates::Repeated(a) if k >= 1 => Ok(a),
            Coordinates::Explicit(c) if k >= 1 && k <= c.len() => Ok(&c[k - 1]),
            _ => Err(Error::MissingCoordinates {
                requested: k,
                available: self.available().unwrap_or(usize::MAX),
            }),
        }
    }

    /// Fails unless coordinates `1..=n` exist.
    pub fn require(&self, n: usize) -> Result<()> {
        match self.available() {
            Some(avail) if avail < n => Err(Error::MissingCoordinates {
                requested: n,
                available: avail,
            }),
            _ => Ok(()),
        }
    }

    /// True when every coordinate up to `n` has only atom laws.
    pub fn is_discrete(&self, n: usize) -> bool {
        match &self.coordinates {
            Coordinates::Repeated(a) => a.is_discrete(),
            Coordinates::Explicit(c) => c.iter().take(n).all(AmbiguitySet::is_discrete),
        }
    }
}

fn declared(amb: &AmbiguitySet, marginal: &Distribution) -> bool {
    let Some(target) = marginal.discrete_atoms() else {
        return false;
    };
    amb.members().iter().any(|m| {
        m.discrete_atoms().is_some_and(|atoms| {
            atoms.len() == target.len()
                && atoms.iter().zip(target).all(|(a, b)| {
                    a.value == b.value && (a.prob - b.prob).abs() <= MARGINAL_TOLERANCE
                })
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coin() -> AmbiguitySet {
        AmbiguitySet::singleton(Distribution::two_point(-1.0, 1.0, 0.5).unwrap())
    }

    #[test]
    fn coordinates_are_one_based() {
        let m = SequenceModel::explicit(vec![coin(), coin()]).unwrap();
        assert!(m.coordinate(1).is_ok() && m.coordinate(2).is_ok());
        assert!(matches!(m.coordinate(0), Err(Error::MissingCoordinates { .. })));
        assert!(matches!(m.coordinate(3), Err(Error::MissingCoordinates { requested: 3, available: 2 })));
        assert!(m.require(2).is_ok() && m.require(3).is_err());
        let r = SequenceModel::repeated(coin());
        assert!(r.coordinate(1_000_000).is_ok());
        assert_eq!(r.available(), None);
    }

    #[test]
    fn joint_marginals_are_checked() {
        let anti = JointLaw::from_triples(&[(-1.0, 1.0, 0.5), (1.0, -1.0, 0.5)]).unwrap();
        let m = SequenceModel::repeated(coin()).with_joint_pairs(JointPairs::uniform(vec![anti])).unwrap();
        assert!(!m.is_product());

        let skewed = JointLaw::from_triples(&[(-1.0, 1.0, 0.3), (1.0, -1.0, 0.7)]).unwrap();
        let err = SequenceModel::repeated(coin())
            .with_joint_pairs(JointPairs::uniform(vec![skewed]))
            .unwrap_err();
        assert_eq!(err, Error::MarginalMismatch { i: 1, k: 2 });

        let normal = AmbiguitySet::singleton(Distribution::normal(0.0, 1.0).unwrap());
        let same = JointLaw::from_triples(&[(0.0, 0.0, 1.0)]).unwrap();
        assert!(SequenceModel::repeated(normal)
            .with_joint_pairs(JointPairs::uniform(vec![same]))
            .is_err());
    }

    #[test]
    fn missing_pairs() {
        let pairs = JointPairs::new().with_pair(
            2,
            1,
            vec![JointLaw::from_triples(&[(1.0, 1.0, 0.5), (-1.0, -1.0, 0.5)]).unwrap()],
        );
        let m = SequenceModel::explicit(vec![coin(), coin(), coin()])
            .unwrap()
            .with_joint_pairs(pairs)
            .unwrap();
        let Dependence::JointPairs(p) = m.dependence() else { panic!() };
        assert!(p.members(1, 2).is_ok() && p.members(2, 1).is_ok());
        assert_eq!(p.members(1, 3).unwrap_err(), Error::MissingJoint { i: 1, k: 3 });
    }

    #[test]
    fn joint_law_validation() {
        assert!(JointLaw::from_triples(&[]).is_err());
        assert!(JointLaw::from_triples(&[(0.0, 0.0, 0.6)]).is_err());
        assert!(JointLaw::from_triples(&[(f64::NAN, 0.0, 1.0)]).is_err());
    }
}
