//! Truncated cross-moments `kappa_{n,i,k}` and the Cesàro negative
//! correlation condition.
//!
//! Centering uses the upper truncated means.

use serde::Serialize;

use super::cutoff::SmoothCutoff;
use super::means::truncated_mean_upper;
use super::model::{Coordinates, Dependence, JointLaw, SequenceModel};
use crate::error::{Error, Result};
use crate::nlexp::upper_expect;

/// `E[(Y_k - mu+_k)(Y_i - mu+_i)]` at level `n`.
///
/// Under product dependence the upper expectation of the product factorizes
/// by the definition of independence, giving `(E Y_k - mu+_k)(E Y_i - mu+_i)`,
/// which is exactly 0. Under joint pairs it is the largest cross-moment over
/// the pair's joint members, summed exactly over atoms.
pub fn kappa(model: &SequenceModel, n: u64, i: usize, k: usize) -> Result<f64> {
    if i == k {
        return Err(Error::invalid("k", "kappa needs two distinct coordinates"));
    }
    let cut = SmoothCutoff::new(n)?;
    let (ai, ak) = (model.coordinate(i)?, model.coordinate(k)?);
    let (mi, mk) = (truncated_mean_upper(ai, n)?, truncated_mean_upper(ak, n)?);
    match model.dependence() {
        Dependence::Product => {
            let y = cut.test_function();
            Ok((upper_expect(ak, &y)?.value - mk) * (upper_expect(ai, &y)?.value - mi))
        }
        Dependence::JointPairs(pairs) => {
            let (lo, hi) = (i.min(k), i.max(k));
            let (m_lo, m_hi) = if lo == i { (mi, mk) } else { (mk, mi) };
            Ok(joint_sup(pairs.members(lo, hi)?, cut, m_lo, m_hi))
        }
    }
}

fn joint_sup(members: &[JointLaw], cut: SmoothCutoff, m_first: f64, m_second: f64) -> f64 {
    members
        .iter()
        .map(|law| {
            law.atoms()
                .iter()
                .map(|a| a.prob * (cut.truncate(a.first) - m_first) * (cut.truncate(a.second) - m_second))
                .sum::<f64>()
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CesaroReport {
    pub n: u64,
    /// `(1/n^2) (sum_{i != k} kappa_{n,i,k})^+`.
    pub value: f64,
    pub pass: bool,
}

pub fn cesaro_condition(model: &SequenceModel, n: u64, tol: f64) -> Result<CesaroReport> {
    let len = usize::try_from(n).expect("level fits in usize");
    model.require(len)?;
    let pairs = match model.dependence() {
        Dependence::Product => {
            return Ok(CesaroReport {
                n,
                value: 0.0,
                pass: 0.0 < tol,
            })
        }
        Dependence::JointPairs(p) => p,
    };
    let total = match model.coordinates() {
        Coordinates::Repeated(amb) => {
            // every coordinate shares mu+, so each pair depends only on its law
            let cut = SmoothCutoff::new(n)?;
            let mu = truncated_mean_upper(amb, n)?;
            let mut explicit_sum = 0.0;
            let mut explicit_count = 0u128;
            for (&(_, k), members) in pairs.explicit() {
                if k <= len && !members.is_empty() {
                    explicit_sum += 2.0 * joint_sup(members, cut, mu, mu);
                    explicit_count += 2;
                }
            }
            let ordered = (n as u128) * (n as u128 - 1);
            let remaining = ordered - explicit_count;
            if remaining > 0 {
                let default = pairs.default_members().ok_or_else(|| {
                    let (i, k) = first_unmodeled(pairs.explicit(), len);
                    Error::MissingJoint { i, k }
                })?;
                explicit_sum + remaining as f64 * joint_sup(default, cut, mu, mu)
            } else {
                explicit_sum
            }
        }
        Coordinates::Explicit(_) => {
            let mut acc = 0.0;
            for i in 1..=len {
                for k in i + 1..=len {
                    acc += 2.0 * kappa(model, n, i, k)?;
                }
            }
            acc
        }
    };
    let value = total.max(0.0) / (n as f64 * n as f64);
    Ok(CesaroReport {
        n,
        value,
        pass: value < tol,
    })
}

fn first_unmodeled(explicit: &std::collections::BTreeMap<(usize, usize), Vec<JointLaw>>, len: usize) -> (usize, usize) {
    (1..=len)
        .flat_map(|i| (i + 1..=len).map(move |k| (i, k)))
        .find(|p| !explicit.contains_key(p))
        .unwrap_or((1, 2))
}
