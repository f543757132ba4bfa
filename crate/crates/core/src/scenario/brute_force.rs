//! Exact capacities of path events for small discrete product models, by
//! enumerating every selection and every atom path.

use serde::Serialize;

use super::event::{PathEvent, PathPredicate, ScenarioSelection};
use crate::error::{Error, Result};
use crate::nlexp::Atom;
use crate::truncation::SequenceModel;

/// Largest enumeration size accepted, counted as `prod_k sum_members atoms`.
pub const ENUMERATION_CAP: u128 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExactCapacity {
    pub value: f64,
    /// First selection (in lexicographic order) attaining the value.
    pub selection: ScenarioSelection,
}

/// `max` over selections of the exact probability of `event`.
pub fn brute_force_capacity(model: &SequenceModel, event: PathEvent, n: u64) -> Result<ExactCapacity> {
    if !model.is_product() {
        return Err(Error::ProductRequired);
    }
    let len = usize::try_from(n).expect("level fits in usize");
    model.require(len)?;
    let atoms: Vec<Vec<&[Atom]>> = (1..=len)
        .map(|k| {
            model
                .coordinate(k)?
                .members()
                .iter()
                .map(|d| d.discrete_atoms().ok_or(Error::AtomsRequired { coordinate: k }))
                .collect()
        })
        .collect::<Result<_>>()?;
    let size = atoms.iter().fold(1u128, |acc, members| {
        acc.saturating_mul(members.iter().map(|a| a.len() as u128).sum())
    });
    if size > ENUMERATION_CAP {
        return Err(Error::TooLarge {
            size: size as f64,
            cap: ENUMERATION_CAP as f64,
        });
    }
    let predicate = event.resolve(model, n)?;

    let mut sel = vec![0usize; len];
    let mut best = ExactCapacity {
        value: f64::NEG_INFINITY,
        selection: ScenarioSelection(sel.clone()),
    };
    loop {
        let path: Vec<&[Atom]> = sel.iter().zip(&atoms).map(|(&m, a)| a[m]).collect();
        let p = path_probability(&path, &predicate, 0, 0.0, 1.0);
        if p > best.value {
            best = ExactCapacity {
                value: p,
                selection: ScenarioSelection(sel.clone()),
            };
        }
        // odometer step, last coordinate fastest
        let mut k = len;
        loop {
            if k == 0 {
                return Ok(best);
            }
            k -= 1;
            sel[k] += 1;
            if sel[k] < atoms[k].len() {
                break;
            }
            sel[k] = 0;
        }
    }
}

fn path_probability(path: &[&[Atom]], predicate: &PathPredicate, depth: usize, sum: f64, prob: f64) -> f64 {
    if depth == path.len() {
        return if predicate.holds(sum) { prob } else { 0.0 };
    }
    path[depth]
        .iter()
        .map(|a| path_probability(path, predicate, depth + 1, sum + a.value, prob * a.prob))
        .sum()
}
