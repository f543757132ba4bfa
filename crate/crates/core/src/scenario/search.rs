//! Monte Carlo path evaluation under common random numbers, and the
//! coordinate-ascent search for the selection maximizing an event's
//! probability.
//!
//! Replicates are processed in fixed chunks in parallel. Hit counts are
//! integers and each replicate's sum is accumulated in coordinate order, so
//! results do not depend on the number of worker threads.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::event::{PathEvent, PathPredicate, ScenarioSelection};
use super::rng::{fill_uniforms, stream_at, uniform, RESTART_STREAM};
use crate::error::{Error, Result};
use crate::nlexp::{lower_expect, upper_expect, Distribution};
use crate::truncation::{SequenceModel, SmoothCutoff};

/// Replicates per parallel work item.
const CHUNK: usize = 2048;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EstimateBudget {
    pub mc_reps: u64,
    /// Random restarts on top of the deterministic starts.
    pub restarts: u32,
    /// Sweeps over all coordinates per start.
    pub max_passes: u32,
    pub seed: u64,
}

impl EstimateBudget {
    pub fn new(mc_reps: u64, restarts: u32, max_passes: u32, seed: u64) -> Self {
        EstimateBudget {
            mc_reps,
            restarts,
            max_passes,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.mc_reps == 0 {
            return Err(Error::invalid("mc_reps", "must be positive"));
        }
        if self.max_passes == 0 {
            return Err(Error::invalid("max_passes", "must be positive"));
        }
        Ok(())
    }
}

/// Monte Carlo frequency of an event under one selection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EventEstimate {
    pub p_hat: f64,
    pub stderr: f64,
    pub hits: u64,
    pub reps: u64,
}

impl EventEstimate {
    fn from_hits(hits: u64, reps: u64) -> Self {
        let p_hat = hits as f64 / reps as f64;
        EventEstimate {
            p_hat,
            stderr: (p_hat * (1.0 - p_hat) / reps as f64).sqrt(),
            hits,
            reps,
        }
    }
}

/// Result of the selection search.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CapacityEstimate {
    pub value: f64,
    pub stderr: f64,
    pub hits: u64,
    pub reps: u64,
    pub selection: ScenarioSelection,
    /// Coordinate moves evaluated over all starts.
    pub evaluations: u64,
    /// The winning start was still improving after `max_passes` sweeps.
    pub budget_exhausted: bool,
}

impl CapacityEstimate {
    fn new(est: EventEstimate, selection: ScenarioSelection, evaluations: u64, budget_exhausted: bool) -> Self {
        CapacityEstimate {
            value: est.p_hat,
            stderr: est.stderr,
            hits: est.hits,
            reps: est.reps,
            selection,
            evaluations,
            budget_exhausted,
        }
    }
}

/// Product-law path sampler for coordinates `1..=n`.
struct Engine<'a> {
    members: Vec<&'a [Distribution]>,
    seed: u64,
    reps: usize,
    predicate: PathPredicate,
}

impl<'a> Engine<'a> {
    fn new(model: &'a SequenceModel, n: u64, predicate: PathPredicate, budget: &EstimateBudget) -> Result<Self> {
        if !model.is_product() {
            return Err(Error::ProductRequired);
        }
        budget.validate()?;
        let len = usize::try_from(n).expect("level fits in usize");
        model.require(len)?;
        let members = (1..=len)
            .map(|k| model.coordinate(k).map(|a| a.members()))
            .collect::<Result<Vec<_>>>()?;
        Ok(Engine {
            members,
            seed: budget.seed,
            reps: usize::try_from(budget.mc_reps).expect("replicates fit in usize"),
            predicate,
        })
    }

    fn chunks(&self) -> impl IndexedParallelIterator<Item = (usize, usize)> {
        let reps = self.reps;
        (0..reps.div_ceil(CHUNK))
            .into_par_iter()
            .map(move |c| (c * CHUNK, ((c + 1) * CHUNK).min(reps)))
    }

    /// Per-replicate path sums, each accumulated in coordinate order.
    fn sums(&self, sel: &[usize]) -> Vec<f64> {
        let parts: Vec<Vec<f64>> = self
            .chunks()
            .map(|(a, b)| {
                let mut sums = vec![0.0; b - a];
                let mut u = vec![0.0; b - a];
                for (k, (&m, members)) in sel.iter().zip(&self.members).enumerate() {
                    fill_uniforms(self.seed, k + 1, a as u64, &mut u);
                    let d = &members[m];
                    for (s, &ui) in sums.iter_mut().zip(&u) {
                        *s += d.quantile(ui);
                    }
                }
                sums
            })
            .collect();
        parts.concat()
    }

    fn count(&self, sums: &[f64]) -> u64 {
        sums.par_iter().filter(|&&s| self.predicate.holds(s)).count() as u64
    }

    /// Hits for every member at coordinate `k` (0-based) with the rest of
    /// the path fixed.
    fn coordinate_hits(&self, sums: &[f64], k: usize, current: usize) -> Vec<u64> {
        let members = self.members[k];
        let cur = &members[current];
        self.chunks()
            .map(|(a, b)| {
                let mut u = vec![0.0; b - a];
                fill_uniforms(self.seed, k + 1, a as u64, &mut u);
                let mut hits = vec![0u64; members.len()];
                for (&s, &ui) in sums[a..b].iter().zip(&u) {
                    let base = s - cur.quantile(ui);
                    for (h, d) in hits.iter_mut().zip(members) {
                        *h += u64::from(self.predicate.holds(base + d.quantile(ui)));
                    }
                }
                hits
            })
            .reduce(
                || vec![0u64; members.len()],
                |mut x, y| {
                    x.iter_mut().zip(y).for_each(|(p, q)| *p += q);
                    x
                },
            )
    }

    /// Moves coordinate `k` from member `from` to member `to` in `sums`,
    /// with the same arithmetic as [`coordinate_hits`](Self::coordinate_hits).
    fn apply_move(&self, sums: &mut [f64], k: usize, from: usize, to: usize) {
        let (old, new) = (&self.members[k][from], &self.members[k][to]);
        sums.par_chunks_mut(CHUNK).enumerate().for_each(|(c, chunk)| {
            let mut u = vec![0.0; chunk.len()];
            fill_uniforms(self.seed, k + 1, (c * CHUNK) as u64, &mut u);
            for (s, &ui) in chunk.iter_mut().zip(&u) {
                *s = (*s - old.quantile(ui)) + new.quantile(ui);
            }
        });
    }

    fn estimate(&self, sel: &[usize]) -> EventEstimate {
        EventEstimate::from_hits(self.count(&self.sums(sel)), self.reps as u64)
    }

    /// Greedy coordinate ascent from `start`. Returns the final selection,
    /// the number of moves evaluated and whether the pass budget ran out.
    fn climb(&self, mut sel: Vec<usize>, max_passes: u32) -> (Vec<usize>, u64, bool) {
        let mut evaluations = 0;
        if self.members.iter().all(|m| m.len() < 2) {
            return (sel, evaluations, false);
        }
        for _ in 0..max_passes {
            let mut sums = self.sums(&sel);
            let mut hits = self.count(&sums);
            let mut improved = false;
            for k in 0..sel.len() {
                let m = self.members[k].len();
                if m < 2 {
                    continue;
                }
                let cur = sel[k];
                let counts = self.coordinate_hits(&sums, k, cur);
                evaluations += (m - 1) as u64;
                // first index wins ties
                let (best, &best_hits) = counts
                    .iter()
                    .enumerate()
                    .fold((cur, &counts[cur]), |acc, (j, c)| if *c > *acc.1 { (j, c) } else { acc });
                if best != cur && best_hits > hits {
                    self.apply_move(&mut sums, k, cur, best);
                    sel[k] = best;
                    hits = best_hits;
                    improved = true;
                }
            }
            if !improved {
                return (sel, evaluations, false);
            }
        }
        (sel, evaluations, true)
    }
}

/// One path of length `n` under `selection`, replicate 0 of the CRN
/// streams.
pub fn sample_path(model: &SequenceModel, selection: &ScenarioSelection, n: u64, seed: u64) -> Result<Vec<f64>> {
    if !model.is_product() {
        return Err(Error::ProductRequired);
    }
    let len = usize::try_from(n).expect("level fits in usize");
    model.require(len)?;
    selection.validate(model, len)?;
    selection
        .0
        .iter()
        .enumerate()
        .map(|(idx, &m)| Ok(model.coordinate(idx + 1)?.members()[m].quantile(uniform(seed, idx + 1, 0))))
        .collect()
}

/// Monte Carlo frequency of `event` under the product law `selection`.
pub fn event_probability_under(
    model: &SequenceModel,
    selection: &ScenarioSelection,
    event: PathEvent,
    n: u64,
    budget: &EstimateBudget,
) -> Result<EventEstimate> {
    let predicate = event.resolve(model, n)?;
    let engine = Engine::new(model, n, predicate, budget)?;
    selection.validate(model, engine.members.len())?;
    Ok(engine.estimate(&selection.0))
}

/// Deterministic starting selections: the members with the largest (or
/// smallest) truncated mean per coordinate.
fn extreme_selection(model: &SequenceModel, n: u64, upper: bool) -> Result<Vec<usize>> {
    let len = usize::try_from(n).expect("level fits in usize");
    let y = SmoothCutoff::new(n)?.test_function();
    // repeated coordinates share one answer
    if model.available().is_none() {
        let amb = model.coordinate(1)?;
        let pick = if upper { upper_expect(amb, &y)?.member } else { lower_expect(amb, &y)?.member };
        return Ok(vec![pick; len]);
    }
    (1..=len)
        .map(|k| {
            let amb = model.coordinate(k)?;
            Ok(if upper { upper_expect(amb, &y)?.member } else { lower_expect(amb, &y)?.member })
        })
        .collect()
}

fn starts(model: &SequenceModel, event: PathEvent, n: u64, budget: &EstimateBudget) -> Result<Vec<Vec<usize>>> {
    use super::event::EventKind::*;
    let upward = matches!(event.kind, UpperExceed | MeanAtLeast) && !event.complemented;
    let downward = matches!(event.kind, LowerExceed | MeanAtMost) && !event.complemented;
    let mut out = Vec::new();
    if !downward {
        out.push(extreme_selection(model, n, true)?);
    }
    if !upward {
        let low = extreme_selection(model, n, false)?;
        if !out.contains(&low) {
            out.push(low);
        }
    }
    let len = usize::try_from(n).expect("level fits in usize");
    let mut rng = stream_at(budget.seed, RESTART_STREAM, 0);
    for _ in 0..budget.restarts {
        let sel = (1..=len)
            .map(|k| Ok(rng.random_range(0..model.coordinate(k)?.len())))
            .collect::<Result<Vec<_>>>()?;
        out.push(sel);
    }
    Ok(out)
}

/// Searches selections for the largest probability of `event`: greedy
/// per-coordinate member swaps under common random numbers from the
/// extreme-mean starts and `restarts` random ones. The value is the Monte
/// Carlo frequency under the best selection found, a lower-bound-style
/// estimate of the capacity.
pub fn estimate_capacity_upper(
    model: &SequenceModel,
    event: PathEvent,
    n: u64,
    budget: &EstimateBudget,
) -> Result<CapacityEstimate> {
    let predicate = event.resolve(model, n)?;
    let engine = Engine::new(model, n, predicate, budget)?;
    let mut best: Option<(EventEstimate, Vec<usize>, bool)> = None;
    let mut evaluations = 0;
    for start in starts(model, event, n, budget)? {
        let (sel, evals, exhausted) = engine.climb(start, budget.max_passes);
        evaluations += evals;
        let est = engine.estimate(&sel);
        if best.as_ref().is_none_or(|b| est.hits > b.0.hits) {
            best = Some((est, sel, exhausted));
        }
    }
    let (est, sel, exhausted) = best.expect("at least one start");
    Ok(CapacityEstimate::new(est, ScenarioSelection(sel), evaluations, exhausted))
}

/// `1 - V(complement)`, with the search run on the complement event. The
/// returned selection attains the complement's estimate.
pub fn estimate_capacity_lower(
    model: &SequenceModel,
    event: PathEvent,
    n: u64,
    budget: &EstimateBudget,
) -> Result<CapacityEstimate> {
    let c = estimate_capacity_upper(model, event.complement(), n, budget)?;
    Ok(CapacityEstimate {
        value: 1.0 - c.value,
        hits: c.reps - c.hits,
        ..c
    })
}
