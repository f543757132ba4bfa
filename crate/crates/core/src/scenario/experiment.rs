//! Capacity estimates of the deviation events along a schedule of levels.

use std::io;
use std::time::Instant;

use serde::Serialize;

use super::event::PathEvent;
use super::search::{estimate_capacity_lower, estimate_capacity_upper, CapacityEstimate, EstimateBudget};
use crate::error::{Error, Result};
use crate::truncation::{mu_bounds, SequenceModel};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub n: u64,
    pub epsilon: f64,
    pub mu_upper: f64,
    pub mu_lower: f64,
    /// `V(S_n/n >= mu_upper + eps)`.
    pub upper: CapacityEstimate,
    /// `V(S_n/n <= mu_lower - eps)`.
    pub lower: CapacityEstimate,
    /// `v(mu_lower - eps < S_n/n < mu_upper + eps)`.
    pub band: CapacityEstimate,
    /// Condition verdicts, attached by the caller.
    pub psi_pass: Option<bool>,
    pub ui_pass: Option<bool>,
    pub seconds: f64,
}

impl ConvergenceRow {
    pub fn budget_exhausted(&self) -> bool {
        self.upper.budget_exhausted || self.lower.budget_exhausted || self.band.budget_exhausted
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub epsilon: f64,
    pub budget: EstimateBudget,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceReport {
    pub fn attach_verdicts(&mut self, psi_pass: Option<bool>, ui_pass: Option<bool>) {
        for row in &mut self.rows {
            row.psi_pass = psi_pass;
            row.ui_pass = ui_pass;
        }
    }

    pub fn upper_values(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.upper.value).collect()
    }
}

/// Runs the three searches at every level of `n_schedule`, all with the
/// same budget and seed.
pub fn convergence_experiment(
    model: &SequenceModel,
    epsilon: f64,
    n_schedule: &[u64],
    budget: &EstimateBudget,
) -> Result<ConvergenceReport> {
    PathEvent::upper_exceed(epsilon).validate()?;
    budget.validate()?;
    if n_schedule.is_empty() || n_schedule.windows(2).any(|w| w[0] >= w[1]) || n_schedule[0] == 0 {
        return Err(Error::invalid("n_schedule", "must be nonempty, positive and strictly increasing"));
    }
    let rows = n_schedule
        .iter()
        .map(|&n| {
            let start = Instant::now();
            let means = mu_bounds(model, n)?;
            let upper = estimate_capacity_upper(model, PathEvent::upper_exceed(epsilon), n, budget)?;
            let lower = estimate_capacity_upper(model, PathEvent::lower_exceed(epsilon), n, budget)?;
            let band = estimate_capacity_lower(model, PathEvent::band(epsilon), n, budget)?;
            Ok(ConvergenceRow {
                n,
                epsilon,
                mu_upper: means.upper,
                mu_lower: means.lower,
                upper,
                lower,
                band,
                psi_pass: None,
                ui_pass: None,
                seconds: start.elapsed().as_secs_f64(),
            })
        })
        .collect::<Result<_>>()?;
    Ok(ConvergenceReport {
        epsilon,
        budget: *budget,
        rows,
    })
}

fn verdict(v: Option<bool>) -> String {
    v.map_or_else(String::new, |b| b.to_string())
}

/// Writes one row per level and epsilon. Timings are left out so that
/// repeated runs produce identical files.
pub fn write_convergence_csv<W: io::Write>(out: W, reports: &[ConvergenceReport]) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "n",
        "epsilon",
        "mu_upper",
        "mu_lower",
        "v_upper_hat",
        "v_lower_hat",
        "v_band_hat",
        "stderr_upper",
        "stderr_lower",
        "stderr_band",
        "psi_pass",
        "ui_pass",
        "budget_exhausted",
        "upper_selection",
        "lower_selection",
    ])?;
    for r in reports.iter().flat_map(|r| &r.rows) {
        w.write_record([
            r.n.to_string(),
            r.epsilon.to_string(),
            r.mu_upper.to_string(),
            r.mu_lower.to_string(),
            r.upper.value.to_string(),
            r.lower.value.to_string(),
            r.band.value.to_string(),
            r.upper.stderr.to_string(),
            r.lower.stderr.to_string(),
            r.band.stderr.to_string(),
            verdict(r.psi_pass),
            verdict(r.ui_pass),
            r.budget_exhausted().to_string(),
            r.upper.selection.run_length(),
            r.lower.selection.run_length(),
        ])?;
    }
    w.flush()
}
