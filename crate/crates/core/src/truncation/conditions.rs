//! Finite-schedule surrogates for the limit hypotheses: pointwise vanishing
//! of `psi_n`, uniform integrability of the profile family, and the
//! classical Kolmogorov tail condition.
//!
//! A limit cannot be checked by a machine. Each surrogate asks for a small
//! value at the end of a finite schedule together with a nonincreasing
//! trend over the last three schedule points.

use serde::Serialize;

use super::model::SequenceModel;
use super::psi::{grid_integral, psi_profile, PsiProfile};
use crate::error::{Error, Result};
use crate::nlexp::Distribution;

/// Slack allowed when testing that a trend is nonincreasing.
pub const TREND_SLACK: f64 = 1e-12;

fn nonincreasing_tail(values: &[f64]) -> bool {
    let start = values.len().saturating_sub(3);
    values[start..].windows(2).all(|w| w[1] <= w[0] + TREND_SLACK)
}

fn strictly_increasing(xs: &[f64]) -> bool {
    xs.windows(2).all(|w| w[0] < w[1])
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PsiVerdict {
    pub pass: bool,
    /// Largest scheduled level and the grid point maximizing `psi` there.
    pub worst_n: u64,
    pub worst_y: f64,
    pub worst_value: f64,
    /// Every grid point is nonincreasing over the last three levels.
    pub trend_ok: bool,
}

/// Computes profiles on the schedule and judges them with
/// [`psi_verdict`].
pub fn check_psi_vanishes(model: &SequenceModel, n_schedule: &[u64], grid: &[f64], tol: f64) -> Result<PsiVerdict> {
    let profiles = n_schedule
        .iter()
        .map(|&n| psi_profile(model, n, grid))
        .collect::<Result<Vec<_>>>()?;
    psi_verdict(&profiles, tol)
}

/// Pass iff `max_y psi_N(y) < tol` at the largest level `N` and the
/// sequence at each grid point is nonincreasing over the last three levels.
pub fn psi_verdict(profiles: &[PsiProfile], tol: f64) -> Result<PsiVerdict> {
    let last = profiles
        .last()
        .ok_or_else(|| Error::invalid("n_schedule", "must not be empty"))?;
    check_shared_grid(profiles)?;
    let levels: Vec<f64> = profiles.iter().map(|p| p.n as f64).collect();
    if !strictly_increasing(&levels) {
        return Err(Error::invalid("n_schedule", "must be strictly increasing"));
    }
    let trend_ok = (0..last.y_grid.len()).all(|j| {
        let column: Vec<f64> = profiles.iter().map(|p| p.values[j]).collect();
        nonincreasing_tail(&column)
    });
    let (worst_y, worst_value) = last.max();
    Ok(PsiVerdict {
        pass: worst_value < tol && trend_ok,
        worst_n: last.n,
        worst_y,
        worst_value,
        trend_ok,
    })
}

fn check_shared_grid(profiles: &[PsiProfile]) -> Result<()> {
    match profiles.split_first() {
        Some((first, rest)) if rest.iter().any(|p| p.y_grid != first.y_grid) => {
            Err(Error::invalid("profiles", "profiles must share one y grid"))
        }
        _ => Ok(()),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UiVerdict {
    pub pass: bool,
    /// `(M, sup_n int psi_n 1(psi_n > M))` per scheduled level `M`.
    pub tail_mass: Vec<(f64, f64)>,
}

/// Uniform integrability over the computed profile family only: pass iff
/// `sup_n int_0^1 psi_n 1(psi_n > M) dy < tol` at the largest `M`.
pub fn check_uniform_integrability(profiles: &[PsiProfile], m_schedule: &[f64], tol: f64) -> Result<UiVerdict> {
    if profiles.is_empty() {
        return Err(Error::invalid("profiles", "must not be empty"));
    }
    if m_schedule.is_empty() || !strictly_increasing(m_schedule) {
        return Err(Error::invalid("m_schedule", "must be nonempty and strictly increasing"));
    }
    check_shared_grid(profiles)?;
    let tail_mass: Vec<(f64, f64)> = m_schedule
        .iter()
        .map(|&m| {
            let sup = profiles
                .iter()
                .map(|p| {
                    let cut: Vec<f64> = p.values.iter().map(|&v| if v > m { v } else { 0.0 }).collect();
                    grid_integral(&p.y_grid, &cut)
                })
                .fold(0.0, f64::max);
            (m, sup)
        })
        .collect();
    let pass = tail_mass.last().is_some_and(|&(_, v)| v < tol);
    Ok(UiVerdict { pass, tail_mass })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KolmogorovVerdict {
    pub pass: bool,
    /// `(t, t (F(-t) + 1 - F(t)))` on the schedule.
    pub values: Vec<(f64, f64)>,
}

/// `t (F(-t) + 1 - F(t))` on an increasing positive schedule; pass iff the
/// last value is below `tol` and the last three values are nonincreasing.
pub fn kolmogorov_condition(dist: &Distribution, t_schedule: &[f64], tol: f64) -> Result<KolmogorovVerdict> {
    if t_schedule.is_empty() || !strictly_increasing(t_schedule) || t_schedule[0] <= 0.0 {
        return Err(Error::invalid("t_schedule", "must be nonempty, positive and strictly increasing"));
    }
    let values: Vec<(f64, f64)> = t_schedule.iter().map(|&t| (t, t * (dist.cdf(-t) + dist.sf(t)))).collect();
    let column: Vec<f64> = values.iter().map(|v| v.1).collect();
    let pass = column.last().is_some_and(|&v| v < tol) && nonincreasing_tail(&column);
    Ok(KolmogorovVerdict { pass, values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nlexp::AmbiguitySet;
    use crate::truncation::psi::uniform_y_grid;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{E, FRAC_2_PI};

    fn repeated(d: Distribution) -> SequenceModel {
        SequenceModel::repeated(AmbiguitySet::singleton(d))
    }

    #[test]
    fn bounded_support_vanishes() {
        let m = repeated(Distribution::two_point(-1.0, 1.0, 0.5).unwrap());
        let v = check_psi_vanishes(&m, &[16, 100, 1000], &uniform_y_grid(16), 1e-9).unwrap();
        assert!(v.pass);
        assert_eq!(v.worst_value, 0.0);
    }

    #[test]
    fn cauchy_does_not_vanish() {
        let m = repeated(Distribution::cauchy(0.0, 1.0).unwrap());
        let v = check_psi_vanishes(&m, &[10, 100, 1000], &uniform_y_grid(16), 0.1).unwrap();
        assert!(!v.pass);
        assert_eq!(v.worst_y, 1.0);
        assert_abs_diff_eq!(v.worst_value, 1000.0 * FRAC_2_PI * (1e-3f64).atan(), epsilon = 1e-12);
        assert_abs_diff_eq!(v.worst_value, FRAC_2_PI, epsilon = 1e-3);
    }

    #[test]
    fn log_tail_vanishes_slowly() {
        let m = repeated(Distribution::standard_log_tail());
        let v = check_psi_vanishes(&m, &[100, 1000, 10_000], &[1.0], 0.5).unwrap();
        assert!(v.pass);
        assert_abs_diff_eq!(v.worst_value, E / 1e4f64.ln(), epsilon = 1e-12);
        assert_abs_diff_eq!(v.worst_value, 0.295, epsilon = 1e-3);
    }

    #[test]
    fn trend_failure_is_reported() {
        let grid = vec![1.0];
        let p = |n, v| PsiProfile::from_values(n, grid.clone(), vec![v]).unwrap();
        let v = psi_verdict(&[p(1, 0.01), p(2, 0.02), p(3, 0.03)], 0.5).unwrap();
        assert!(!v.trend_ok && !v.pass);
        assert!(psi_verdict(&[p(2, 0.0), p(1, 0.0)], 0.5).is_err());
    }

    #[test]
    fn ui_examples() {
        let grid = uniform_y_grid(1000);
        let bounded: Vec<PsiProfile> = (1..=3)
            .map(|n| PsiProfile::from_values(n, grid.clone(), grid.iter().map(|y| 0.7 * y).collect()).unwrap())
            .collect();
        let v = check_uniform_integrability(&bounded, &[0.1, 0.7, 1.0], 1e-12).unwrap();
        assert!(v.pass);
        assert_eq!(v.tail_mass[1].1, 0.0);
        assert!(v.tail_mass[0].1 > 0.0);

        // psi_n = n 1(y < 1/n): unit mass escapes to y = 0
        let escaping: Vec<PsiProfile> = [10u64, 100]
            .iter()
            .map(|&n| {
                let vals = grid.iter().map(|&y| if y < 1.0 / n as f64 { n as f64 } else { 0.0 }).collect();
                PsiProfile::from_values(n, grid.clone(), vals).unwrap()
            })
            .collect();
        let v = check_uniform_integrability(&escaping, &[1.0, 5.0, 50.0], 0.1).unwrap();
        assert!(!v.pass);
        assert!(v.tail_mass.iter().all(|&(_, mass)| mass > 0.85));
    }

    #[test]
    fn kolmogorov_examples() {
        let u = Distribution::uniform(0.0, 1.0).unwrap();
        let v = kolmogorov_condition(&u, &[2.0, 4.0, 8.0], 1e-12).unwrap();
        assert!(v.pass);
        assert!(v.values.iter().all(|&(_, x)| x == 0.0));

        let c = Distribution::cauchy(0.0, 1.0).unwrap();
        let v = kolmogorov_condition(&c, &[10.0, 100.0, 1000.0], 0.25).unwrap();
        assert!(!v.pass);
        assert_abs_diff_eq!(v.values[2].1, FRAC_2_PI, epsilon = 1e-3);

        let l = Distribution::standard_log_tail();
        let v = kolmogorov_condition(&l, &[1e2, 1e4, 1e6], 0.25).unwrap();
        assert!(v.pass);
        assert_abs_diff_eq!(v.values[2].1, E / 1e6f64.ln(), epsilon = 1e-12);

        assert!(kolmogorov_condition(&l, &[2.0, 1.0], 0.25).is_err());
    }
}
