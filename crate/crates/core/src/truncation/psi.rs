//! Tail functionals `gamma_hat(t) = V(|X| > t)` and
//! `psi_n(y) = sum_k y gamma_hat_k(n y)`, and profiles of `psi_n` over a
//! grid in `(0, 1]`.

use std::io;

use rayon::prelude::*;
use serde::Serialize;

use super::model::{Coordinates, SequenceModel};
use crate::error::{Error, Result};
use crate::nlexp::{upper_capacity, AmbiguitySet, IntervalSet};

/// `V(|X| > t)`.
pub fn gamma_hat(amb: &AmbiguitySet, t: f64) -> f64 {
    upper_capacity(amb, &IntervalSet::abs_greater_than(t)).value
}

/// `psi_n(y)` for `y` in `(0, 1]`.
pub fn psi(model: &SequenceModel, n: u64, y: f64) -> Result<f64> {
    if !(y > 0.0 && y <= 1.0) {
        return Err(Error::invalid("y", format!("must lie in (0, 1], got {y}")));
    }
    let len = usize::try_from(n).expect("level fits in usize");
    model.require(len)?;
    let t = n as f64 * y;
    Ok(match model.coordinates() {
        Coordinates::Repeated(amb) => n as f64 * y * gamma_hat(amb, t),
        Coordinates::Explicit(coords) => coords[..len].iter().map(|a| y * gamma_hat(a, t)).sum(),
    })
}

/// 129 points: 64 geometric from `1e-6` towards `0.05`, then 65 uniform on
/// `[0.05, 1]`.
pub fn default_y_grid() -> Vec<f64> {
    let (lo, knee) = (1e-6_f64, 0.05_f64);
    let ratio = (knee / lo).powf(1.0 / 64.0);
    let mut grid: Vec<f64> = (0..64).map(|j| lo * ratio.powi(j)).collect();
    grid.extend((0..=64).map(|i| knee + (1.0 - knee) * i as f64 / 64.0));
    *grid.last_mut().expect("nonempty") = 1.0;
    grid
}

/// `{1/m, 2/m, ..., 1}`.
pub fn uniform_y_grid(m: usize) -> Vec<f64> {
    assert!(m >= 1, "grid needs at least one point");
    (1..=m).map(|i| i as f64 / m as f64).collect()
}

/// Checks that a grid is strictly increasing inside `(0, 1]`.
pub fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::invalid("y_grid", "must not be empty"));
    }
    if !grid.iter().all(|&y| y > 0.0 && y <= 1.0) {
        return Err(Error::invalid("y_grid", "points must lie in (0, 1]"));
    }
    if !grid.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::invalid("y_grid", "must be strictly increasing"));
    }
    Ok(())
}

/// Trapezoid integral over `[0, grid.last]`; the segment `[0, y_0]` uses
/// the limit value 0 at the origin.
pub fn grid_integral(grid: &[f64], values: &[f64]) -> f64 {
    debug_assert_eq!(grid.len(), values.len());
    let Some((&y0, &v0)) = grid.first().zip(values.first()) else {
        return 0.0;
    };
    let mut acc = 0.5 * y0 * v0;
    for (g, v) in grid.windows(2).zip(values.windows(2)) {
        acc += 0.5 * (g[1] - g[0]) * (v[0] + v[1]);
    }
    acc
}

/// `psi_n` sampled on a grid, with its integral over `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PsiProfile {
    pub n: u64,
    pub y_grid: Vec<f64>,
    pub values: Vec<f64>,
    pub integral: f64,
}

impl PsiProfile {
    /// A profile from precomputed values, e.g. a synthetic family.
    pub fn from_values(n: u64, y_grid: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        validate_grid(&y_grid)?;
        if values.len() != y_grid.len() {
            return Err(Error::invalid("values", "length differs from the grid"));
        }
        let integral = grid_integral(&y_grid, &values);
        Ok(PsiProfile {
            n,
            y_grid,
            values,
            integral,
        })
    }

    pub fn max(&self) -> (f64, f64) {
        self.y_grid
            .iter()
            .zip(&self.values)
            .fold((f64::NAN, f64::NEG_INFINITY), |best, (&y, &v)| if v > best.1 { (y, v) } else { best })
    }
}

pub fn psi_profile(model: &SequenceModel, n: u64, grid: &[f64]) -> Result<PsiProfile> {
    validate_grid(grid)?;
    let values = grid.par_iter().map(|&y| psi(model, n, y)).collect::<Result<Vec<_>>>()?;
    PsiProfile::from_values(n, grid.to_vec(), values)
}

/// Writes `n,y,psi` rows.
pub fn write_psi_csv<W: io::Write>(out: W, profiles: &[PsiProfile]) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["n", "y", "psi"])?;
    for p in profiles {
        for (y, v) in p.y_grid.iter().zip(&p.values) {
            w.serialize((p.n, y, v))?;
        }
    }
    w.flush()
}
