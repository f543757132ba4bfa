//! Upper and lower means of the truncated variables and their Cesàro
//! averages.

use std::io;

use serde::Serialize;

use super::cutoff::SmoothCutoff;
use super::model::{Coordinates, SequenceModel};
use crate::error::Result;
use crate::nlexp::{lower_expect, upper_expect, AmbiguitySet};

/// `E[X chi_n(|X|)]` over the ambiguity set.
pub fn truncated_mean_upper(amb: &AmbiguitySet, n: u64) -> Result<f64> {
    Ok(upper_expect(amb, &SmoothCutoff::new(n)?.test_function())?.value)
}

/// Lower counterpart of [`truncated_mean_upper`].
pub fn truncated_mean_lower(amb: &AmbiguitySet, n: u64) -> Result<f64> {
    Ok(lower_expect(amb, &SmoothCutoff::new(n)?.test_function())?.value)
}

/// Per-coordinate truncated means at level `n` and their averages.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TruncatedMeans {
    pub n: u64,
    /// Upper means of coordinates `1..=n`.
    pub mu_plus: Vec<f64>,
    pub mu_minus: Vec<f64>,
    /// `(1/n) sum mu_plus`.
    pub upper: f64,
    /// `(1/n) sum mu_minus`.
    pub lower: f64,
}

pub fn mu_bounds(model: &SequenceModel, n: u64) -> Result<TruncatedMeans> {
    let len = usize::try_from(n).expect("level fits in usize");
    model.require(len)?;
    let (mu_plus, mu_minus) = match model.coordinates() {
        Coordinates::Repeated(amb) => {
            let (p, m) = (truncated_mean_upper(amb, n)?, truncated_mean_lower(amb, n)?);
            (vec![p; len], vec![m; len])
        }
        Coordinates::Explicit(coords) => {
            let mut plus = Vec::with_capacity(len);
            let mut minus = Vec::with_capacity(len);
            for amb in &coords[..len] {
                plus.push(truncated_mean_upper(amb, n)?);
                minus.push(truncated_mean_lower(amb, n)?);
            }
            (plus, minus)
        }
    };
    let upper = mu_plus.iter().sum::<f64>() / n as f64;
    let lower = mu_minus.iter().sum::<f64>() / n as f64;
    Ok(TruncatedMeans {
        n,
        mu_plus,
        mu_minus,
        upper,
        lower,
    })
}

/// Writes `n,k,mu_plus,mu_minus` rows, one per coordinate.
pub fn write_means_csv<W: io::Write>(out: W, means: &[TruncatedMeans]) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["n", "k", "mu_plus", "mu_minus"])?;
    for m in means {
        for (k, (p, q)) in m.mu_plus.iter().zip(&m.mu_minus).enumerate() {
            w.serialize((m.n, k + 1, p, q))?;
        }
    }
    w.flush()
}
