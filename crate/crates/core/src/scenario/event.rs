//! Events on the sample mean `S_n / n`, and the per-coordinate member
//! selections that define one product law of the path.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::truncation::{mu_bounds, SequenceModel, TruncatedMeans};

/// Relative slack on event thresholds, so that sums landing on a threshold
/// up to rounding count as on it.
pub const THRESHOLD_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    /// `S_n/n >= upper mean + eps`.
    UpperExceed,
    /// `S_n/n <= lower mean - eps`.
    LowerExceed,
    /// Either of the two above.
    OutsideBand,
    /// `S_n/n >= c`.
    MeanAtLeast,
    /// `S_n/n <= c`.
    MeanAtMost,
}

/// An event on the path, possibly complemented. For the relative kinds
/// `level` is the margin `eps > 0`; for the absolute ones it is `c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathEvent {
    pub kind: EventKind,
    pub level: f64,
    pub complemented: bool,
}

impl PathEvent {
    fn new(kind: EventKind, level: f64) -> Self {
        PathEvent {
            kind,
            level,
            complemented: false,
        }
    }

    pub fn upper_exceed(eps: f64) -> Self {
        Self::new(EventKind::UpperExceed, eps)
    }

    pub fn lower_exceed(eps: f64) -> Self {
        Self::new(EventKind::LowerExceed, eps)
    }

    pub fn outside_band(eps: f64) -> Self {
        Self::new(EventKind::OutsideBand, eps)
    }

    /// `lower mean - eps < S_n/n < upper mean + eps`.
    pub fn band(eps: f64) -> Self {
        Self::outside_band(eps).complement()
    }

    pub fn mean_at_least(c: f64) -> Self {
        Self::new(EventKind::MeanAtLeast, c)
    }

    pub fn mean_at_most(c: f64) -> Self {
        Self::new(EventKind::MeanAtMost, c)
    }

    pub fn complement(self) -> Self {
        PathEvent {
            complemented: !self.complemented,
            ..self
        }
    }

    fn is_relative(self) -> bool {
        matches!(self.kind, EventKind::UpperExceed | EventKind::LowerExceed | EventKind::OutsideBand)
    }

    pub fn validate(self) -> Result<()> {
        if !self.level.is_finite() {
            return Err(Error::invalid("epsilon", "must be finite"));
        }
        if self.is_relative() && self.level <= 0.0 {
            return Err(Error::invalid("epsilon", "must be positive"));
        }
        Ok(())
    }

    /// Fixes the thresholds at level `n`, computing the truncated means
    /// when the event refers to them.
    pub fn resolve(self, model: &SequenceModel, n: u64) -> Result<PathPredicate> {
        self.validate()?;
        if self.is_relative() {
            Ok(self.resolve_with(&mu_bounds(model, n)?))
        } else {
            Ok(self.resolve_absolute(n))
        }
    }

    /// As [`resolve`](Self::resolve) with precomputed means.
    pub fn resolve_with(self, means: &TruncatedMeans) -> PathPredicate {
        let eps = self.level;
        let (at_least, at_most) = match self.kind {
            EventKind::UpperExceed => (Some(means.upper + eps), None),
            EventKind::LowerExceed => (None, Some(means.lower - eps)),
            EventKind::OutsideBand => (Some(means.upper + eps), Some(means.lower - eps)),
            _ => return self.resolve_absolute(means.n),
        };
        PathPredicate::new(means.n, at_least, at_most, self.complemented)
    }

    fn resolve_absolute(self, n: u64) -> PathPredicate {
        match self.kind {
            EventKind::MeanAtLeast => PathPredicate::new(n, Some(self.level), None, self.complemented),
            EventKind::MeanAtMost => PathPredicate::new(n, None, Some(self.level), self.complemented),
            _ => unreachable!("relative events need truncated means"),
        }
    }
}

impl fmt::Display for PathEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let base = match self.kind {
            EventKind::UpperExceed => format!("S/n >= mu_upper + {}", self.level),
            EventKind::LowerExceed => format!("S/n <= mu_lower - {}", self.level),
            EventKind::OutsideBand => format!("S/n outside (mu_lower - {0}, mu_upper + {0})", self.level),
            EventKind::MeanAtLeast => format!("S/n >= {}", self.level),
            EventKind::MeanAtMost => format!("S/n <= {}", self.level),
        };
        if self.complemented {
            write!(f, "not ({base})")
        } else {
            f.write_str(&base)
        }
    }
}

/// A resolved event: `S/n >= at_least` or `S/n <= at_most`, negated when
/// `complemented`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathPredicate {
    pub n: u64,
    pub at_least: Option<f64>,
    pub at_most: Option<f64>,
    pub complemented: bool,
    lo_cut: f64,
    hi_cut: f64,
}

impl PathPredicate {
    fn new(n: u64, at_least: Option<f64>, at_most: Option<f64>, complemented: bool) -> Self {
        let slack = |t: f64| THRESHOLD_SLACK * t.abs().max(1.0);
        PathPredicate {
            n,
            at_least,
            at_most,
            complemented,
            hi_cut: at_least.map_or(f64::INFINITY, |t| t - slack(t)),
            lo_cut: at_most.map_or(f64::NEG_INFINITY, |t| t + slack(t)),
        }
    }

    /// Whether the path with sum `sum` lies in the event.
    #[inline]
    pub fn holds(&self, sum: f64) -> bool {
        let mean = sum / self.n as f64;
        (mean >= self.hi_cut || mean <= self.lo_cut) != self.complemented
    }
}

/// One member index per coordinate, for coordinates `1..=n` in order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ScenarioSelection(pub Vec<usize>);

impl ScenarioSelection {
    pub fn constant(n: usize, member: usize) -> Self {
        ScenarioSelection(vec![member; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Checks length and member indices against the model.
    pub fn validate(&self, model: &SequenceModel, n: usize) -> Result<()> {
        if self.0.len() != n {
            return Err(Error::invalid(
                "selection",
                format!("has {} entries for {n} coordinates", self.0.len()),
            ));
        }
        for (idx, &m) in self.0.iter().enumerate() {
            let size = model.coordinate(idx + 1)?.len();
            if m >= size {
                return Err(Error::invalid(
                    "selection",
                    format!("member {m} at coordinate {} but only {size} members", idx + 1),
                ));
            }
        }
        Ok(())
    }

    /// Run-length form such as `1*998 0*2`.
    pub fn run_length(&self) -> String {
        let mut parts = Vec::new();
        let mut iter = self.0.iter().peekable();
        while let Some(&m) = iter.next() {
            let mut count = 1;
            while iter.next_if_eq(&&m).is_some() {
                count += 1;
            }
            parts.push(format!("{m}*{count}"));
        }
        parts.join(" ")
    }
}
