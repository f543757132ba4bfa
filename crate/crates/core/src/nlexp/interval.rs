//! Finite unions of real intervals, used as events `{X in B}`.

use std::fmt;

/// One interval with independently open or closed ends. Infinite ends are
/// always open.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Interval {
    pub fn new(lo: f64, lo_closed: bool, hi: f64, hi_closed: bool) -> Self {
        Interval {
            lo,
            hi,
            lo_closed: lo_closed && lo.is_finite(),
            hi_closed: hi_closed && hi.is_finite(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.lo.is_nan()
            || self.hi.is_nan()
            || self.lo > self.hi
            || (self.lo == self.hi && !(self.lo_closed && self.hi_closed))
    }

    pub fn contains(&self, x: f64) -> bool {
        let above = if self.lo_closed { x >= self.lo } else { x > self.lo };
        let below = if self.hi_closed { x <= self.hi } else { x < self.hi };
        above && below
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{}, {}{}",
            if self.lo_closed { '[' } else { '(' },
            self.lo,
            self.hi,
            if self.hi_closed { ']' } else { ')' }
        )
    }
}

/// A normalized finite union of pairwise disjoint, non-adjacent intervals in
/// increasing order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct IntervalSet {
    intervals: Vec<Interval>,
}

impl IntervalSet {
    pub fn empty() -> Self {
        IntervalSet::default()
    }

    pub fn real_line() -> Self {
        Self::from_intervals([Interval::new(f64::NEG_INFINITY, false, f64::INFINITY, false)])
    }

    pub fn closed(lo: f64, hi: f64) -> Self {
        Self::from_intervals([Interval::new(lo, true, hi, true)])
    }

    pub fn open(lo: f64, hi: f64) -> Self {
        Self::from_intervals([Interval::new(lo, false, hi, false)])
    }

    pub fn point(x: f64) -> Self {
        Self::closed(x, x)
    }

    /// `[x, inf)`
    pub fn at_least(x: f64) -> Self {
        Self::from_intervals([Interval::new(x, true, f64::INFINITY, false)])
    }

    /// `(x, inf)`
    pub fn greater_than(x: f64) -> Self {
        Self::from_intervals([Interval::new(x, false, f64::INFINITY, false)])
    }

    /// `(-inf, x]`
    pub fn at_most(x: f64) -> Self {
        Self::from_intervals([Interval::new(f64::NEG_INFINITY, false, x, true)])
    }

    /// `(-inf, x)`
    pub fn less_than(x: f64) -> Self {
        Self::from_intervals([Interval::new(f64::NEG_INFINITY, false, x, false)])
    }

    /// `{ |x| > t }`
    pub fn abs_greater_than(t: f64) -> Self {
        Self::less_than(-t).union(&Self::greater_than(t))
    }

    pub fn from_intervals(parts: impl IntoIterator<Item = Interval>) -> Self {
        let mut parts: Vec<Interval> = parts.into_iter().filter(|i| !i.is_empty()).collect();
        parts.sort_by(|a, b| a.lo.total_cmp(&b.lo).then(b.lo_closed.cmp(&a.lo_closed)));
        let mut merged: Vec<Interval> = Vec::with_capacity(parts.len());
        for next in parts {
            if let Some(last) = merged.last_mut() {
                let touches = next.lo < last.hi
                    || (next.lo == last.hi && (next.lo_closed || last.hi_closed));
                if touches {
                    if next.hi > last.hi {
                        last.hi = next.hi;
                        last.hi_closed = next.hi_closed;
                    } else if next.hi == last.hi {
                        last.hi_closed |= next.hi_closed;
                    }
                    continue;
                }
            }
            merged.push(next);
        }
        IntervalSet { intervals: merged }
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn contains(&self, x: f64) -> bool {
        self.intervals.iter().any(|i| i.contains(x))
    }

    pub fn union(&self, other: &IntervalSet) -> IntervalSet {
        Self::from_intervals(self.intervals.iter().chain(other.intervals.iter()).copied())
    }

    pub fn complement(&self) -> IntervalSet {
        let mut gaps = Vec::with_capacity(self.intervals.len() + 1);
        let mut lo = f64::NEG_INFINITY;
        let mut lo_closed = false;
        for i in &self.intervals {
            gaps.push(Interval::new(lo, lo_closed, i.lo, !i.lo_closed));
            lo = i.hi;
            lo_closed = !i.hi_closed;
        }
        gaps.push(Interval::new(lo, lo_closed, f64::INFINITY, false));
        Self::from_intervals(gaps)
    }
}

impl fmt::Display for IntervalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.intervals.is_empty() {
            return write!(f, "{{}}");
        }
        for (idx, i) in self.intervals.iter().enumerate() {
            if idx > 0 {
                write!(f, " U ")?;
            }
            write!(f, "{i}")?;
        }
        Ok(())
    }
}
