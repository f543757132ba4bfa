//! The piecewise-linear cutoff `chi_n` and the truncated variable
//! `Y = X chi_n(|X|)`.

use crate::error::{Error, Result};
use crate::nlexp::{Growth, TestFunction};

/// Cutoff level `n >= 1`: `chi_n` is 1 on `[-n, n]`, 0 outside
/// `(-(n+1), n+1)` and linear in `|x|` in between.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SmoothCutoff {
    level: u64,
}

impl SmoothCutoff {
    pub fn new(level: u64) -> Result<Self> {
        if level == 0 {
            return Err(Error::invalid("n", "cutoff level must be at least 1"));
        }
        Ok(SmoothCutoff { level })
    }

    pub fn level(self) -> u64 {
        self.level
    }

    #[inline]
    pub fn chi(self, x: f64) -> f64 {
        let a = x.abs();
        let n = self.level as f64;
        if a <= n {
            1.0
        } else if a >= n + 1.0 {
            0.0
        } else {
            n + 1.0 - a
        }
    }

    #[inline]
    pub fn tilde_chi(self, x: f64) -> f64 {
        1.0 - self.chi(x)
    }

    #[inline]
    pub fn truncate(self, x: f64) -> f64 {
        x * self.chi(x)
    }

    /// `x -> x chi_n(|x|)` as a bounded test function with its kinks marked.
    pub fn test_function(self) -> TestFunction {
        let n = self.level as f64;
        TestFunction::new(format!("x chi_{}(|x|)", self.level), Growth::Bounded, move |x| {
            SmoothCutoff { level: self.level }.truncate(x)
        })
        .with_lipschitz(2.0 * n + 1.0, 0)
        .with_breakpoints([-(n + 1.0), -n, n, n + 1.0])
    }

    /// `x -> (x chi_n(|x|))^2`.
    pub fn squared_test_function(self) -> TestFunction {
        let n = self.level as f64;
        TestFunction::new(format!("(x chi_{}(|x|))^2", self.level), Growth::Bounded, move |x| {
            let y = SmoothCutoff { level: self.level }.truncate(x);
            y * y
        })
        .with_breakpoints([-(n + 1.0), -n, n, n + 1.0])
    }
}

/// `chi_n(x)`. Panics if `n == 0`.
pub fn chi(n: u64, x: f64) -> f64 {
    cutoff(n).chi(x)
}

/// `1 - chi_n(x)`. Panics if `n == 0`.
pub fn tilde_chi(n: u64, x: f64) -> f64 {
    cutoff(n).tilde_chi(x)
}

/// `x chi_n(|x|)`. Panics if `n == 0`.
pub fn truncate(n: u64, x: f64) -> f64 {
    cutoff(n).truncate(x)
}

fn cutoff(n: u64) -> SmoothCutoff {
    SmoothCutoff::new(n).expect("cutoff level must be at least 1")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn plateau_ramp_and_zero() {
        assert_eq!(chi(3, 2.5), 1.0);
        assert_eq!(chi(3, -4.2), 0.0);
        assert_eq!(chi(3, 3.5), 0.5);
        assert_eq!(chi(3, -3.0), 1.0);
        assert_eq!(chi(3, 4.0), 0.0);
        assert_eq!(truncate(5, 2.0), 2.0);
        assert_eq!(truncate(5, 6.0), 0.0);
        assert_eq!(truncate(5, 5.5), 2.75);
        assert_eq!(truncate(5, -5.5), -2.75);
    }

    #[test]
    #[should_panic]
    fn level_zero_is_rejected() {
        chi(0, 1.0);
    }

    #[test]
    fn test_function_matches() {
        let c = SmoothCutoff::new(4).unwrap();
        let f = c.test_function();
        let g = c.squared_test_function();
        for x in [-6.0, -4.5, -1.0, 0.0, 3.9, 4.25, 5.0, 7.0] {
            assert_eq!(f.eval(x), truncate(4, x));
            assert_eq!(g.eval(x), truncate(4, x).powi(2));
        }
        assert!(f.spot_check_lipschitz(-8.0, 8.0, 4000, 1));
    }

    proptest! {
        #[test]
        fn cutoff_identities(n in 1u64..50, x in -60.0f64..60.0, y in -60.0f64..60.0) {
            let c = chi(n, x);
            prop_assert!((0.0..=1.0).contains(&c));
            prop_assert_eq!(tilde_chi(n, x), 1.0 - c);
            let beyond = if x.abs() > n as f64 { 1.0 } else { 0.0 };
            prop_assert!(tilde_chi(n, x) <= beyond);
            prop_assert!((chi(n, x) - chi(n, y)).abs() <= (x.abs() - y.abs()).abs() + 1e-15);
            let t = truncate(n, x);
            prop_assert!(t.abs() <= x.abs().min(n as f64 + 1.0));
            if x.abs() <= n as f64 { prop_assert_eq!(t, x); }
            if x.abs() >= n as f64 + 1.0 { prop_assert_eq!(t, 0.0); }
            if x.abs() > n as f64 && x.abs() < n as f64 + 1.0 {
                prop_assert!((c - (n as f64 + 1.0 - x.abs())).abs() < 1e-12);
            }
        }
    }
}
