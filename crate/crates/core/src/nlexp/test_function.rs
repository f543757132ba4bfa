//! Test functions `phi` applied to random variables.
//!
//! A [`TestFunction`] carries its evaluator together with the growth and
//! Lipschitz data it declares. Membership in the locally Lipschitz class
//! `|phi(x) - phi(y)| <= C (1 + |x|^m + |y|^m) |x - y|` is declared by the
//! constructor and only spot-checked, never proven.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Growth of `|phi(x)|` as `|x| -> inf`, used to decide integrability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Growth {
    Bounded,
    /// `|phi(x)| <= K (1 + |x|^p)`.
    Polynomial(f64),
    Exponential,
}

impl Growth {
    fn max(self, other: Growth) -> Growth {
        use Growth::*;
        match (self, other) {
            (Exponential, _) | (_, Exponential) => Exponential,
            (Polynomial(a), Polynomial(b)) => Polynomial(a.max(b)),
            (Polynomial(a), Bounded) | (Bounded, Polynomial(a)) => Polynomial(a),
            (Bounded, Bounded) => Bounded,
        }
    }
}

/// Declared constants `(C, m)` of the local Lipschitz bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LipschitzBound {
    pub scale: f64,
    pub order: u32,
}

impl LipschitzBound {
    pub fn new(scale: f64, order: u32) -> Self {
        LipschitzBound { scale, order }
    }

    fn sum(self, other: LipschitzBound) -> LipschitzBound {
        LipschitzBound::new(self.scale + other.scale, self.order.max(other.order))
    }
}

type Evaluator = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub struct TestFunction {
    name: String,
    eval: Evaluator,
    growth: Growth,
    lipschitz: Option<LipschitzBound>,
    breakpoints: Vec<f64>,
}

impl fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TestFunction")
            .field("name", &self.name)
            .field("growth", &self.growth)
            .field("lipschitz", &self.lipschitz)
            .field("breakpoints", &self.breakpoints)
            .finish()
    }
}

impl fmt::Display for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

impl TestFunction {
    pub fn new(
        name: impl Into<String>,
        growth: Growth,
        eval: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        TestFunction {
            name: name.into(),
            eval: Arc::new(eval),
            growth,
            lipschitz: None,
            breakpoints: Vec::new(),
        }
    }

    pub fn with_lipschitz(mut self, scale: f64, order: u32) -> Self {
        self.lipschitz = Some(LipschitzBound::new(scale, order));
        self
    }

    /// Points where the function has a kink or jump; quadrature splits there.
    pub fn with_breakpoints(mut self, points: impl IntoIterator<Item = f64>) -> Self {
        self.breakpoints.extend(points);
        self.breakpoints.sort_by(f64::total_cmp);
        self.breakpoints.dedup();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn growth(&self) -> Growth {
        self.growth
    }

    pub fn lipschitz(&self) -> Option<LipschitzBound> {
        self.lipschitz
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        (self.eval)(x)
    }

    pub fn identity() -> Self {
        Self::new("x", Growth::Polynomial(1.0), |x| x).with_lipschitz(1.0, 0)
    }

    pub fn constant(c: f64) -> Self {
        Self::new(format!("{c}"), Growth::Bounded, move |_| c).with_lipschitz(f64::MIN_POSITIVE, 0)
    }

    /// `x^p` for integer `p >= 1`.
    pub fn power(p: u32) -> Self {
        assert!(p >= 1, "power must be at least 1");
        let p_i = p as i32;
        Self::new(format!("x^{p}"), Growth::Polynomial(p as f64), move |x| x.powi(p_i))
            .with_lipschitz(p as f64, p - 1)
    }

    /// `(x - c)^2`.
    pub fn centered_square(c: f64) -> Self {
        Self::new(format!("(x - {c})^2"), Growth::Polynomial(2.0), move |x| (x - c) * (x - c))
            .with_lipschitz(2.0 * (1.0 + c.abs()), 1)
    }

    pub fn abs() -> Self {
        Self::new("|x|", Growth::Polynomial(1.0), f64::abs)
            .with_lipschitz(1.0, 0)
            .with_breakpoints([0.0])
    }

    pub fn exp() -> Self {
        Self::new("exp(x)", Growth::Exponential, f64::exp)
    }

    pub fn tanh() -> Self {
        Self::new("tanh(x)", Growth::Bounded, f64::tanh).with_lipschitz(1.0, 0)
    }

    pub fn sin() -> Self {
        Self::new("sin(x)", Growth::Bounded, f64::sin).with_lipschitz(1.0, 0)
    }

    /// `max(0, x - k)`.
    pub fn call(k: f64) -> Self {
        Self::new(format!("(x - {k})+"), Growth::Polynomial(1.0), move |x| (x - k).max(0.0))
            .with_lipschitz(1.0, 0)
            .with_breakpoints([k])
    }

    /// `min(max(x, lo), hi)`.
    pub fn clamp(lo: f64, hi: f64) -> Self {
        Self::new(format!("clamp(x, {lo}, {hi})"), Growth::Bounded, move |x| x.clamp(lo, hi))
            .with_lipschitz(1.0, 0)
            .with_breakpoints([lo, hi])
    }

    pub fn neg(&self) -> Self {
        let inner = self.eval.clone();
        TestFunction {
            name: format!("-({})", self.name),
            eval: Arc::new(move |x| -inner(x)),
            growth: self.growth,
            lipschitz: self.lipschitz,
            breakpoints: self.breakpoints.clone(),
        }
    }

    /// `lambda * phi`.
    pub fn scale(&self, lambda: f64) -> Self {
        let inner = self.eval.clone();
        TestFunction {
            name: format!("{lambda} * ({})", self.name),
            eval: Arc::new(move |x| lambda * inner(x)),
            growth: if lambda == 0.0 { Growth::Bounded } else { self.growth },
            lipschitz: self
                .lipschitz
                .map(|l| LipschitzBound::new((l.scale * lambda.abs()).max(f64::MIN_POSITIVE), l.order)),
            breakpoints: self.breakpoints.clone(),
        }
    }

    /// `phi + psi`.
    pub fn add(&self, other: &TestFunction) -> Self {
        let (f, g) = (self.eval.clone(), other.eval.clone());
        TestFunction {
            name: format!("({}) + ({})", self.name, other.name),
            eval: Arc::new(move |x| f(x) + g(x)),
            growth: self.growth.max(other.growth),
            lipschitz: match (self.lipschitz, other.lipschitz) {
                (Some(a), Some(b)) => Some(a.sum(b)),
                _ => None,
            },
            breakpoints: {
                let mut b: Vec<f64> = self.breakpoints.iter().chain(&other.breakpoints).copied().collect();
                b.sort_by(f64::total_cmp);
                b.dedup();
                b
            },
        }
    }

    /// Spot-checks the declared Lipschitz bound on random pairs in
    /// `[lo, hi]`. Returns `false` when nothing is declared.
    pub fn spot_check_lipschitz(&self, lo: f64, hi: f64, pairs: usize, seed: u64) -> bool {
        let Some(LipschitzBound { scale, order }) = self.lipschitz else {
            return false;
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..pairs).all(|_| {
            let x = rng.random_range(lo..=hi);
            let y = rng.random_range(lo..=hi);
            let m = order as i32;
            let bound = scale * (1.0 + x.abs().powi(m) + y.abs().powi(m)) * (x - y).abs();
            (self.eval(x) - self.eval(y)).abs() <= bound * (1.0 + 1e-12) + 1e-300
        })
    }
}
