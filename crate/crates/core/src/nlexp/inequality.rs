//! Numeric checks of the sublinear-expectation axioms and of the Markov and
//! Chebyshev inequalities for capacities.

use super::ambiguity::{upper_capacity, upper_expect, AmbiguitySet};
use super::distribution::Distribution;
use super::interval::IntervalSet;
use super::test_function::TestFunction;
use crate::error::{Error, Result};

/// Slack on "holds" flags of the capacity inequalities.
pub const INEQUALITY_SLACK: f64 = 1e-9;
/// Tolerance of the axiom checks.
pub const AXIOM_TOLERANCE: f64 = 1e-8;

/// Both sides of one inequality `lhs <= rhs`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundReport {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

impl BoundReport {
    fn new(lhs: f64, rhs: f64) -> Self {
        BoundReport {
            lhs,
            rhs,
            holds: lhs <= rhs + INEQUALITY_SLACK,
        }
    }
}

/// Points at which a function is sampled over the working domain of an
/// ambiguity set: every atom and a ladder of quantiles of every member.
pub fn working_grid(amb: &AmbiguitySet, extra: &[f64]) -> Vec<f64> {
    const LEVELS: [f64; 13] = [1e-6, 1e-4, 1e-3, 0.01, 0.05, 0.1, 0.25, 0.5, 0.75, 0.9, 0.95, 0.99, 0.999];
    let mut pts: Vec<f64> = extra.to_vec();
    for d in amb.members() {
        match d.discrete_atoms() {
            Some(atoms) => pts.extend(atoms.iter().map(|a| a.value)),
            None => {
                pts.extend(LEVELS.iter().map(|&u| d.lower_quantile(u)));
                pts.extend(LEVELS.iter().map(|&v| d.inverse_sf(v)));
            }
        }
    }
    pts.retain(|x| x.is_finite());
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

/// `V(X >= x) <= E f(X) / f(x)` for positive nondecreasing `f`.
pub fn check_markov(amb: &AmbiguitySet, f: &TestFunction, x: f64) -> Result<BoundReport> {
    let grid = working_grid(amb, &[x]);
    let mut prev: Option<f64> = None;
    for &p in &grid {
        let v = f.eval(p);
        if !(v > 0.0) || prev.is_some_and(|q| v < q) {
            return Err(Error::MonotonicityViolation {
                function: f.name().to_string(),
                at: p,
            });
        }
        prev = Some(v);
    }
    let lhs = upper_capacity(amb, &IntervalSet::at_least(x)).value;
    let rhs = upper_expect(amb, f)?.value / f.eval(x);
    Ok(BoundReport::new(lhs, rhs))
}

/// `V(|X - E X| >= c) <= E |X - E X|^2 / c^2`.
pub fn check_chebyshev(amb: &AmbiguitySet, c: f64) -> Result<BoundReport> {
    if !(c > 0.0) {
        return Err(Error::invalid("c", format!("must be positive, got {c}")));
    }
    let mean = upper_expect(amb, &TestFunction::identity())?.value;
    let lhs = upper_capacity(amb, &IntervalSet::open(mean - c, mean + c).complement()).value;
    let rhs = upper_expect(amb, &TestFunction::centered_square(mean))?.value / (c * c);
    Ok(BoundReport::new(lhs, rhs))
}

/// Outcome of the four axiom checks on one case.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxiomReport {
    /// `phi1 >= phi2` on the sampled grid, so monotonicity was tested.
    pub dominance_applies: bool,
    pub monotonicity: bool,
    pub constants: bool,
    pub homogeneity: bool,
    pub subadditivity: bool,
    pub upper_phi1: f64,
    pub upper_phi2: f64,
    pub upper_sum: f64,
    pub upper_scaled: f64,
    pub upper_constant: f64,
}

impl AxiomReport {
    pub fn all_hold(&self) -> bool {
        self.monotonicity && self.constants && self.homogeneity && self.subadditivity
    }
}

/// Checks monotonicity, preservation of constants, positive homogeneity and
/// subadditivity of the upper expectation on one case.
pub fn check_sublinearity(
    amb: &AmbiguitySet,
    phi1: &TestFunction,
    phi2: &TestFunction,
    lambda: f64,
    c: f64,
) -> Result<AxiomReport> {
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(Error::invalid("lambda", format!("must be a finite nonnegative number, got {lambda}")));
    }
    let e1 = upper_expect(amb, phi1)?.value;
    let e2 = upper_expect(amb, phi2)?.value;
    let esum = upper_expect(amb, &phi1.add(phi2))?.value;
    let escaled = upper_expect(amb, &phi1.scale(lambda))?.value;
    let econst = upper_expect(amb, &TestFunction::constant(c))?.value;

    let dominance_applies = working_grid(amb, &[]).iter().all(|&x| phi1.eval(x) >= phi2.eval(x));
    let tol = |scale: f64| AXIOM_TOLERANCE * scale.abs().max(1.0);
    Ok(AxiomReport {
        dominance_applies,
        monotonicity: !dominance_applies || e1 >= e2 - tol(e2),
        constants: (econst - c).abs() <= tol(c),
        // the quadrature error of E[phi] is multiplied by lambda on the right
        homogeneity: (escaled - lambda * e1).abs() <= tol(lambda.max(lambda * e1.abs())),
        subadditivity: esum <= e1 + e2 + tol(e1.abs() + e2.abs()),
        upper_phi1: e1,
        upper_phi2: e2,
        upper_sum: esum,
        upper_scaled: escaled,
        upper_constant: econst,
    })
}

/// Members whose laws have finite second moments; used by callers that
/// generate admissible Chebyshev cases.
pub fn has_finite_variance(d: &Distribution) -> bool {
    use super::distribution::TailClass;
    match d.tail_class() {
        TailClass::Bounded | TailClass::Light => true,
        TailClass::Heavy { index } => index > 2.0,
    }
}
