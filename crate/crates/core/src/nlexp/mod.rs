//! Laws, ambiguity sets, upper and lower expectations, capacities and the
//! capacity inequalities.

pub mod ambiguity;
pub mod distribution;
pub mod inequality;
pub mod interval;
pub mod quadrature;
pub mod test_function;

pub use ambiguity::{
    expect_under, expect_under_with, lower_capacity, lower_expect, probability_of, upper_capacity, upper_expect,
    AmbiguitySet, Extremum, DEFAULT_MEMBER_LIMIT,
};
pub use distribution::{Atom, Distribution, DistributionKind, TailClass};
pub use inequality::{check_chebyshev, check_markov, check_sublinearity, AxiomReport, BoundReport};
pub use interval::{Interval, IntervalSet};
pub use quadrature::Quadrature;
pub use test_function::{Growth, LipschitzBound, TestFunction};
