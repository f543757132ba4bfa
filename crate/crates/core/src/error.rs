use thiserror::Error;

/// Errors raised by the expectation engine, the truncation diagnostics and
/// the scenario search.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid ambiguity set: {0}")]
    InvalidAmbiguitySet(String),

    #[error("invalid argument `{name}`: {reason}")]
    InvalidArgument { name: &'static str, reason: String },

    #[error("test function `{function}` is not integrable under {distribution}")]
    NonIntegrable { function: String, distribution: String },

    #[error("quadrature did not reach tolerance {tolerance:e} (estimated error {estimate:e} after {panels} panels)")]
    QuadratureFailure {
        tolerance: f64,
        estimate: f64,
        panels: usize,
    },

    #[error("ambiguity member {index}: {source}")]
    Member {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("function `{function}` is not positive and nondecreasing near x = {at}")]
    MonotonicityViolation { function: String, at: f64 },

    #[error("no joint law modeled for coordinate pair ({i}, {k})")]
    MissingJoint { i: usize, k: usize },

    #[error("joint law for pair ({i}, {k}) has marginals outside the declared ambiguity sets")]
    MarginalMismatch { i: usize, k: usize },

    #[error("operation requires product dependence")]
    ProductRequired,

    #[error("operation requires discrete atom laws only (coordinate {coordinate})")]
    AtomsRequired { coordinate: usize },

    #[error("model provides {available} coordinates, {requested} requested")]
    MissingCoordinates { requested: usize, available: usize },

    #[error("no sampler for distribution {0}")]
    SamplerUnavailable(String),

    #[error("enumeration size {size:e} exceeds cap {cap:e}")]
    TooLarge { size: f64, cap: f64 },

    #[error("bound {bound} violated at n = {n}{}: lhs {lhs} > rhs {rhs}", .k.map(|k| format!(", k = {k}")).unwrap_or_default())]
    BoundViolated {
        bound: &'static str,
        n: u64,
        k: Option<usize>,
        lhs: f64,
        rhs: f64,
    },
}

impl Error {
    pub(crate) fn member(index: usize, source: Error) -> Self {
        Error::Member {
            index,
            source: Box::new(source),
        }
    }

    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidArgument {
            name,
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
