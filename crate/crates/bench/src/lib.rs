//! Models shared by the benchmarks.

use sublin_core::nlexp::{AmbiguitySet, Distribution};
use sublin_core::truncation::SequenceModel;

/// `+-1` coins with heads probability 0.4 or 0.6.
pub fn coin_model() -> SequenceModel {
    SequenceModel::repeated(
        AmbiguitySet::new(vec![
            Distribution::two_point(-1.0, 1.0, 0.4).expect("valid law"),
            Distribution::two_point(-1.0, 1.0, 0.6).expect("valid law"),
        ])
        .expect("valid set"),
    )
}

/// The symmetric log-tail law with no first moment.
pub fn log_tail_model() -> SequenceModel {
    SequenceModel::repeated(AmbiguitySet::singleton(Distribution::standard_log_tail()))
}

/// Normal laws with means -0.5 and 0.5.
pub fn normal_pair() -> AmbiguitySet {
    AmbiguitySet::new(vec![
        Distribution::normal(-0.5, 1.0).expect("valid law"),
        Distribution::normal(0.5, 1.0).expect("valid law"),
    ])
    .expect("valid set")
}
