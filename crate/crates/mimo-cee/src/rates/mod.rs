//! Achievable-rate and outage-rate machinery for receivers decoding with a
//! fixed per-letter metric under imperfect channel estimation.
//!
//! For a given channel/estimate pair the maximal rate of a metric-based
//! receiver is a worst case over test channels constrained to look no
//! better than the true channel under that metric. In the singular basis of
//! the true channel the constraint becomes a ball around a scaled image of
//! the estimate, and the worst case has a closed form; `worst_case` builds
//! the constants and solutions for both metrics and `outage` turns
//! per-realization rates into outage quantiles and reference capacities.
//!
//! Only square antenna layouts are supported: the diagonalization that
//! reduces the worst case to a vector problem pairs transmit and receive
//! directions one-to-one, and the reduction does not extend cleanly to
//! rectangular layouts.

mod lemma;
mod outage;
mod worst_case;

pub use lemma::lemma1_expectation;
pub use outage::{
    eio_capacity, ergodic_capacity_perfect, ergodic_capacity_with_se, lower_quantile,
    outage_rate, outage_triple,
    rate_curves, RateCurvePoint,
};
pub use worst_case::{
    achievable_rate, mu_opt_improved, mu_opt_mismatched, perfect_csi_rate, rate_triple,
    test_channel_constants, worst_case_numeric, RateTriple, TestChannelConstants,
    TestChannelSolution, WorstCaseProbe,
};
