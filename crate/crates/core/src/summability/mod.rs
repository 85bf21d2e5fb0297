//! Weight sequences and the summability means built from them.
//!
//! Every named mean is the generic engine applied to a [`WeightSeq`]: the
//! `n`-th mean multiplies `f^(j)` by a factor depending only on the prefix
//! sums of the weights.

mod means;
mod weights;

pub use means::{
    b_mean, cesaro_mean, fejer_mean, mean, mean_from_spectrum, multiplier, norlund_log_mean,
    norlund_mean, riesz_mean, sweep_means, sweep_means_spectrum, t_mean, u_mean, v_mean,
};
pub use weights::{
    a_binom, check_conditions, make_weights, make_weights_unchecked, ConditionReport, Hypotheses,
    MeanKind, Monotonicity, RatioDiagnostic, WeightKind, WeightSeq, CONDITION_SUP_BOUND,
};
