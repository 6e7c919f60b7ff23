//! Sharp bounds for the Neuman-Sándor mean by powers of the contra-harmonic
//! mean.
//!
//! For `p >= 1/2` and weights `1/2 < t1, t2 < 1`,
//! `Q_{t1,p}(a,b) < M(a,b) < Q_{t2,p}(a,b)` holds for all `a != b` exactly when
//! `t1 <= lower_weight_threshold(p)` and `t2 >= upper_weight_threshold(p)`.
//! The crate evaluates the means involved, computes the thresholds, and checks
//! the statement three ways: by sampling, by counterexample search just past
//! the thresholds, and by outward-rounded interval bisection.

pub mod certifier;
mod dd;
pub mod error;
pub mod lemma;
pub mod means;
pub mod thresholds;
pub mod verifier;

pub use error::{Error, Result};
pub use lemma::{f, f_prime, find_critical_x, BoundedMean, SignRegime};
pub use means::{
    deviation, mean, normalized_profile, q_mean, weighted_pair, Deviation, MeanKind, PositivePair,
};
pub use thresholds::{
    lower_weight_threshold, t_star, theorem_thresholds, upper_weight_threshold, ThresholdPair,
};
