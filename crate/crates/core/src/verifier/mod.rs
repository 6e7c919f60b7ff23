//! Sampling checks of the double inequality, counterexample search just past
//! the thresholds, and the reference oracle.
//!
//! Every check works on the sign of `ln(Q/M)` evaluated by the lemma module,
//! never on the difference of two rounded mean values: near `x = 0` the gap
//! is `O(x^2)` and would vanish in rounding.

mod bigfloat;
mod corpus;
mod lemma_suite;
pub mod oracle;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check, Result};
use crate::lemma::{log_ratio_unchecked, sign_carrier, BoundedMean};
use crate::means::{check_power, mean, q_mean, Deviation, MeanKind, PositivePair};
use crate::thresholds::weight_to_u;

pub use corpus::{check_seiffert_corpus, CorpusCase, CorpusReport};
pub use lemma_suite::{run_lemma_suite, run_lemma_suite_with_h, LemmaReport, PropertyResult};
pub use oracle::{oracle_eval, OracleValue};

/// Smallest offset from 1 in the sample sets and the lower-side schedule.
pub const MAX_DYADIC_EXPONENT: i32 = 40;

/// Smallest deviation in the log-spaced sample near 0.
pub const LOG_LOW_MIN: f64 = 1e-300;

/// Smallest deviation in the upper-side search schedule.
pub const UPPER_SCHEDULE_MIN: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleConfig {
    pub n_uniform: usize,
    /// Log-spaced deviations in `[1e-300, 0.1]`.
    pub n_log_low: usize,
    /// Deviations `1 - 2^-k` with `k` evenly spread over `[1, 40]`.
    pub n_log_high: usize,
    pub seed: u64,
}

impl Default for SampleConfig {
    fn default() -> Self {
        SampleConfig {
            n_uniform: 60_000,
            n_log_low: 20_000,
            n_log_high: 20_000,
            seed: 0x5eed_0001,
        }
    }
}

impl SampleConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, n) in [
            ("n_uniform", self.n_uniform),
            ("n_log_low", self.n_log_low),
            ("n_log_high", self.n_log_high),
        ] {
            check(n >= 1, name, n as f64, "[1, inf)")?;
        }
        Ok(())
    }

    pub fn total(&self) -> usize {
        self.n_uniform + self.n_log_low + self.n_log_high
    }

    /// The deviations checked, in a fixed order.
    pub fn samples(&self) -> Result<Vec<f64>> {
        self.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut xs = Vec::with_capacity(self.total());
        while xs.len() < self.n_uniform {
            let x: f64 = rng.gen();
            if x > 0.0 {
                xs.push(x);
            }
        }
        let lo = LOG_LOW_MIN.log10();
        let hi = -1.0;
        xs.extend(spread(self.n_log_low).map(|s| 10f64.powf(lo + s * (hi - lo)).max(LOG_LOW_MIN)));
        let kmax = MAX_DYADIC_EXPONENT as f64;
        xs.extend(spread(self.n_log_high).map(|s| 1.0 - (-(1.0 + s * (kmax - 1.0))).exp2()));
        Ok(xs)
    }
}

/// `n` points evenly covering `[0, 1]`, both ends included when `n > 1`.
fn spread(n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| {
        if n == 1 {
            0.0
        } else {
            i as f64 / (n - 1) as f64
        }
    })
}

/// Which half of the double inequality is at stake.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    /// `Q_{t,p} < mean`.
    Lower,
    /// `mean < Q_{t,p}`.
    Upper,
}

impl std::str::FromStr for Side {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "lower" => Ok(Side::Lower),
            "upper" => Ok(Side::Upper),
            other => Err(format!("unknown side `{other}` (expected lower or upper)")),
        }
    }
}

fn kind_of(target: BoundedMean) -> MeanKind {
    match target {
        BoundedMean::NeumanSandor => MeanKind::NeumanSandor,
        BoundedMean::SecondSeiffert => MeanKind::SecondSeiffert,
    }
}

/// A deviation at which one side of the inequality fails.
///
/// `lhs` and `rhs` are the two compared means on the pair `(1+x, 1-x)`,
/// recomputable bit for bit. `margin = rhs - lhs` is derived from the
/// log ratio rather than by subtracting them, so its sign is right even
/// when both round to the same double; it is `<= 0` for a violation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleReport {
    pub target: BoundedMean,
    pub side: Side,
    pub x: f64,
    pub a: f64,
    pub b: f64,
    pub p: f64,
    pub t: f64,
    pub u: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    /// `ln(Q/mean)`.
    pub log_ratio: f64,
    /// `ln(Q/mean) / x^2`.
    pub scaled: f64,
}

impl CounterexampleReport {
    fn build(target: BoundedMean, side: Side, x: f64, t: f64, u: f64, p: f64) -> Self {
        let pair = PositivePair::centered(Deviation::new(x).expect("sample in (0, 1)"));
        let q = q_mean(pair, t, p).expect("parameters checked by caller");
        let m = mean(kind_of(target), pair);
        let log_ratio = log_ratio_unchecked(target, x, u, p);
        let scaled = sign_carrier(target, x, u, p);
        let (lhs, rhs, margin) = match side {
            Side::Lower => (q, m, -m * log_ratio.exp_m1()),
            Side::Upper => (m, q, m * log_ratio.exp_m1()),
        };
        CounterexampleReport {
            target,
            side,
            x,
            a: pair.a(),
            b: pair.b(),
            p,
            t,
            u,
            lhs,
            rhs,
            margin,
            log_ratio,
            scaled,
        }
    }

    /// Recompute every field from `(target, side, x, t, u, p)` and confirm
    /// the violation.
    pub fn reverify(&self) -> bool {
        let again = Self::build(self.target, self.side, self.x, self.t, self.u, self.p);
        again == *self && violates(self.side, self.scaled)
    }
}

fn violates(side: Side, sign: f64) -> bool {
    match side {
        Side::Lower => sign.is_nan() || sign >= 0.0,
        Side::Upper => sign.is_nan() || sign <= 0.0,
    }
}

/// Outcome of a sampled check of one or both sides.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub target: BoundedMean,
    pub p: f64,
    pub t_lower: Option<f64>,
    pub t_upper: Option<f64>,
    pub samples: usize,
    pub seed: u64,
    /// Largest `f/x^2` on the lower side; negative when that side holds.
    pub worst_lower: Option<f64>,
    /// Smallest `f/x^2` on the upper side; positive when that side holds.
    pub worst_upper: Option<f64>,
    pub counterexample: Option<CounterexampleReport>,
}

impl InequalityReport {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }
}

fn check_weight(t: f64) -> Result<()> {
    check(t > 0.5 && t < 1.0, "t", t, "(1/2, 1)")
}

/// Sample `Q_{t_lower,p} < M < Q_{t_upper,p}` on the pairs `(1+x, 1-x)`.
///
/// When a side fails, the report carries the most violating sample
/// (largest `|f|/x^2` with the wrong sign) rather than the first one.
pub fn check_double_inequality(
    p: f64,
    t_lower: f64,
    t_upper: f64,
    cfg: &SampleConfig,
) -> Result<InequalityReport> {
    check_sides(
        BoundedMean::NeumanSandor,
        p,
        Some(t_lower),
        Some(t_upper),
        cfg,
    )
}

/// Sampled check of either or both sides for a chosen bounded mean.
pub fn check_sides(
    target: BoundedMean,
    p: f64,
    t_lower: Option<f64>,
    t_upper: Option<f64>,
    cfg: &SampleConfig,
) -> Result<InequalityReport> {
    for t in t_lower.iter().chain(t_upper.iter()) {
        check_weight(*t)?;
    }
    let with_u = |t: f64| weight_to_u(t).map(|u| (t, u));
    let lower = t_lower.map(with_u).transpose()?;
    let upper = t_upper.map(with_u).transpose()?;
    check_sides_at(target, p, lower, upper, cfg)
}

/// [`check_sides`] with each side given as `(t, u)`, so that callers holding
/// an exact closed form for `u` need not round-trip it through `t`.
pub(crate) fn check_sides_at(
    target: BoundedMean,
    p: f64,
    lower: Option<(f64, f64)>,
    upper: Option<(f64, f64)>,
    cfg: &SampleConfig,
) -> Result<InequalityReport> {
    check_power(p)?;
    let xs = cfg.samples()?;
    let u_lower = lower.map(|(_, u)| u);
    let u_upper = upper.map(|(_, u)| u);
    let signs: Vec<(f64, f64)> = xs
        .par_iter()
        .map(|&x| {
            let lo = u_lower.map_or(f64::NEG_INFINITY, |u| sign_carrier(target, x, u, p));
            let hi = u_upper.map_or(f64::INFINITY, |u| sign_carrier(target, x, u, p));
            (lo, hi)
        })
        .collect();

    // worst[side] = (index, badness) with badness > 0 meaning violated
    let mut worst_lower: Option<f64> = None;
    let mut worst_upper: Option<f64> = None;
    let mut culprit: Option<(usize, Side, f64)> = None;
    for (i, &(lo, hi)) in signs.iter().enumerate() {
        if lower.is_some() {
            worst_lower = Some(worst_lower.map_or(lo, |w| w.max(lo)));
            if violates(Side::Lower, lo) && culprit.is_none_or(|(_, _, b)| lo > b) {
                culprit = Some((i, Side::Lower, lo));
            }
        }
        if upper.is_some() {
            worst_upper = Some(worst_upper.map_or(hi, |w| w.min(hi)));
            if violates(Side::Upper, hi) && culprit.is_none_or(|(_, _, b)| -hi > b) {
                culprit = Some((i, Side::Upper, -hi));
            }
        }
    }
    let counterexample = culprit.map(|(i, side, _)| {
        let (t, u) = match side {
            Side::Lower => lower,
            Side::Upper => upper,
        }
        .expect("side was checked");
        CounterexampleReport::build(target, side, xs[i], t, u, p)
    });
    Ok(InequalityReport {
        target,
        p,
        t_lower: lower.map(|(t, _)| t),
        t_upper: upper.map(|(t, _)| t),
        samples: xs.len(),
        seed: cfg.seed,
        worst_lower,
        worst_upper,
        counterexample,
    })
}

/// Result of a scheduled counterexample search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum Falsification {
    Found(CounterexampleReport),
    /// The schedule was exhausted. This is not a proof that the side holds.
    NotFound {
        schedule_len: usize,
        /// The sample closest to violating, as `f/x^2`.
        closest: f64,
        closest_x: f64,
    },
}

impl Falsification {
    pub fn is_found(&self) -> bool {
        matches!(self, Falsification::Found(_))
    }
}

/// Deviations searched for the lower side: `1 - 2^-k`, `k = 1..=40`.
pub fn lower_schedule() -> Vec<f64> {
    (1..=MAX_DYADIC_EXPONENT)
        .map(|k| 1.0 - (-k as f64).exp2())
        .collect()
}

/// Deviations searched for the upper side: eight per decade from `1e-8`
/// up to about 0.75.
pub fn upper_schedule() -> Vec<f64> {
    (0..64).map(|i| 10f64.powf(-8.0 + i as f64 / 8.0)).collect()
}

/// Look for `x` with `Q_{t,p}(1+x, 1-x) >= M(1+x, 1-x)` near `x = 1`, where
/// the lower side first fails once `(2t-1)^2` exceeds `u_zero(p)`.
pub fn falsify_lower(p: f64, t: f64) -> Result<Falsification> {
    falsify(BoundedMean::NeumanSandor, Side::Lower, p, t)
}

/// Look for `x` with `M(1+x, 1-x) >= Q_{t,p}(1+x, 1-x)` near `x = 0`, where
/// the upper side first fails once `(2t-1)^2` drops below `1/(6p)`.
pub fn falsify_upper(p: f64, t: f64) -> Result<Falsification> {
    falsify(BoundedMean::NeumanSandor, Side::Upper, p, t)
}

/// Scheduled search for either side and either bounded mean. Reports the
/// most violating point of the schedule.
pub fn falsify(target: BoundedMean, side: Side, p: f64, t: f64) -> Result<Falsification> {
    check_weight(t)?;
    falsify_at(target, side, p, t, weight_to_u(t)?)
}

pub(crate) fn falsify_at(
    target: BoundedMean,
    side: Side,
    p: f64,
    t: f64,
    u: f64,
) -> Result<Falsification> {
    check_power(p)?;
    let schedule = match side {
        Side::Lower => lower_schedule(),
        Side::Upper => upper_schedule(),
    };
    // badness: positive means the side fails at that point
    let (x, badness) = schedule
        .iter()
        .map(|&x| {
            let s = sign_carrier(target, x, u, p);
            (x, if side == Side::Lower { s } else { -s })
        })
        .fold((f64::NAN, f64::NEG_INFINITY), |best, cur| {
            if cur.1 > best.1 {
                cur
            } else {
                best
            }
        });
    let report = CounterexampleReport::build(target, side, x, t, u, p);
    if badness >= 0.0 && report.reverify() {
        Ok(Falsification::Found(report))
    } else {
        Ok(Falsification::NotFound {
            schedule_len: schedule.len(),
            closest: report.scaled,
            closest_x: x,
        })
    }
}
