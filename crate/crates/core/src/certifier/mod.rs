//! Interval-arithmetic proofs that `f_{u,p}` has a fixed sign.
//!
//! A compact region `[x_lo, x_hi]` is bisected at midpoints, depth first,
//! until `f_enclosure` has the claimed strict sign on every piece. Near
//! `x = 0` the enclosure of `f` itself is useless (it is `O(x^2)` with
//! `O(x^2)` width), so `(0, eps]` is handled through the derivative instead:
//! `f' = prefactor * (u - g1/g2)` with a positive prefactor and `f(0+) = 0`,
//! so a fixed sign of `u - g1/g2` there fixes the sign of `f`.
//! `g1/x^3` and `g2/x^3` are enclosed by alternating series in `x^2` with
//! the first omitted term as remainder bound.

pub mod interval;

use serde::{Deserialize, Serialize};

use crate::error::{check, Error, Result};
use crate::means::check_power;
use crate::thresholds::{u_high, u_zero};
pub use interval::Interval;

/// Largest `eps` for which the series enclosures near 0 are used.
pub const SERIES_LIMIT: f64 = 0.0625; // 2^-4

/// `(0, eps]` is handed to the endpoint certificate in `certify_theorem`.
pub const THEOREM_EPSILON: f64 = SERIES_LIMIT;

/// Upper end of the compact region in `certify_theorem`.
pub const THEOREM_X_MAX: f64 = 1.0 - 1e-6;

pub const DEFAULT_MAX_DEPTH: u32 = 60;

/// Give up once this many pieces have been certified in one run.
pub const MAX_LEAVES: usize = 1 << 20;

/// `u` closer than this to `1/(6p)` leaves the sign of `f` near 0 to terms
/// of order `x^4`; the endpoint certificate refuses it.
pub const DEGENERACY_TOLERANCE: f64 = 1e-6;

const SERIES_TERMS: usize = 9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sign {
    Positive,
    Negative,
}

impl Sign {
    /// Distance of `iv` from zero on the claimed side; positive iff the
    /// whole interval has the claimed strict sign.
    fn slack(self, iv: Interval) -> f64 {
        match self {
            Sign::Positive => iv.lo(),
            Sign::Negative => -iv.hi(),
        }
    }
}

impl std::str::FromStr for Sign {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "+" | "positive" => Ok(Sign::Positive),
            "-" | "negative" => Ok(Sign::Negative),
            other => Err(format!("unknown sign `{other}` (expected + or -)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateKind {
    /// Sign of `f` on a compact `[x_lo, x_hi]` from enclosures of `f`.
    Compact,
    /// Sign of `f` on `(0, x_hi]` from enclosures of `u - g1/g2`.
    Endpoint,
}

/// One accepted piece of the subdivision.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Leaf {
    pub lo: f64,
    pub hi: f64,
    pub depth: u32,
    /// Distance of the enclosure from zero on the claimed side.
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub kind: CertificateKind,
    pub u: f64,
    pub p: f64,
    pub x_lo: f64,
    pub x_hi: f64,
    pub sign: Sign,
    pub subintervals: usize,
    pub max_depth: u32,
    /// Smallest leaf bound.
    pub min_bound: f64,
    /// Leaves in left-to-right order; they tile `[x_lo, x_hi]`.
    pub leaves: Vec<Leaf>,
}

impl Certificate {
    /// Check that the leaves tile the region and redo every enclosure.
    pub fn replay(&self) -> bool {
        let tiled = self.leaves.first().map(|l| l.lo) == Some(self.x_lo)
            && self.leaves.last().map(|l| l.hi) == Some(self.x_hi)
            && self
                .leaves
                .windows(2)
                .all(|w| w[0].hi == w[1].lo && w[0].lo < w[0].hi);
        tiled
            && self.leaves.iter().all(|l| {
                let slack = match self.kind {
                    CertificateKind::Compact => {
                        compact_slack(l.lo, l.hi, self.u, self.p, self.sign)
                    }
                    CertificateKind::Endpoint => {
                        endpoint_slack(l.lo, l.hi, self.u, self.p, self.sign)
                    }
                };
                slack > 0.0
            })
    }
}

/// Why a certificate could not be produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Undecided {
    pub kind: CertificateKind,
    pub u: f64,
    pub p: f64,
    pub x_lo: f64,
    pub x_hi: f64,
    pub sign: Sign,
    pub reason: String,
    /// The first piece that could not be decided, if any.
    pub failing: Option<Leaf>,
    pub certified_before_failure: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum CertifyOutcome {
    Certified(Certificate),
    Unknown(Undecided),
}

impl CertifyOutcome {
    pub fn certificate(&self) -> Option<&Certificate> {
        match self {
            CertifyOutcome::Certified(c) => Some(c),
            CertifyOutcome::Unknown(_) => None,
        }
    }

    pub fn is_certified(&self) -> bool {
        self.certificate().is_some()
    }
}

/// Exact small integers as point intervals, and their quotient.
fn ratio_of(num: f64, den: f64) -> Interval {
    Interval::point(num)
        .div(Interval::point(den))
        .expect("positive denominator")
}

/// `(2k-1)!!/(2k)!!` for `k = 0..n`, as (numerator, denominator).
fn half_binomials(n: usize) -> Vec<(f64, f64)> {
    let mut out = vec![(1.0, 1.0)];
    for k in 1..n {
        let (a, b) = out[k - 1];
        out.push((a * (2 * k - 1) as f64, b * (2 * k) as f64));
    }
    out
}

/// Enclosure of `sum_k coef_k * s^k * y^k` (`s = -1`) plus the alternating
/// remainder, for `y` in `[0, y.hi] ` with `y.hi < 1` and coefficients
/// decreasing in magnitude. `coefs` has one more entry than is summed; the
/// last bounds the remainder.
fn alternating(coefs: &[Interval], y: Interval) -> Interval {
    let n = coefs.len() - 1;
    let signed = |k: usize| {
        if k.is_multiple_of(2) {
            coefs[k]
        } else {
            coefs[k].neg()
        }
    };
    let mut acc = signed(n - 1);
    for k in (0..n - 1).rev() {
        acc = acc.mul(y).add(signed(k));
    }
    // first omitted term: sign (-1)^n, size at most coefs[n] * y.hi^n
    let mut size = coefs[n].hi();
    for _ in 0..n {
        size = Interval::point(size).mul(Interval::point(y.hi())).hi();
    }
    let rem = if n.is_multiple_of(2) {
        Interval::new(0.0, size)
    } else {
        Interval::new(-size, 0.0)
    }
    .expect("ordered");
    acc.add(rem)
}

/// `arcsinh(x)/x - 1` on `x^2 in y`: `sum_{k>=1} (-1)^k (2k-1)!!/((2k)!!(2k+1)) y^k`.
fn asinh_ratio_minus_one_series(y: Interval) -> Interval {
    let hb = half_binomials(SERIES_TERMS + 2);
    let coefs: Vec<Interval> = (1..=SERIES_TERMS + 1)
        .map(|k| ratio_of(hb[k].0, hb[k].1 * (2 * k + 1) as f64))
        .collect();
    // alternating() starts at y^0 with a + sign; shift by one power
    alternating(&coefs, y).mul(y).neg()
}

/// `g1(x)/x^3 = sum_{k>=1} (-1)^{k+1} (2k-1)!!/(2k)!! * 2k/(2k+1) y^{k-1}`.
fn g1_scaled(y: Interval) -> Interval {
    let hb = half_binomials(SERIES_TERMS + 2);
    let coefs: Vec<Interval> = (1..=SERIES_TERMS + 1)
        .map(|k| ratio_of(hb[k].0 * (2 * k) as f64, hb[k].1 * (2 * k + 1) as f64))
        .collect();
    alternating(&coefs, y)
}

/// `g2(x)/x^3 = (2p-1) arcsinh(x)/x + 1/sqrt(1+x^2)`.
fn g2_scaled(y: Interval, p: f64) -> Interval {
    let hb = half_binomials(SERIES_TERMS + 1);
    let coefs: Vec<Interval> = hb.iter().map(|&(a, b)| ratio_of(a, b)).collect();
    let inv_root = alternating(&coefs, y);
    let q = Interval::point(2.0 * p - 1.0);
    let one = Interval::point(1.0);
    q.mul(one.add(asinh_ratio_minus_one_series(y)))
        .add(inv_root)
}

/// Enclosure of `g1/g2` for `x` in `[lo, hi] ⊂ [0, 2^-4]`.
pub fn ratio_enclosure(lo: f64, hi: f64, p: f64) -> Result<Interval> {
    check(
        0.0 <= lo && lo <= hi && hi <= SERIES_LIMIT,
        "x",
        hi,
        "[0, 2^-4]",
    )?;
    check_power(p)?;
    let y = Interval::new(lo, hi)?.square();
    g1_scaled(y).div(g2_scaled(y, p))
}

/// `arcsinh(x)/x - 1` at a point, decreasing in `x`.
fn asinh_ratio_minus_one(x: f64) -> Interval {
    let xi = Interval::point(x);
    if x < SERIES_LIMIT {
        asinh_ratio_minus_one_series(xi.square())
    } else {
        xi.asinh().div(xi).expect("x > 0").sub(Interval::point(1.0))
    }
}

/// `p ln1p(u x^2)` at a point, increasing in `x`.
fn lift(x: f64, u: f64, p: f64) -> Interval {
    let xi = Interval::point(x);
    xi.square().scale(u).ln1p().expect("u x^2 >= 0").scale(p)
}

fn check_region(lo: f64, hi: f64, u: f64, p: f64) -> Result<()> {
    check(lo > 0.0 && lo <= hi && hi <= 1.0, "x", lo, "(0, 1]")?;
    check((0.0..=1.0).contains(&u), "u", u, "[0, 1]")?;
    check_power(p)
}

/// Enclosure of `f_{u,p}` over `x`, in the form
/// `p ln1p(u x^2) + ln1p(arcsinh(x)/x - 1)`: the first term increases and the
/// second decreases, so each is bounded by its values at the endpoints.
pub fn f_enclosure(x: Interval, u: f64, p: f64) -> Result<Interval> {
    check_region(x.lo(), x.hi(), u, p)?;
    Ok(f_enclosure_unchecked(x.lo(), x.hi(), u, p))
}

fn f_enclosure_unchecked(lo: f64, hi: f64, u: f64, p: f64) -> Interval {
    let log_term = |x: f64| asinh_ratio_minus_one(x).ln1p().expect("arcsinh(x)/x > 0");
    let low = lift(lo, u, p).lo();
    let high = lift(hi, u, p).hi();
    let a = Interval::new(low, high).expect("lift is increasing");
    let b = Interval::new(log_term(hi).lo(), log_term(lo).hi()).expect("log term is decreasing");
    a.add(b)
}

fn compact_slack(lo: f64, hi: f64, u: f64, p: f64, sign: Sign) -> f64 {
    sign.slack(f_enclosure_unchecked(lo, hi, u, p))
}

fn endpoint_slack(lo: f64, hi: f64, u: f64, p: f64, sign: Sign) -> f64 {
    match ratio_enclosure(lo, hi, p) {
        Ok(r) => sign.slack(Interval::point(u).sub(r)),
        Err(_) => f64::NEG_INFINITY,
    }
}

enum Bisection {
    Done(Vec<Leaf>),
    Stuck {
        failing: Leaf,
        certified: usize,
        reason: String,
    },
}

/// Depth-first midpoint bisection; leaves come out left to right.
fn bisect(lo: f64, hi: f64, max_depth: u32, slack: impl Fn(f64, f64) -> f64) -> Bisection {
    let mut leaves = Vec::new();
    let mut stack = vec![(lo, hi, 0u32)];
    while let Some((a, b, depth)) = stack.pop() {
        let s = slack(a, b);
        let leaf = Leaf {
            lo: a,
            hi: b,
            depth,
            bound: s,
        };
        if s > 0.0 {
            leaves.push(leaf);
            if leaves.len() >= MAX_LEAVES && !stack.is_empty() {
                return Bisection::Stuck {
                    failing: leaf,
                    certified: leaves.len(),
                    reason: "leaf budget exhausted".into(),
                };
            }
            continue;
        }
        let mid = 0.5 * (a + b);
        if depth >= max_depth || !(a < mid && mid < b) {
            return Bisection::Stuck {
                failing: leaf,
                certified: leaves.len(),
                reason: "maximum depth reached with the sign undecided".into(),
            };
        }
        stack.push((mid, b, depth + 1));
        stack.push((a, mid, depth + 1));
    }
    Bisection::Done(leaves)
}

#[allow(clippy::too_many_arguments)]
fn finish(
    kind: CertificateKind,
    u: f64,
    p: f64,
    x_lo: f64,
    x_hi: f64,
    sign: Sign,
    result: Bisection,
) -> CertifyOutcome {
    match result {
        Bisection::Done(leaves) => CertifyOutcome::Certified(Certificate {
            kind,
            u,
            p,
            x_lo,
            x_hi,
            sign,
            subintervals: leaves.len(),
            max_depth: leaves.iter().map(|l| l.depth).max().unwrap_or(0),
            min_bound: leaves.iter().map(|l| l.bound).fold(f64::INFINITY, f64::min),
            leaves,
        }),
        Bisection::Stuck {
            failing,
            certified,
            reason,
        } => CertifyOutcome::Unknown(Undecided {
            kind,
            u,
            p,
            x_lo,
            x_hi,
            sign,
            reason,
            failing: Some(failing),
            certified_before_failure: certified,
        }),
    }
}

/// Prove that `f_{u,p}` has the claimed strict sign on `[x_lo, x_hi]`.
/// `Unknown` means the bisection ran out of depth; it is never a claim
/// that the sign fails.
pub fn certify_sign(
    u: f64,
    p: f64,
    x_lo: f64,
    x_hi: f64,
    sign: Sign,
    max_depth: u32,
) -> Result<CertifyOutcome> {
    check(
        x_lo > 0.0 && x_lo < x_hi && x_hi < 1.0,
        "x_lo",
        x_lo,
        "0 < x_lo < x_hi < 1",
    )?;
    check_region(x_lo, x_hi, u, p)?;
    let run = bisect(x_lo, x_hi, max_depth, |a, b| {
        compact_slack(a, b, u, p, sign)
    });
    Ok(finish(
        CertificateKind::Compact,
        u,
        p,
        x_lo,
        x_hi,
        sign,
        run,
    ))
}

/// Prove that `f_{u,p}` has the claimed strict sign on `(0, eps]` through
/// the sign of `u - g1/g2`.
pub fn certify_endpoint_zero(
    u: f64,
    p: f64,
    sign: Sign,
    eps: f64,
    max_depth: u32,
) -> Result<CertifyOutcome> {
    check((0.0..=1.0).contains(&u), "u", u, "[0, 1]")?;
    let limit = u_high(p)?;
    if (u - limit).abs() < DEGENERACY_TOLERANCE {
        return Err(Error::Degenerate {
            u,
            limit,
            tolerance: DEGENERACY_TOLERANCE,
        });
    }
    check(eps > 0.0 && eps <= SERIES_LIMIT, "eps", eps, "(0, 2^-4]")?;
    let run = bisect(0.0, eps, max_depth, |a, b| endpoint_slack(a, b, u, p, sign));
    Ok(finish(CertificateKind::Endpoint, u, p, 0.0, eps, sign, run))
}

/// Both sides of the theorem at one `p`, certified at distance `delta`
/// inside the sharp constants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoremCertificate {
    pub p: f64,
    pub delta: f64,
    pub eps: f64,
    pub x_max: f64,
    /// `u_zero(p) - delta`, where `f < 0` is claimed.
    pub u_negative: f64,
    /// `u_high(p) + delta`, where `f > 0` is claimed.
    pub u_positive: f64,
    pub parts: Vec<TheoremPart>,
    /// Enclosures of `h_p(u) = lim_{x -> 1} f` at the two values of `u`.
    pub h_p_negative: Interval,
    pub h_p_positive: Interval,
    /// How `(x_max, 1)` is covered.
    pub tail_argument: String,
    pub complete: bool,
    /// Labels of parts that were not certified.
    pub flagged: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoremPart {
    pub label: String,
    pub outcome: CertifyOutcome,
}

fn h_p_enclosure(u: f64, p: f64) -> Result<Interval> {
    let t_star = Interval::point(1.0).asinh();
    Ok(Interval::point(u).ln1p()?.scale(p).add(t_star.ln()?))
}

pub fn certify_theorem(p: f64, delta: f64) -> Result<TheoremCertificate> {
    certify_theorem_with_depth(p, delta, DEFAULT_MAX_DEPTH)
}

/// Four certificates (endpoint and compact, for each side) plus interval
/// signs of the limits at `x = 1`.
///
/// On `(x_max, 1)`: at `u_positive >= 1/(6p)` the function is increasing,
/// so it stays above its certified value at `x_max`; at `u_negative` it
/// decreases and then increases, so it stays below the larger of its values
/// at `x_max` and at `1`, both certified negative.
pub fn certify_theorem_with_depth(
    p: f64,
    delta: f64,
    max_depth: u32,
) -> Result<TheoremCertificate> {
    check_power(p)?;
    check(delta > 0.0 && delta.is_finite(), "delta", delta, "(0, inf)")?;
    let u_negative = u_zero(p)? - delta;
    let u_positive = u_high(p)? + delta;
    check(u_negative >= 0.0, "delta", delta, "(0, u_zero(p)]")?;
    check(u_positive <= 1.0, "delta", delta, "(0, 1 - 1/(6p)]")?;
    let eps = THEOREM_EPSILON;
    let x_max = THEOREM_X_MAX;

    let mut parts = Vec::new();
    for (label, u, sign) in [
        ("negative", u_negative, Sign::Negative),
        ("positive", u_positive, Sign::Positive),
    ] {
        let endpoint = match certify_endpoint_zero(u, p, sign, eps, max_depth) {
            Ok(o) => o,
            Err(e) => CertifyOutcome::Unknown(Undecided {
                kind: CertificateKind::Endpoint,
                u,
                p,
                x_lo: 0.0,
                x_hi: eps,
                sign,
                reason: e.to_string(),
                failing: None,
                certified_before_failure: 0,
            }),
        };
        parts.push(TheoremPart {
            label: format!("{label}_endpoint"),
            outcome: endpoint,
        });
        parts.push(TheoremPart {
            label: format!("{label}_compact"),
            outcome: certify_sign(u, p, eps, x_max, sign, max_depth)?,
        });
    }
    let h_p_negative = h_p_enclosure(u_negative, p)?;
    let h_p_positive = h_p_enclosure(u_positive, p)?;

    let mut flagged: Vec<String> = parts
        .iter()
        .filter(|part| !part.outcome.is_certified())
        .map(|part| part.label.clone())
        .collect();
    if Sign::Negative.slack(h_p_negative) <= 0.0 {
        flagged.push("h_p_negative".into());
    }
    if Sign::Positive.slack(h_p_positive) <= 0.0 {
        flagged.push("h_p_positive".into());
    }
    Ok(TheoremCertificate {
        p,
        delta,
        eps,
        x_max,
        u_negative,
        u_positive,
        parts,
        h_p_negative,
        h_p_positive,
        tail_argument: "f' > 0 on (0,1) at u_positive; at u_negative f decreases then \
                        increases, so on (x_max, 1) it lies below max(f(x_max), h_p)"
            .into(),
        complete: flagged.is_empty(),
        flagged,
    })
}
