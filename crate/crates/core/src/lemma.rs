//! The one-variable functions behind the sharp bounds.
//!
//! With `x = |a-b|/(a+b)` and `u = (2t-1)^2`,
//! `ln(Q_{t,p}/M) = f(x,u,p) = p ln(1+u x^2) + ln(arcsinh(x)/x)`.
//! `f` vanishes at `x = 0`, tends to `h_p(u)` at `x = 1`, and its derivative
//! factors as a positive prefactor times `u - g1(x)/g2(x)`, where the ratio
//! `g1/g2` decreases from `1/(6p)` to `u_low(p)`. Everything in the sign
//! analysis follows from those facts, so this module evaluates each piece
//! without cancellation near `x = 0`.

use serde::{Deserialize, Serialize};

use crate::dd::{self, Dd};
use crate::error::{check, Result};
use crate::means::{check_power, neuman_sandor_profile, PROFILE_SERIES_SWITCH};
use crate::thresholds::{u_high, u_low};

/// Below this, `arcsinh(x)/x - 1` and `arctan(x)/x - 1` come from their series.
pub const RATIO_SERIES_SWITCH: f64 = 0.0625; // 2^-4

/// Below this, `f(x)/x^2` comes from its own series.
pub const SCALED_SERIES_SWITCH: f64 = 1.0 / 1024.0; // 2^-10

/// Bisection stops once the bracket is this narrow.
pub const CRITICAL_X_TOLERANCE: f64 = 1e-14;

/// The mean compared against `Q_{t,p}`. The theorem is about the
/// Neuman-Sándor mean; the second Seiffert mean gives the older weighted
/// root-mean-square / contra-harmonic bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundedMean {
    NeumanSandor,
    SecondSeiffert,
}

impl BoundedMean {
    /// Coefficients of `x^2, x^4, x^6, x^8` in `ln(g(x)/x)`, `g` = arcsinh resp. arctan.
    fn log_coefficients(self) -> [f64; 4] {
        match self {
            BoundedMean::NeumanSandor => [
                -1.0 / 6.0,
                11.0 / 180.0,
                -191.0 / 5670.0,
                2497.0 / 113_400.0,
            ],
            BoundedMean::SecondSeiffert => {
                [-1.0 / 3.0, 13.0 / 90.0, -251.0 / 2835.0, 3551.0 / 56_700.0]
            }
        }
    }

    /// `g(x)/x - 1`, `g` = arcsinh resp. arctan, accurate relative to its size.
    fn inverse_profile_minus_one(self, x: f64) -> f64 {
        let x2 = x * x;
        match self {
            BoundedMean::NeumanSandor if x < RATIO_SERIES_SWITCH => {
                // sum_{k>=1} (-1)^k (2k-1)!!/((2k)!! (2k+1)) x^{2k}; nine terms
                // put the truncation below 2^-60 relative for x <= 2^-4.
                let mut c = [0.0f64; 9];
                let mut double_fact = 1.0;
                for (i, ck) in c.iter_mut().enumerate() {
                    let k = (i + 1) as f64;
                    double_fact *= (2.0 * k - 1.0) / (2.0 * k);
                    let sign = if i % 2 == 0 { -1.0 } else { 1.0 };
                    *ck = sign * double_fact / (2.0 * k + 1.0);
                }
                x2 * horner(&c, x2)
            }
            BoundedMean::NeumanSandor => dd::asinh(x).div_f64(x).add_f64(-1.0).to_f64(),
            BoundedMean::SecondSeiffert if x < RATIO_SERIES_SWITCH => {
                let mut c = [0.0f64; 9];
                for (i, ck) in c.iter_mut().enumerate() {
                    let k = (i + 1) as f64;
                    let sign = if i % 2 == 0 { -1.0 } else { 1.0 };
                    *ck = sign / (2.0 * k + 1.0);
                }
                x2 * horner(&c, x2)
            }
            BoundedMean::SecondSeiffert => x.atan() / x - 1.0,
        }
    }
}

fn horner(c: &[f64], y: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &ck| acc.mul_add(y, ck))
}

fn check_lemma_args(x: f64, u: f64, p: f64) -> Result<()> {
    check(x > 0.0 && x < 1.0, "x", x, "(0, 1)")?;
    check((0.0..=1.0).contains(&u), "u", u, "[0, 1]")?;
    check_power(p)
}

/// `ln(Q/mean)` on the centred pair, i.e. `p ln1p(u x^2) + ln(g(x)/x)`.
pub fn log_ratio(target: BoundedMean, x: f64, u: f64, p: f64) -> Result<f64> {
    check_lemma_args(x, u, p)?;
    Ok(log_ratio_unchecked(target, x, u, p))
}

pub(crate) fn log_ratio_unchecked(target: BoundedMean, x: f64, u: f64, p: f64) -> f64 {
    if x < SCALED_SERIES_SWITCH {
        x * x * scaled_series(target, x, u, p)
    } else {
        p * (u * x * x).ln_1p() + target.inverse_profile_minus_one(x).ln_1p()
    }
}

fn series_coefficients(target: BoundedMean, u: f64, p: f64) -> [f64; 4] {
    // p ln1p(u y)/y = p (u - u^2 y/2 + u^3 y^2/3 - u^4 y^3/4 + ...)
    let l = target.log_coefficients();
    [
        p * u + l[0],
        -p * u * u / 2.0 + l[1],
        p * u * u * u / 3.0 + l[2],
        -p * u * u * u * u / 4.0 + l[3],
    ]
}

fn scaled_series(target: BoundedMean, x: f64, u: f64, p: f64) -> f64 {
    horner(&series_coefficients(target, u, p), x * x)
}

/// A value with the sign of `log_ratio`. Equals `scaled_log_ratio` except
/// when the `x^2` coefficient is exactly zero (the sharp upper constants),
/// where the series is divided by one more `x^2` so the sign survives
/// underflow of `x^4`.
pub(crate) fn sign_carrier(target: BoundedMean, x: f64, u: f64, p: f64) -> f64 {
    if x < SCALED_SERIES_SWITCH {
        let c = series_coefficients(target, u, p);
        if c[0] == 0.0 {
            return horner(&c[1..], x * x);
        }
    }
    scaled_log_ratio_unchecked(target, x, u, p)
}

/// `log_ratio / x^2`. Carries the sign of `log_ratio` where the latter
/// underflows, and keeps the `O(x^2)` margin resolvable near 0.
pub fn scaled_log_ratio(target: BoundedMean, x: f64, u: f64, p: f64) -> Result<f64> {
    check_lemma_args(x, u, p)?;
    Ok(scaled_log_ratio_unchecked(target, x, u, p))
}

pub(crate) fn scaled_log_ratio_unchecked(target: BoundedMean, x: f64, u: f64, p: f64) -> f64 {
    if x < SCALED_SERIES_SWITCH {
        scaled_series(target, x, u, p)
    } else {
        log_ratio_unchecked(target, x, u, p) / (x * x)
    }
}

/// `f_{u,p}(x) = p ln(1+u x^2) - ln x + ln arcsinh x`.
pub fn f(x: f64, u: f64, p: f64) -> Result<f64> {
    log_ratio(BoundedMean::NeumanSandor, x, u, p)
}

/// `f_{u,p}(x) / x^2`.
pub fn f_scaled(x: f64, u: f64, p: f64) -> Result<f64> {
    scaled_log_ratio(BoundedMean::NeumanSandor, x, u, p)
}

/// `arcsinh(x)/x` as a double-double, for `x >= 2^-20`.
fn asinh_over_x(x: f64) -> Dd {
    dd::asinh(x).div_f64(x)
}

fn g1_dd(x: f64) -> Dd {
    let root = dd::one_plus_square(x).sqrt();
    dd::asinh(x).sub(Dd::new(x).div(root))
}

fn g2_dd(x: f64, p: f64) -> Dd {
    let x2 = Dd::new(x).mul(Dd::new(x));
    let root = dd::one_plus_square(x).sqrt();
    let first = x2.mul(dd::asinh(x)).mul_f64(2.0 * p - 1.0);
    first.add(x2.mul_f64(x).div(root))
}

/// `g1(x)/x^3` by its series: 1/3 - 3x^2/10 + 15x^4/56.
fn g1_scaled_series(x: f64) -> f64 {
    let x2 = x * x;
    1.0 / 3.0 - x2 * (3.0 / 10.0 - x2 * (15.0 / 56.0))
}

/// `g2(x)/x^3` by its series.
fn g2_scaled_series(x: f64, p: f64) -> f64 {
    let x2 = x * x;
    let q = 2.0 * p - 1.0;
    // (2p-1)(1 - x^2/6 + 3x^4/40) + (1 - x^2/2 + 3x^4/8)
    2.0 * p - x2 * (q / 6.0 + 0.5) + x2 * x2 * (3.0 * q / 40.0 + 3.0 / 8.0)
}

fn check_unit(x: f64) -> Result<()> {
    check(x > 0.0 && x <= 1.0, "x", x, "(0, 1]")
}

/// `g1(x) = arcsinh x - x/sqrt(1+x^2)`.
pub fn g1(x: f64) -> Result<f64> {
    check_unit(x)?;
    if x < PROFILE_SERIES_SWITCH {
        Ok(x * x * x * g1_scaled_series(x))
    } else {
        Ok(g1_dd(x).to_f64())
    }
}

/// `g2(x) = (2p-1) x^2 arcsinh x + x^3/sqrt(1+x^2)`.
pub fn g2(x: f64, p: f64) -> Result<f64> {
    check_unit(x)?;
    check_power(p)?;
    if x < PROFILE_SERIES_SWITCH {
        Ok(x * x * x * g2_scaled_series(x, p))
    } else {
        Ok(g2_dd(x, p).to_f64())
    }
}

/// `g1(x)/g2(x)`, with the removable `0/0` at the origin divided out.
pub fn ratio(x: f64, p: f64) -> Result<f64> {
    check_unit(x)?;
    check_power(p)?;
    Ok(ratio_unchecked(x, p))
}

pub(crate) fn ratio_unchecked(x: f64, p: f64) -> f64 {
    if x < PROFILE_SERIES_SWITCH {
        g1_scaled_series(x) / g2_scaled_series(x, p)
    } else {
        g1_dd(x).div(g2_dd(x, p)).to_f64()
    }
}

/// `f'(x)` in the factored form `prefactor(x) * (u - g1(x)/g2(x))`.
pub fn f_prime(x: f64, u: f64, p: f64) -> Result<f64> {
    check_lemma_args(x, u, p)?;
    Ok(prefactor(x, u, p) * (u - ratio_unchecked(x, p)))
}

/// `g2(x) / (x (1 + u x^2) arcsinh x)`, positive on (0, 1).
pub(crate) fn prefactor(x: f64, u: f64, p: f64) -> f64 {
    let damp = u.mul_add(x * x, 1.0);
    if x < PROFILE_SERIES_SWITCH {
        x * g2_scaled_series(x, p) * neuman_sandor_profile(x) / damp
    } else {
        let asinh = dd::asinh(x).to_f64();
        g2_dd(x, p).to_f64() / (x * damp * asinh)
    }
}

/// `h(x) = (1+x^2) arcsinh(x) / x`, with `h(0) = 1`.
pub fn h(x: f64) -> Result<f64> {
    check(x >= 0.0 && x.is_finite(), "x", x, "[0, inf)")?;
    Ok(h_unchecked(x))
}

fn h_unchecked(x: f64) -> f64 {
    if x < PROFILE_SERIES_SWITCH {
        let x2 = x * x;
        // (1 + x^2)(1 - x^2/6 + 3x^4/40)
        1.0 + x2 * (5.0 / 6.0 - x2 * (1.0 / 6.0 - 3.0 / 40.0))
    } else {
        asinh_over_x(x).mul(dd::one_plus_square(x)).to_f64()
    }
}

/// `h1(x) = x sqrt(1+x^2) - arcsinh x + x^2 arcsinh x`; `h'(x) = h1(x)/x^2`.
pub fn h1(x: f64) -> Result<f64> {
    check(x > 0.0 && x.is_finite(), "x", x, "(0, inf)")?;
    if x < 1.0 / 256.0 {
        // 5x^3/3 - 11x^5/30 + 51x^7/280 - 115x^9/1008
        let x2 = x * x;
        let c = [5.0 / 3.0, -11.0 / 30.0, 51.0 / 280.0, -115.0 / 1008.0];
        Ok(x * x2 * horner(&c, x2))
    } else {
        let sq = dd::one_plus_square(x);
        let a = dd::asinh(x);
        let x2 = Dd::new(x).mul(Dd::new(x));
        let v = Dd::new(x).mul(sq.sqrt()).add(x2.add_f64(-1.0).mul(a));
        Ok(v.to_f64())
    }
}

/// `h2(x) = 3x/sqrt(1+x^2) + 2 arcsinh x`; `h1'(x) = x h2(x)`.
pub fn h2(x: f64) -> Result<f64> {
    check(x > 0.0 && x.is_finite(), "x", x, "(0, inf)")?;
    Ok(3.0 * x / x.mul_add(x, 1.0).sqrt() + 2.0 * dd::asinh(x).to_f64())
}

/// `D(x) = 2(2p-1) sqrt(1+x^2) h(x) + (2p+1) x^2 + 2p + 2`, so that
/// `g1'(x)/g2'(x) = 1/D(x)`. `D(0) = 6p`.
pub fn denom_d(x: f64, p: f64) -> Result<f64> {
    check((0.0..=1.0).contains(&x), "x", x, "[0, 1]")?;
    check_power(p)?;
    let root = x.mul_add(x, 1.0).sqrt();
    Ok(2.0 * (2.0 * p - 1.0) * root * h_unchecked(x) + (2.0 * p + 1.0) * x * x + 2.0 * p + 2.0)
}

/// Shape of `f_{u,p}` on (0, 1), read off the sign of `f'`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "regime", rename_all = "snake_case")]
pub enum SignRegime {
    /// `f' > 0` throughout; `u >= 1/(6p)`.
    AlwaysPositive,
    /// `f' < 0` throughout; `u <= u_low(p)`.
    AlwaysNegative,
    /// `f' < 0` on `(0, x0)` and `f' > 0` on `(x0, 1)`.
    DipThenRise { x0: f64 },
}

/// Locate the unique critical point of `f_{u,p}` by bisection on the
/// decreasing ratio `g1/g2`.
pub fn find_critical_x(u: f64, p: f64) -> Result<SignRegime> {
    check((0.0..=1.0).contains(&u), "u", u, "[0, 1]")?;
    check_power(p)?;
    if u >= u_high(p)? {
        return Ok(SignRegime::AlwaysPositive);
    }
    if u <= u_low(p)? {
        return Ok(SignRegime::AlwaysNegative);
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while hi - lo > CRITICAL_X_TOLERANCE {
        let mid = 0.5 * (lo + hi);
        if ratio_unchecked(mid, p) > u {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(SignRegime::DipThenRise {
        x0: 0.5 * (lo + hi),
    })
}

#[cfg(test)]
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;
    use crate::thresholds::{u_zero, weight_to_u};

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn f_vanishes_at_origin() {
        for u in [0.0, 1.0 / 3.0, 1.0] {
            for p in [0.5, 1.0] {
                assert!(f(1e-8, u, p).unwrap().abs() < 1e-15);
            }
        }
    }

    #[test]
    fn f_examples() {
        // ln(1.05) - ln(0.5) + ln(arcsinh 0.5) = 0.01048962365140226079864271502989144713707
        assert!(close(
            f(0.5, 0.2, 1.0).unwrap(),
            0.010_489_623_651_402_261,
            1e-17
        ));
        for p in [0.5, 1.0, 2.0] {
            let v = f(1.0 - 1e-12, u_zero(p).unwrap(), p).unwrap();
            assert!(v.abs() < 1e-9, "p={p}: {v}");
        }
        assert!(f(0.0, 0.2, 1.0).is_err());
        assert!(f(0.5, 1.5, 1.0).is_err());
    }

    #[test]
    fn f_scaled_matches_across_switch() {
        let (u, p) = (0.2, 1.0);
        let below = f_scaled(SCALED_SERIES_SWITCH * (1.0 - 1e-12), u, p).unwrap();
        let above = f_scaled(SCALED_SERIES_SWITCH, u, p).unwrap();
        assert!(close(below, above, 1e-12));
        // leading coefficient p u - 1/6
        assert!(close(
            f_scaled(1e-200, u, p).unwrap(),
            0.2 - 1.0 / 6.0,
            1e-16
        ));
    }

    #[test]
    fn derivative_sign_regimes() {
        let p = 1.0;
        let up = u_high(p).unwrap() + 0.01;
        let pu = 0.5;
        let down = u_low(pu).unwrap() - 0.01;
        for i in 1..100 {
            let x = i as f64 / 100.0;
            assert!(f_prime(x, up, p).unwrap() > 0.0);
            assert!(f_prime(x, down, pu).unwrap() < 0.0);
        }
    }

    #[test]
    fn g_functions() {
        assert!(g1(1e-300).unwrap() >= 0.0 && g1(1e-300).unwrap() < 1e-300);
        assert!(g2(1e-300, 1.0).unwrap() < 1e-300);
        // ln(1+sqrt2) - 1/sqrt2 = 0.1742668058329955008317649628749432697433
        assert!(close(g1(1.0).unwrap(), 0.174_266_805_832_995_5, 3e-17));
        assert!(close(
            g2(1.0, 0.5).unwrap(),
            std::f64::consts::FRAC_1_SQRT_2,
            1.2e-16
        ));
        assert!(g1(1.5).is_err());
    }

    #[test]
    fn ratio_endpoints() {
        for p in [0.5, 1.0, 3.0] {
            assert!(close(ratio(1e-9, p).unwrap(), 1.0 / (6.0 * p), 1e-12));
        }
        // (sqrt2 t* - 1)/(sqrt2 t* + 1) = 0.1097066160344173696673635086691103879267
        assert!(close(
            ratio(1.0, 1.0).unwrap(),
            0.109_706_616_034_417_37,
            6e-17
        ));
        let (a, b, c) = (
            ratio(0.2, 1.0).unwrap(),
            ratio(0.5, 1.0).unwrap(),
            ratio(0.9, 1.0).unwrap(),
        );
        assert!(a > b && b > c);
    }

    #[test]
    fn denom_d_values() {
        for p in [0.5, 1.0, 2.0] {
            assert!(close(denom_d(0.0, p).unwrap(), 6.0 * p, 1e-15));
        }
        assert_eq!(denom_d(0.5, 0.5).unwrap(), 3.5);
    }

    #[test]
    fn h_values() {
        assert_eq!(h(0.0).unwrap(), 1.0);
        // 1.203029562649008618744397283560921057838
        assert!(close(h(0.5).unwrap(), 1.203_029_562_649_008_6, 3e-16));
        // 1.762747174039086050465218649959584618056
        assert!(close(h(1.0).unwrap(), 1.762_747_174_039_086, 3e-16));
        assert!(h(-1.0).is_err());
    }

    #[test]
    fn h1_series_meets_direct_form() {
        let x = 1.0 / 256.0;
        let below = h1(x * (1.0 - 1e-15)).unwrap();
        let above = h1(x).unwrap();
        assert!(close(below / above, 1.0, 1e-13));
        assert!(h2(0.3).unwrap() > 0.0);
    }

    #[test]
    fn critical_point_regimes() {
        let p = 1.0;
        assert_eq!(
            find_critical_x(u_high(p).unwrap(), p).unwrap(),
            SignRegime::AlwaysPositive
        );
        assert_eq!(
            find_critical_x(u_low(p).unwrap(), p).unwrap(),
            SignRegime::AlwaysNegative
        );
        match find_critical_x(0.12, 1.0).unwrap() {
            SignRegime::DipThenRise { x0 } => {
                assert!(close(ratio(x0, 1.0).unwrap(), 0.12, 1e-13));
                assert!(f_prime(x0, 0.12, 1.0).unwrap().abs() < 1e-12);
            }
            other => panic!("unexpected {other:?}"),
        }
        let p = 0.5;
        let u = 0.5 * (u_low(p).unwrap() + u_high(p).unwrap());
        let SignRegime::DipThenRise { x0 } = find_critical_x(u, p).unwrap() else {
            panic!("expected an interior critical point");
        };
        let step = 1e-6;
        let slope = |x: f64| f(x + step, u, p).unwrap() - f(x - step, u, p).unwrap();
        assert!(slope(x0 / 2.0) < 0.0);
        assert!(slope((1.0 + x0) / 2.0) > 0.0);
    }

    #[test]
    fn seiffert_log_ratio_uses_arctan() {
        let x: f64 = 0.5;
        let u = weight_to_u(0.9).unwrap();
        let direct = 0.5 * (u * x * x).ln_1p() + (x.atan() / x).ln();
        let v = log_ratio(BoundedMean::SecondSeiffert, x, u, 0.5).unwrap();
        assert!(close(v, direct, 1e-15));
    }
}
