//! Sharp weight thresholds for `Q_{t1,p} < M < Q_{t2,p}` and the auxiliary
//! constants in the squared-offset variable `u = (2t-1)^2`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::dd;
use crate::error::{check, Result};
use crate::means::check_power;

/// `ln(1 + sqrt 2) = arcsinh(1)`, the value of `ln(arcsinh(x)/x)` at `x = 1`
/// up to sign.
pub fn t_star() -> f64 {
    dd::asinh(1.0).to_f64()
}

/// A validated `(p, t)` with `p >= 1/2` and `1/2 < t < 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerWeight {
    p: f64,
    t: f64,
    u: f64,
}

impl PowerWeight {
    pub fn new(p: f64, t: f64) -> Result<Self> {
        check_power(p)?;
        check(t > 0.5 && t < 1.0, "t", t, "(1/2, 1)")?;
        Ok(PowerWeight {
            p,
            t,
            u: weight_to_u(t)?,
        })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn u(&self) -> f64 {
        self.u
    }
}

/// The largest admissible lower weight and the smallest admissible upper one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdPair {
    pub t1_max: f64,
    pub t2_min: f64,
}

pub fn weight_to_u(t: f64) -> Result<f64> {
    check((0.0..=1.0).contains(&t), "t", t, "[0, 1]")?;
    // 2t - 1 is exact for t in [1/4, 1]
    let s = 2.0 * t - 1.0;
    Ok(s * s)
}

/// Inverse of [`weight_to_u`] on `t >= 1/2`.
pub fn u_to_weight(u: f64) -> Result<f64> {
    check((0.0..=1.0).contains(&u), "u", u, "[0, 1]")?;
    Ok(0.5 + 0.5 * u.sqrt())
}

/// `(1/t*)^(1/p) - 1`, the zero of `h_p`.
pub fn u_zero(p: f64) -> Result<f64> {
    check_power(p)?;
    Ok((-t_star().ln() / p).exp_m1())
}

/// `1/(6p)`, the limit of g1/g2 at 0.
pub fn u_high(p: f64) -> Result<f64> {
    check_power(p)?;
    Ok(1.0 / (6.0 * p))
}

/// `(sqrt2 t* - 1) / (sqrt2 (2p-1) t* + 1)`, the limit of g1/g2 at 1.
pub fn u_low(p: f64) -> Result<f64> {
    check_power(p)?;
    let r = std::f64::consts::SQRT_2 * t_star();
    Ok((r - 1.0) / ((2.0 * p - 1.0) * r + 1.0))
}

/// `p ln(1+u) + ln t*`, the limit of `f_{u,p}` as `x -> 1`.
pub fn h_p(u: f64, p: f64) -> Result<f64> {
    check(u > -1.0, "u", u, "(-1, inf)")?;
    check_power(p)?;
    Ok(p * u.ln_1p() + t_star().ln())
}

pub fn lower_weight_threshold(p: f64) -> Result<f64> {
    let u = u_zero(p)?;
    Ok(0.5 + 0.5 * u.sqrt())
}

pub fn upper_weight_threshold(p: f64) -> Result<f64> {
    check_power(p)?;
    Ok(0.5 + 0.5 / (6.0 * p).sqrt())
}

pub fn theorem_thresholds(p: f64) -> Result<ThresholdPair> {
    Ok(ThresholdPair {
        t1_max: lower_weight_threshold(p)?,
        t2_min: upper_weight_threshold(p)?,
    })
}

/// Sharp weights for the second Seiffert mean between weighted root-mean-square
/// (`alpha`, `beta`) and weighted contra-harmonic (`lambda`, `mu`) means.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeiffertConstants {
    pub alpha_max: f64,
    pub beta_min: f64,
    pub lambda_max: f64,
    pub mu_min: f64,
}

pub fn seiffert_constants() -> SeiffertConstants {
    let four_over_pi = 4.0 / PI;
    SeiffertConstants {
        alpha_max: 0.5 + 0.5 * (four_over_pi * four_over_pi - 1.0).sqrt(),
        beta_min: 0.5 + 0.5 * (2.0f64 / 3.0).sqrt(),
        lambda_max: 0.5 + 0.5 * (four_over_pi - 1.0).sqrt(),
        mu_min: 0.5 + 0.5 * (1.0f64 / 3.0).sqrt(),
    }
}

#[cfg(test)]
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn t_star_value() {
        let t = t_star();
        assert!(t > 0.88 && t < 0.89);
        assert_eq!(t, 0.881_373_587_019_543_025_232_609_324_979_79);
        assert!(close(t.exp() - 2f64.sqrt(), 1.0, 2.0 * f64::EPSILON));
    }

    #[test]
    fn lower_threshold_examples() {
        // 0.768002097734333419999672479931658102903
        assert!(close(
            lower_weight_threshold(0.5).unwrap(),
            0.768_002_097_734_333_4,
            2e-16
        ));
        // 0.6834343595857323182055249602881192302438
        assert!(close(
            lower_weight_threshold(1.0).unwrap(),
            0.683_434_359_585_732_3,
            2e-16
        ));
        let far = lower_weight_threshold(1e6).unwrap();
        assert!(far > 0.5 && far - 0.5 < 1e-3);
    }

    #[test]
    fn upper_threshold_examples() {
        let third = (3.0 + 3f64.sqrt()) / 6.0;
        assert!(close(upper_weight_threshold(0.5).unwrap(), third, 1.2e-16));
        assert!(close(
            upper_weight_threshold(1.0).unwrap(),
            0.704_124_145_231_931_5,
            1.2e-16
        ));
        assert_eq!(upper_weight_threshold(1.5).unwrap(), 2.0 / 3.0);
    }

    #[test]
    fn u_scale_examples() {
        assert_eq!(u_high(0.5).unwrap(), 1.0 / 3.0);
        // 0.2464504802804610267880401605011360053014
        let v = u_low(0.5).unwrap();
        assert!(close(v, 0.246_450_480_280_461_03, 3e-16), "{v:e}");
        // 0.134592657106510984057245405153286237863
        assert!(close(u_zero(1.0).unwrap(), 0.134_592_657_106_510_98, 1e-16));
    }

    #[test]
    fn h_p_examples() {
        for p in [0.5, 1.0, 2.0, 5.0] {
            assert!(h_p(u_zero(p).unwrap(), p).unwrap().abs() <= 1e-15);
        }
        // 0.02787698572835984452157692953403119769039
        assert!(close(
            h_p(u_high(1.0).unwrap(), 1.0).unwrap(),
            0.027_876_985_728_359_845,
            1e-15
        ));
        // -0.02217802358957109657809010989664610669902
        assert!(close(
            h_p(u_low(1.0).unwrap(), 1.0).unwrap(),
            -0.022_178_023_589_571_1,
            1e-15
        ));
        assert!(h_p(-1.0, 1.0).is_err());
    }

    #[test]
    fn weight_conversion() {
        assert_eq!(weight_to_u(0.75).unwrap(), 0.25);
        assert_eq!(u_to_weight(0.25).unwrap(), 0.75);
        assert_eq!(weight_to_u(0.5).unwrap(), 0.0);
        assert!(weight_to_u(1.2).is_err());
        assert!(u_to_weight(-0.1).is_err());
    }

    #[test]
    fn thresholds_are_ordered() {
        let pair = theorem_thresholds(1.0).unwrap();
        assert!(0.5 < pair.t1_max && pair.t1_max < pair.t2_min && pair.t2_min < 1.0);
        assert!(theorem_thresholds(0.4).is_err());
    }

    #[test]
    fn seiffert_constants_values() {
        let c = seiffert_constants();
        // 0.894061841046999989493157818631002145514
        assert!(close(c.alpha_max, 0.894_061_841_047, 1e-12));
        assert!(close(c.beta_min, (3.0 + 6f64.sqrt()) / 6.0, 2e-16));
        // 0.7613616004385316575683985559763591008939
        assert!(close(c.lambda_max, 0.761_361_600_438_531_7, 2e-16));
        assert!(close(c.mu_min, (3.0 + 3f64.sqrt()) / 6.0, 2e-16));
    }

    #[test]
    fn power_weight_validates() {
        let w = PowerWeight::new(1.0, 0.75).unwrap();
        assert_eq!(w.u(), 0.25);
        assert!(PowerWeight::new(1.0, 0.5).is_err());
        assert!(PowerWeight::new(0.3, 0.7).is_err());
    }
}
