//! High-precision reference values for every quantity the crate computes.
//!
//! Expressions are evaluated from their textbook definitions on
//! [`BigFloat`]s with series for ln, exp, arcsinh and arctan written here.
//! Each evaluation runs at two precisions 64 bits apart and the precision is
//! doubled until they agree to the requested number of digits; the observed
//! disagreement is reported as the error bound.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::bigfloat::BigFloat;
use crate::error::{Error, Result};

/// Largest digit count accepted by [`oracle_eval`].
pub const MAX_DIGITS: u32 = 40;

const MAX_PREC: u64 = 1 << 14;

/// A reference value. `hi + lo` is the value rounded to about 106 bits,
/// `decimal` carries the requested number of significant digits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleValue {
    pub expr: String,
    pub inputs: Vec<f64>,
    pub digits: u32,
    pub decimal: String,
    pub hi: f64,
    pub lo: f64,
    pub relative_error_bound: f64,
}

impl OracleValue {
    /// `computed - value`, accurate to far better than one ulp of `computed`.
    pub fn signed_error(&self, computed: f64) -> f64 {
        let (s, e) = two_sum(computed, -self.hi);
        s + (e - self.lo)
    }

    pub fn abs_error(&self, computed: f64) -> f64 {
        self.signed_error(computed).abs()
    }

    /// Error of `computed` in units of the last place of the reference value.
    pub fn ulp_error(&self, computed: f64) -> f64 {
        self.abs_error(computed) / ulp(self.hi)
    }

    /// Whether `[lo, hi]` contains the reference value.
    pub fn within(&self, lo: f64, hi: f64) -> bool {
        self.signed_error(lo) <= 0.0 && self.signed_error(hi) >= 0.0
    }
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

/// Unit in the last place of `v` in binary64.
pub fn ulp(v: f64) -> f64 {
    let biased = ((v.abs().to_bits() >> 52) & 0x7ff) as i64;
    if biased <= 52 {
        // below 2^-1022 + 52 bits the spacing bottoms out at the subnormal step
        f64::from_bits(1u64 << (biased.max(1) - 1))
    } else {
        f64::from_bits(((biased - 52) as u64) << 52)
    }
}

struct Ctx {
    prec: u64,
}

fn big(v: f64) -> BigFloat {
    BigFloat::from_f64(v)
}

fn one() -> BigFloat {
    BigFloat::from_i64(1)
}

impl Ctx {
    fn add(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.add(b, self.prec)
    }
    fn sub(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.sub(b, self.prec)
    }
    fn mul(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.mul(b, self.prec)
    }
    fn div(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.div(b, self.prec)
    }
    fn sqrt(&self, a: &BigFloat) -> BigFloat {
        a.sqrt(self.prec)
    }

    /// Series sum is done once a term drops this far below the running sum.
    fn negligible(&self, term: &BigFloat, sum: &BigFloat) -> bool {
        term.is_zero() || (!sum.is_zero() && term.top() < sum.top() - self.prec as i64 - 8)
    }

    /// atanh(z) = z + z^3/3 + z^5/5 + ...
    fn atanh_series(&self, z: &BigFloat) -> BigFloat {
        let z2 = self.mul(z, z);
        let mut power = z.clone();
        let mut sum = z.clone();
        let mut k = 1;
        loop {
            power = self.mul(&power, &z2);
            let term = power.div_i64(2 * k + 1, self.prec);
            sum = self.add(&sum, &term);
            if self.negligible(&term, &sum) {
                return sum;
            }
            k += 1;
        }
    }

    fn ln2(&self) -> BigFloat {
        self.atanh_series(&one().div_i64(3, self.prec)).mul_pow2(1)
    }

    fn ln(&self, x: &BigFloat) -> BigFloat {
        assert!(
            !x.is_negative() && !x.is_zero(),
            "oracle ln of a nonpositive value"
        );
        let mut k = x.top();
        let mut m = x.mul_pow2(-k);
        if m.lt_f64(std::f64::consts::FRAC_1_SQRT_2) {
            m = m.mul_pow2(1);
            k -= 1;
        }
        let z = self.div(&self.sub(&m, &one()), &self.add(&m, &one()));
        let ln_m = self.atanh_series(&z).mul_pow2(1);
        if k == 0 {
            ln_m
        } else {
            self.add(&self.ln2().mul_i64(k, self.prec), &ln_m)
        }
    }

    fn ln1p(&self, y: &BigFloat) -> BigFloat {
        if y.abs().lt_f64(0.5) {
            let two = BigFloat::from_i64(2);
            let z = self.div(y, &self.add(&two, y));
            self.atanh_series(&z).mul_pow2(1)
        } else {
            self.ln(&self.add(&one(), y))
        }
    }

    fn exp(&self, y: &BigFloat) -> BigFloat {
        const HALVINGS: i64 = 24;
        let inner = Ctx {
            prec: self.prec + HALVINGS as u64 + 16,
        };
        let ln2 = inner.ln2();
        let k = (y.to_f64() / std::f64::consts::LN_2).round() as i64;
        let r = inner
            .sub(y, &ln2.mul_i64(k, inner.prec))
            .mul_pow2(-HALVINGS);
        let mut term = one();
        let mut sum = one();
        let mut n = 1;
        loop {
            term = inner.mul(&term, &r).div_i64(n, inner.prec);
            sum = inner.add(&sum, &term);
            if inner.negligible(&term, &sum) {
                break;
            }
            n += 1;
        }
        for _ in 0..HALVINGS {
            sum = inner.mul(&sum, &sum);
        }
        sum.mul_pow2(k)
    }

    /// `x^y` for `x > 0`.
    fn pow(&self, x: &BigFloat, y: &BigFloat) -> BigFloat {
        self.exp(&self.mul(y, &self.ln(x)))
    }

    /// arcsinh(x)/x - 1 for `x >= 0`.
    fn asinh_over_x_minus_one(&self, x: &BigFloat) -> BigFloat {
        if x.is_zero() {
            return BigFloat::zero();
        }
        if x.lt_f64(0.5) {
            // sum_{k>=1} (-1)^k (2k-1)!!/(2k)!! x^{2k}/(2k+1)
            let x2 = self.mul(x, x);
            let mut power = one();
            let mut sum = BigFloat::zero();
            let mut k = 1;
            loop {
                power = self
                    .mul(&power, &x2)
                    .mul_i64(-(2 * k - 1), self.prec)
                    .div_i64(2 * k, self.prec);
                let term = power.div_i64(2 * k + 1, self.prec);
                sum = self.add(&sum, &term);
                if self.negligible(&term, &sum) {
                    return sum;
                }
                k += 1;
            }
        }
        let a = self.asinh(x);
        self.sub(&self.div(&a, x), &one())
    }

    fn asinh(&self, x: &BigFloat) -> BigFloat {
        if x.is_negative() {
            return self.asinh(&x.neg()).neg();
        }
        if x.lt_f64(0.5) {
            let r = self.asinh_over_x_minus_one(x);
            return self.mul(x, &self.add(&one(), &r));
        }
        let root = self.sqrt(&self.add(&one(), &self.mul(x, x)));
        self.ln(&self.add(x, &root))
    }

    /// arctan by its alternating series, for |z| well below 1.
    fn atan_series(&self, z: &BigFloat) -> BigFloat {
        let z2 = self.mul(z, z).neg();
        let mut power = z.clone();
        let mut sum = z.clone();
        let mut k = 1;
        loop {
            power = self.mul(&power, &z2);
            let term = power.div_i64(2 * k + 1, self.prec);
            sum = self.add(&sum, &term);
            if self.negligible(&term, &sum) {
                return sum;
            }
            k += 1;
        }
    }

    fn pi(&self) -> BigFloat {
        let a = self
            .atan_series(&one().div_i64(5, self.prec))
            .mul_i64(16, self.prec);
        let b = self
            .atan_series(&one().div_i64(239, self.prec))
            .mul_i64(4, self.prec);
        self.sub(&a, &b)
    }

    fn atan(&self, x: &BigFloat) -> BigFloat {
        if x.is_negative() {
            return self.atan(&x.neg()).neg();
        }
        if !x.lt_f64(1.0) && x.cmp(&one()) == Ordering::Greater {
            let inv = self.div(&one(), x);
            return self.sub(&self.pi().mul_pow2(-1), &self.atan(&inv));
        }
        // atan(x) = 2 atan(x / (1 + sqrt(1 + x^2))), three times
        let mut z = x.clone();
        for _ in 0..3 {
            let root = self.sqrt(&self.add(&one(), &self.mul(&z, &z)));
            z = self.div(&z, &self.add(&one(), &root));
        }
        self.atan_series(&z).mul_pow2(3)
    }

    /// arctan(x)/x - 1 for `x >= 0`.
    fn atan_over_x_minus_one(&self, x: &BigFloat) -> BigFloat {
        if x.is_zero() {
            return BigFloat::zero();
        }
        if x.lt_f64(0.5) {
            let x2 = self.mul(x, x).neg();
            let mut power = one();
            let mut sum = BigFloat::zero();
            let mut k = 1;
            loop {
                power = self.mul(&power, &x2);
                let term = power.div_i64(2 * k + 1, self.prec);
                sum = self.add(&sum, &term);
                if self.negligible(&term, &sum) {
                    return sum;
                }
                k += 1;
            }
        }
        self.sub(&self.div(&self.atan(x), x), &one())
    }

    /// g1(x) = arcsinh x - x/sqrt(1+x^2), by series below 1/2.
    fn g1(&self, x: &BigFloat) -> BigFloat {
        if x.lt_f64(0.5) {
            // sum_{k>=1} (-1)^{k+1} (2k-1)!!/(2k)!! * 2k/(2k+1) * x^{2k+1}
            let x2 = self.mul(x, x);
            let mut power = x.clone();
            let mut sum = BigFloat::zero();
            let mut k = 1;
            loop {
                power = self
                    .mul(&power, &x2)
                    .mul_i64(-(2 * k - 1), self.prec)
                    .div_i64(2 * k, self.prec);
                let term = power
                    .mul_i64(-2 * k, self.prec)
                    .div_i64(2 * k + 1, self.prec);
                sum = self.add(&sum, &term);
                if self.negligible(&term, &sum) {
                    return sum;
                }
                k += 1;
            }
        }
        let root = self.sqrt(&self.add(&one(), &self.mul(x, x)));
        self.sub(&self.asinh(x), &self.div(x, &root))
    }

    fn g2(&self, x: &BigFloat, p: &BigFloat) -> BigFloat {
        let x2 = self.mul(x, x);
        let q = self.sub(&p.mul_pow2(1), &one());
        let root = self.sqrt(&self.add(&one(), &x2));
        let first = self.mul(&self.mul(&q, &x2), &self.asinh(x));
        self.add(&first, &self.div(&self.mul(&x2, x), &root))
    }

    fn t_star(&self) -> BigFloat {
        let root2 = self.sqrt(&BigFloat::from_i64(2));
        self.ln(&self.add(&one(), &root2))
    }

    fn u_zero(&self, p: &BigFloat) -> BigFloat {
        // (1/t*)^(1/p) - 1
        let inv = self.div(&one(), &self.t_star());
        let power = self.pow(&inv, &self.div(&one(), p));
        self.sub(&power, &one())
    }

    fn f_like(&self, x: &BigFloat, u: &BigFloat, p: &BigFloat, arctan: bool) -> BigFloat {
        let lift = self.mul(p, &self.ln1p(&self.mul(u, &self.mul(x, x))));
        let r = if arctan {
            self.atan_over_x_minus_one(x)
        } else {
            self.asinh_over_x_minus_one(x)
        };
        self.add(&lift, &self.ln1p(&r))
    }

    fn profile(&self, kind: &str, x: &BigFloat) -> BigFloat {
        let x2 = self.mul(x, x);
        match kind {
            "arithmetic" => one(),
            "contra_harmonic" => self.add(&one(), &x2),
            "root_mean_square" => self.sqrt(&self.add(&one(), &x2)),
            "second_seiffert" => {
                self.div(&one(), &self.add(&one(), &self.atan_over_x_minus_one(x)))
            }
            "neuman_sandor" => self.div(&one(), &self.add(&one(), &self.asinh_over_x_minus_one(x))),
            _ => unreachable!("kind validated by the registry"),
        }
    }

    /// The mean of `(a, b)` from its two-argument definition.
    fn pair_mean(&self, kind: &str, a: &BigFloat, b: &BigFloat) -> BigFloat {
        let sum = self.add(a, b);
        let diff = self.sub(a, b);
        let sq = self.add(&self.mul(a, a), &self.mul(b, b));
        match kind {
            "arithmetic" => sum.mul_pow2(-1),
            "contra_harmonic" => self.div(&sq, &sum),
            "root_mean_square" => self.sqrt(&sq.mul_pow2(-1)),
            "second_seiffert" | "neuman_sandor" if diff.is_zero() => a.clone(),
            "second_seiffert" => {
                let z = self.div(&diff, &sum);
                self.div(&diff, &self.atan(&z).mul_pow2(1))
            }
            "neuman_sandor" => {
                let z = self.div(&diff, &sum);
                self.div(&diff, &self.asinh(&z).mul_pow2(1))
            }
            _ => unreachable!("kind validated by the registry"),
        }
    }

    fn seiffert(&self, which: &str) -> BigFloat {
        let half = one().mul_pow2(-1);
        let four_over_pi = self.div(&BigFloat::from_i64(4), &self.pi());
        let radicand = match which {
            "alpha_max" => self.sub(&self.mul(&four_over_pi, &four_over_pi), &one()),
            "beta_min" => BigFloat::from_i64(2).div_i64(3, self.prec),
            "lambda_max" => self.sub(&four_over_pi, &one()),
            "mu_min" => one().div_i64(3, self.prec),
            _ => unreachable!(),
        };
        self.add(&half, &self.sqrt(&radicand).mul_pow2(-1))
    }
}

const MEAN_KINDS: [&str; 5] = [
    "arithmetic",
    "contra_harmonic",
    "root_mean_square",
    "second_seiffert",
    "neuman_sandor",
];

/// Registered expression ids with their arity.
pub fn registered_expressions() -> Vec<(String, usize)> {
    let mut out: Vec<(String, usize)> = [
        ("t_star", 0),
        ("pi", 0),
        ("alpha_max", 0),
        ("beta_min", 0),
        ("lambda_max", 0),
        ("mu_min", 0),
        ("closed_lower_p_half", 0),
        ("closed_lower_p_one", 0),
        ("closed_upper_p_half", 0),
        ("closed_upper_p_one", 0),
        ("ln", 1),
        ("asinh", 1),
        ("arctan", 1),
        ("deviation", 2),
        ("weight_to_u", 1),
        ("q_mean", 4),
        ("f", 3),
        ("f_prime", 3),
        ("log_ratio_second_seiffert", 3),
        ("g1", 1),
        ("g2", 2),
        ("ratio", 2),
        ("h", 1),
        ("h1", 1),
        ("h2", 1),
        ("denom_d", 2),
        ("h_p", 2),
        ("u_zero", 1),
        ("u_low", 1),
        ("u_high", 1),
        ("lower_weight_threshold", 1),
        ("upper_weight_threshold", 1),
    ]
    .iter()
    .map(|(n, a)| (n.to_string(), *a))
    .collect();
    for kind in MEAN_KINDS {
        out.push((format!("{kind}_mean"), 2));
        out.push((format!("{kind}_profile"), 1));
    }
    out
}

fn arity(expr: &str) -> Option<usize> {
    registered_expressions()
        .into_iter()
        .find(|(n, _)| n == expr)
        .map(|(_, a)| a)
}

fn evaluate(expr: &str, args: &[BigFloat], c: &Ctx) -> BigFloat {
    let arg = |i: usize| &args[i];
    match expr {
        "t_star" => c.t_star(),
        "pi" => c.pi(),
        "alpha_max" | "beta_min" | "lambda_max" | "mu_min" => c.seiffert(expr),
        // the p = 1/2 and p = 1 thresholds written out directly
        "closed_lower_p_half" => {
            let t = c.t_star();
            let inv_sq = c.div(&one(), &c.mul(&t, &t));
            c.add(&one(), &c.sqrt(&c.sub(&inv_sq, &one()))).mul_pow2(-1)
        }
        "closed_lower_p_one" => {
            let inv = c.div(&one(), &c.t_star());
            c.add(&one(), &c.sqrt(&c.sub(&inv, &one()))).mul_pow2(-1)
        }
        "closed_upper_p_half" => {
            let root3 = c.sqrt(&BigFloat::from_i64(3));
            c.add(&BigFloat::from_i64(3), &root3).div_i64(6, c.prec)
        }
        "closed_upper_p_one" => {
            let root6 = c.sqrt(&BigFloat::from_i64(6)).div_i64(6, c.prec);
            c.add(&one(), &root6).mul_pow2(-1)
        }
        "ln" => c.ln(arg(0)),
        "asinh" => c.asinh(arg(0)),
        "arctan" => c.atan(arg(0)),
        "deviation" => {
            let d = c.sub(arg(0), arg(1)).abs();
            c.div(&d, &c.add(arg(0), arg(1)))
        }
        "weight_to_u" => {
            let s = c.sub(&arg(0).mul_pow2(1), &one());
            c.mul(&s, &s)
        }
        "q_mean" => {
            // C^p(ta + (1-t)b, tb + (1-t)a) A^(1-p), literally
            let (a, b, t, p) = (arg(0), arg(1), arg(2), arg(3));
            let s = c.sub(&one(), t);
            let wa = c.add(&c.mul(t, a), &c.mul(&s, b));
            let wb = c.add(&c.mul(t, b), &c.mul(&s, a));
            let cw = c.pair_mean("contra_harmonic", &wa, &wb);
            let am = c.pair_mean("arithmetic", a, b);
            let one_minus_p = c.sub(&one(), p);
            c.mul(&c.pow(&cw, p), &c.pow(&am, &one_minus_p))
        }
        "f" => c.f_like(arg(0), arg(1), arg(2), false),
        "log_ratio_second_seiffert" => c.f_like(arg(0), arg(1), arg(2), true),
        "f_prime" => {
            // 2pux/(1+ux^2) + 1/(sqrt(1+x^2) arcsinh x) - 1/x
            let (x, u, p) = (arg(0), arg(1), arg(2));
            let x2 = c.mul(x, x);
            let a = c.div(
                &c.mul(&c.mul(p, u), x).mul_pow2(1),
                &c.add(&one(), &c.mul(u, &x2)),
            );
            let root = c.sqrt(&c.add(&one(), &x2));
            let b = c.div(&one(), &c.mul(&root, &c.asinh(x)));
            c.sub(&c.add(&a, &b), &c.div(&one(), x))
        }
        "g1" => c.g1(arg(0)),
        "g2" => c.g2(arg(0), arg(1)),
        "ratio" => c.div(&c.g1(arg(0)), &c.g2(arg(0), arg(1))),
        "h" => {
            let x = arg(0);
            let lift = c.add(&one(), &c.mul(x, x));
            c.mul(&lift, &c.add(&one(), &c.asinh_over_x_minus_one(x)))
        }
        "h1" => {
            let x = arg(0);
            let x2 = c.mul(x, x);
            let root = c.sqrt(&c.add(&one(), &x2));
            let a = c.asinh(x);
            c.add(&c.mul(x, &root), &c.mul(&c.sub(&x2, &one()), &a))
        }
        "h2" => {
            let x = arg(0);
            let root = c.sqrt(&c.add(&one(), &c.mul(x, x)));
            c.add(
                &c.div(&x.mul_i64(3, c.prec), &root),
                &c.asinh(x).mul_pow2(1),
            )
        }
        "denom_d" => {
            let (x, p) = (arg(0), arg(1));
            let x2 = c.mul(x, x);
            let root = c.sqrt(&c.add(&one(), &x2));
            let hx = c.mul(
                &c.add(&one(), &x2),
                &c.add(&one(), &c.asinh_over_x_minus_one(x)),
            );
            let q = c.sub(&p.mul_pow2(1), &one());
            let first = c.mul(&c.mul(&q, &root), &hx).mul_pow2(1);
            let second = c.mul(&c.add(&p.mul_pow2(1), &one()), &x2);
            c.add(
                &c.add(&first, &second),
                &c.add(&p.mul_pow2(1), &BigFloat::from_i64(2)),
            )
        }
        "h_p" => {
            let (u, p) = (arg(0), arg(1));
            c.add(&c.mul(p, &c.ln1p(u)), &c.ln(&c.t_star()))
        }
        "u_zero" => c.u_zero(arg(0)),
        "u_high" => c.div(&one(), &arg(0).mul_i64(6, c.prec)),
        "u_low" => {
            let p = arg(0);
            let r = c.mul(&c.sqrt(&BigFloat::from_i64(2)), &c.t_star());
            let q = c.sub(&p.mul_pow2(1), &one());
            c.div(&c.sub(&r, &one()), &c.add(&c.mul(&q, &r), &one()))
        }
        "lower_weight_threshold" => {
            let root = c.sqrt(&c.u_zero(arg(0)));
            c.add(&one(), &root).mul_pow2(-1)
        }
        "upper_weight_threshold" => {
            let root = c.sqrt(&arg(0).mul_i64(6, c.prec));
            c.add(&one(), &c.div(&one(), &root)).mul_pow2(-1)
        }
        other => {
            if let Some(kind) = other.strip_suffix("_mean") {
                c.pair_mean(kind, arg(0), arg(1))
            } else if let Some(kind) = other.strip_suffix("_profile") {
                c.profile(kind, arg(0))
            } else {
                unreachable!("expression validated by the registry")
            }
        }
    }
}

fn to_decimal(v: &BigFloat, digits: u32) -> String {
    if v.is_zero() {
        return "0".to_string();
    }
    let digits = digits as i64;
    // floor(log10 |v|), possibly off by one; corrected below
    let mut e10 = ((v.top() - 1) as f64 * std::f64::consts::LOG10_2).floor() as i64;
    let lower = num_traits::pow(num_bigint::BigInt::from(10), (digits - 1) as usize);
    let upper = &lower * 10;
    let n = loop {
        let n = v.scaled_round(digits - 1 - e10);
        if n >= upper {
            e10 += 1;
        } else if n < lower {
            e10 -= 1;
        } else {
            break n;
        }
    };
    let s = n.to_string();
    let sign = if v.is_negative() { "-" } else { "" };
    if (-5..=20).contains(&e10) {
        if e10 >= 0 {
            let int_len = (e10 + 1) as usize;
            if int_len >= s.len() {
                format!("{sign}{}{}", s, "0".repeat(int_len - s.len()))
            } else {
                format!("{sign}{}.{}", &s[..int_len], &s[int_len..])
            }
        } else {
            format!("{sign}0.{}{}", "0".repeat((-e10 - 1) as usize), s)
        }
    } else {
        format!("{sign}{}.{}e{}", &s[..1], &s[1..], e10)
    }
}

/// Evaluate a registered expression to `digits` significant decimal digits.
pub fn oracle_eval(expr: &str, inputs: &[f64], digits: u32) -> Result<OracleValue> {
    let expected = arity(expr).ok_or_else(|| Error::UnknownExpression(expr.to_string()))?;
    if expected != inputs.len() {
        return Err(Error::OracleArity {
            expr: expr.to_string(),
            expected,
            got: inputs.len(),
        });
    }
    if digits == 0 || digits > MAX_DIGITS {
        return Err(Error::Domain {
            name: "digits",
            value: digits as f64,
            domain: "[1, 40]",
        });
    }
    if let Some(bad) = inputs.iter().find(|v| !v.is_finite()) {
        return Err(Error::Domain {
            name: "input",
            value: *bad,
            domain: "finite reals",
        });
    }
    let args: Vec<BigFloat> = inputs.iter().map(|&v| big(v)).collect();
    let target_bits = (digits as f64 * std::f64::consts::LOG2_10).ceil() as u64 + 4;
    let mut prec = (target_bits + 64).max(160);
    while prec <= MAX_PREC {
        let coarse = evaluate(expr, &args, &Ctx { prec });
        let fine = evaluate(expr, &args, &Ctx { prec: prec + 64 });
        let diff = fine.sub(&coarse, prec + 128).abs();
        let agreed = fine.is_zero() && coarse.is_zero()
            || !fine.is_zero() && (diff.is_zero() || diff.top() < fine.top() - target_bits as i64);
        if agreed {
            let hi = fine.to_f64();
            let lo = fine.sub(&big(hi), prec + 128).to_f64();
            let floor = 2f64.powi(-(prec as i32).min(1000));
            let rel = if fine.is_zero() {
                0.0
            } else if diff.is_zero() {
                floor
            } else {
                2f64.powi((diff.top() - fine.top()).max(-1000) as i32)
                    .max(floor)
            };
            return Ok(OracleValue {
                expr: expr.to_string(),
                inputs: inputs.to_vec(),
                digits,
                decimal: to_decimal(&fine, digits),
                hi,
                lo,
                relative_error_bound: rel,
            });
        }
        prec *= 2;
    }
    Err(Error::OracleNotConverged(expr.to_string()))
}
