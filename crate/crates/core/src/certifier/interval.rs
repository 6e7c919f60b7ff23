//! Closed intervals of doubles with outward rounding.
//!
//! The basic operations are correctly rounded in IEEE arithmetic, so the
//! exact error of each (from `two_sum` or an `fma` residual) tells which way
//! the rounding went; an endpoint moves one ulp outward only when the
//! rounding went inward. `ln` and `ln1p` come from the platform libm, which
//! is faithful but not correctly rounded, and get two ulps outward. The
//! inverse hyperbolic sine uses the double-double kernel (log1p form plus a
//! Newton step) with one ulp each way, and falls back to composing the
//! pieces above for large arguments.

use serde::{Deserialize, Serialize};

use crate::dd;
use crate::error::{Error, Result};

/// Below this magnitude an `fma` residual may itself be inexact.
const RESIDUAL_FLOOR: f64 = 1e-290;

const LIBM_SLACK: u32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

fn two_sum_err(a: f64, b: f64, s: f64) -> f64 {
    let bb = s - a;
    (a - (s - bb)) + (b - bb)
}

fn add_down(a: f64, b: f64) -> f64 {
    let s = a + b;
    if s.is_infinite() {
        return if s > 0.0 { f64::MAX } else { s };
    }
    if two_sum_err(a, b, s) < 0.0 {
        s.next_down()
    } else {
        s
    }
}

fn add_up(a: f64, b: f64) -> f64 {
    -add_down(-a, -b)
}

fn mul_down(a: f64, b: f64) -> f64 {
    let p = a * b;
    if a == 0.0 || b == 0.0 {
        return 0.0;
    }
    if p.is_infinite() {
        return if p > 0.0 { f64::MAX } else { p };
    }
    if p.abs() < RESIDUAL_FLOOR {
        return p.next_down();
    }
    if a.mul_add(b, -p) < 0.0 {
        p.next_down()
    } else {
        p
    }
}

fn mul_up(a: f64, b: f64) -> f64 {
    -mul_down(-a, b)
}

fn div_down(a: f64, b: f64) -> f64 {
    let q = a / b;
    if a == 0.0 {
        return 0.0;
    }
    if q.is_infinite() {
        return if q > 0.0 { f64::MAX } else { q };
    }
    if q.abs() < RESIDUAL_FLOOR {
        return q.next_down();
    }
    // a/b - q = r/b with r exact
    let r = (-q).mul_add(b, a);
    if r != 0.0 && (r < 0.0) != (b < 0.0) {
        q.next_down()
    } else {
        q
    }
}

fn div_up(a: f64, b: f64) -> f64 {
    -div_down(-a, b)
}

fn sqrt_down(a: f64) -> f64 {
    let s = a.sqrt();
    if a == 0.0 {
        return 0.0;
    }
    if (-s).mul_add(s, a) < 0.0 {
        s.next_down().max(0.0)
    } else {
        s
    }
}

fn sqrt_up(a: f64) -> f64 {
    let s = a.sqrt();
    if a == 0.0 {
        return 0.0;
    }
    if (-s).mul_add(s, a) > 0.0 {
        s.next_up()
    } else {
        s
    }
}

fn nudge_down(mut v: f64, n: u32) -> f64 {
    for _ in 0..n {
        v = v.next_down();
    }
    v
}

fn nudge_up(mut v: f64, n: u32) -> f64 {
    for _ in 0..n {
        v = v.next_up();
    }
    v
}

// `div`, `sqrt` and `ln` can fail, so the operator traits would not fit all
// of them; the arithmetic is kept as plain methods throughout.
#[allow(clippy::should_implement_trait)]
impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo <= hi && !lo.is_nan() && !hi.is_nan() {
            Ok(Interval { lo, hi })
        } else {
            Err(Error::IntervalDomain { op: "new", lo, hi })
        }
    }

    pub fn point(x: f64) -> Self {
        assert!(!x.is_nan(), "NaN interval endpoint");
        Interval { lo: x, hi: x }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }

    pub fn contains_interval(&self, o: &Interval) -> bool {
        self.lo <= o.lo && o.hi <= self.hi
    }

    pub fn neg(self) -> Self {
        Interval {
            lo: -self.hi,
            hi: -self.lo,
        }
    }

    pub fn add(self, o: Self) -> Self {
        Interval {
            lo: add_down(self.lo, o.lo),
            hi: add_up(self.hi, o.hi),
        }
    }

    pub fn sub(self, o: Self) -> Self {
        self.add(o.neg())
    }

    pub fn mul(self, o: Self) -> Self {
        let pairs = [
            (self.lo, o.lo),
            (self.lo, o.hi),
            (self.hi, o.lo),
            (self.hi, o.hi),
        ];
        let lo = pairs
            .iter()
            .map(|&(a, b)| mul_down(a, b))
            .fold(f64::INFINITY, f64::min);
        let hi = pairs
            .iter()
            .map(|&(a, b)| mul_up(a, b))
            .fold(f64::NEG_INFINITY, f64::max);
        Interval { lo, hi }
    }

    /// Square, tighter than `self.mul(self)` when the interval straddles 0.
    pub fn square(self) -> Self {
        if self.lo >= 0.0 {
            Interval {
                lo: mul_down(self.lo, self.lo),
                hi: mul_up(self.hi, self.hi),
            }
        } else if self.hi <= 0.0 {
            self.neg().square()
        } else {
            let m = self.lo.abs().max(self.hi);
            Interval {
                lo: 0.0,
                hi: mul_up(m, m),
            }
        }
    }

    pub fn scale(self, k: f64) -> Self {
        self.mul(Interval::point(k))
    }

    pub fn div(self, o: Self) -> Result<Self> {
        if o.lo <= 0.0 && o.hi >= 0.0 {
            return Err(Error::IntervalDomain {
                op: "div",
                lo: o.lo,
                hi: o.hi,
            });
        }
        let pairs = [
            (self.lo, o.lo),
            (self.lo, o.hi),
            (self.hi, o.lo),
            (self.hi, o.hi),
        ];
        let lo = pairs
            .iter()
            .map(|&(a, b)| div_down(a, b))
            .fold(f64::INFINITY, f64::min);
        let hi = pairs
            .iter()
            .map(|&(a, b)| div_up(a, b))
            .fold(f64::NEG_INFINITY, f64::max);
        Ok(Interval { lo, hi })
    }

    pub fn sqrt(self) -> Result<Self> {
        if self.lo < 0.0 {
            return Err(Error::IntervalDomain {
                op: "sqrt",
                lo: self.lo,
                hi: self.hi,
            });
        }
        Ok(Interval {
            lo: sqrt_down(self.lo),
            hi: sqrt_up(self.hi),
        })
    }

    pub fn ln(self) -> Result<Self> {
        if self.lo <= 0.0 {
            return Err(Error::IntervalDomain {
                op: "ln",
                lo: self.lo,
                hi: self.hi,
            });
        }
        let at = |v: f64, down: bool| {
            if v == 1.0 {
                0.0
            } else if down {
                nudge_down(v.ln(), LIBM_SLACK)
            } else {
                nudge_up(v.ln(), LIBM_SLACK)
            }
        };
        Ok(Interval {
            lo: at(self.lo, true),
            hi: at(self.hi, false),
        })
    }

    /// `ln(1 + self)`.
    pub fn ln1p(self) -> Result<Self> {
        if self.lo <= -1.0 {
            return Err(Error::IntervalDomain {
                op: "ln1p",
                lo: self.lo,
                hi: self.hi,
            });
        }
        let at = |v: f64, down: bool| {
            if v == 0.0 {
                0.0
            } else if down {
                nudge_down(v.ln_1p(), LIBM_SLACK)
            } else {
                nudge_up(v.ln_1p(), LIBM_SLACK)
            }
        };
        Ok(Interval {
            lo: at(self.lo, true),
            hi: at(self.hi, false),
        })
    }

    /// `arcsinh`, increasing, so only the endpoints are evaluated.
    pub fn asinh(self) -> Self {
        Interval {
            lo: asinh_point(self.lo).lo,
            hi: asinh_point(self.hi).hi,
        }
    }
}

/// Up to here the double-double kernel carries a Newton correction and is
/// good to about 1e-30 relative, so its rounding is within half an ulp.
const NEWTON_ASINH_MAX: f64 = 16.0;

fn asinh_point(x: f64) -> Interval {
    if x < 0.0 {
        return asinh_point(-x).neg();
    }
    if x == 0.0 {
        return Interval::point(0.0);
    }
    if x <= NEWTON_ASINH_MAX {
        let v = dd::asinh(x).to_f64();
        return Interval {
            lo: v.next_down(),
            hi: v.next_up(),
        };
    }
    let one = Interval::point(1.0);
    let xi = Interval::point(x);
    let x2 = xi.square();
    let root = one.add(x2).sqrt().expect("1 + x^2 > 0");
    let t = xi.add(x2.div(one.add(root)).expect("1 + sqrt > 0"));
    t.ln1p().expect("t >= 0")
}
