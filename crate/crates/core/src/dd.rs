//! Double-double helpers for the few places where the working-precision
//! path cannot reach its accuracy contract with plain `f64` arithmetic.
//!
//! A value is the unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`.

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
pub(crate) fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
pub(crate) fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    pub const fn new(hi: f64) -> Self {
        Dd { hi, lo: 0.0 }
    }

    #[inline]
    fn renorm(hi: f64, lo: f64) -> Self {
        let (hi, lo) = quick_two_sum(hi, lo);
        Dd { hi, lo }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let (s, e) = quick_two_sum(s, e + t);
        Dd::renorm(s, e + f)
    }

    pub fn add_f64(self, b: f64) -> Dd {
        let (s, e) = two_sum(self.hi, b);
        Dd::renorm(s, e + self.lo)
    }

    pub fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    pub fn sub(self, o: Dd) -> Dd {
        self.add(o.neg())
    }

    pub fn mul(self, o: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, o.hi);
        let e = self.hi.mul_add(o.lo, e);
        let e = self.lo.mul_add(o.hi, e);
        Dd::renorm(p, e)
    }

    pub fn mul_f64(self, b: f64) -> Dd {
        let (p, e) = two_prod(self.hi, b);
        Dd::renorm(p, self.lo.mul_add(b, e))
    }

    pub fn div(self, o: Dd) -> Dd {
        let q1 = self.hi / o.hi;
        let r = self.sub(o.mul_f64(q1));
        let q2 = r.hi / o.hi;
        let r = r.sub(o.mul_f64(q2));
        let q3 = r.hi / o.hi;
        let (q1, q2) = quick_two_sum(q1, q2);
        Dd { hi: q1, lo: q2 }.add_f64(q3)
    }

    pub fn div_f64(self, b: f64) -> Dd {
        self.div(Dd::new(b))
    }

    pub fn sqrt(self) -> Dd {
        if self.hi <= 0.0 {
            return Dd::new(0.0);
        }
        let s = self.hi.sqrt();
        let (p, e) = two_prod(s, s);
        let r = (self.hi - p - e + self.lo) / (2.0 * s);
        Dd::renorm(s, r)
    }
}

/// `1 + x^2`, exact up to the double-double representation.
pub(crate) fn one_plus_square(x: f64) -> Dd {
    let (p, e) = two_prod(x, x);
    Dd { hi: p, lo: e }.add_f64(1.0)
}

/// sinh by its Maclaurin series in double-double; intended for |s| <= 4.
fn sinh_series(s: f64) -> Dd {
    let s2 = Dd::new(s).mul(Dd::new(s));
    let mut term = Dd::new(s);
    let mut sum = term;
    let mut k = 1.0_f64;
    loop {
        term = term.mul(s2).div_f64((2.0 * k) * (2.0 * k + 1.0));
        sum = sum.add(term);
        if term.hi.abs() <= 1e-34 * sum.hi.abs() {
            break;
        }
        k += 1.0;
    }
    sum
}

/// Working-precision arcsinh for `x >= 0` in the cancellation-free log1p form.
pub(crate) fn asinh_log1p(x: f64) -> f64 {
    let x2 = x * x;
    (x + x2 / (1.0 + (1.0 + x2).sqrt())).ln_1p()
}

/// arcsinh(x) for `x >= 0` as a double-double: the log1p form refined by one
/// Newton step on sinh(s) = x.
pub(crate) fn asinh(x: f64) -> Dd {
    debug_assert!(x >= 0.0);
    let s0 = asinh_log1p(x);
    if x == 0.0 || s0 > 4.0 {
        return Dd::new(s0);
    }
    let residual = Dd::new(x).sub(sinh_series(s0));
    let correction = residual.to_f64() / s0.cosh();
    Dd::new(s0).add_f64(correction)
}

#[cfg(test)]
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;

    #[test]
    fn sqrt_two_squares_back() {
        let r = Dd::new(2.0).sqrt();
        let back = r.mul(r).sub(Dd::new(2.0));
        assert!(back.to_f64().abs() < 1e-31);
    }

    #[test]
    fn asinh_one_is_ln_one_plus_sqrt_two() {
        // 0.8813735870195430252326093249797923...
        let t = asinh(1.0);
        assert_eq!(t.hi, 0.881_373_587_019_543_025_232_609_3);
        assert!(t.lo.abs() <= 0.5 * f64::EPSILON * 0.5);
    }

    #[test]
    fn division_recovers_operand() {
        let a = Dd::new(1.0).div_f64(3.0);
        let back = a.mul_f64(3.0).sub(Dd::new(1.0));
        assert!(back.to_f64().abs() < 1e-32);
    }
}
