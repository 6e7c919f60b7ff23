//! Arbitrary-precision binary floating point for the reference oracle.
//!
//! A value is `mant * 2^exp` with a big-integer mantissa. Every operation
//! truncates the mantissa to the context precision, so results carry a
//! relative error of a few units in the last of `prec` bits. Nothing here
//! touches the working-precision code paths of the crate.

use std::cmp::Ordering;

use num_bigint::{BigInt, Sign};
use num_traits::{One, Signed, ToPrimitive, Zero};

#[derive(Clone, Debug)]
pub(crate) struct BigFloat {
    mant: BigInt,
    exp: i64,
}

impl BigFloat {
    pub fn zero() -> Self {
        BigFloat {
            mant: BigInt::zero(),
            exp: 0,
        }
    }

    pub fn from_i64(n: i64) -> Self {
        BigFloat {
            mant: BigInt::from(n),
            exp: 0,
        }
    }

    /// Exact conversion.
    pub fn from_f64(v: f64) -> Self {
        assert!(v.is_finite(), "oracle inputs must be finite");
        if v == 0.0 {
            return Self::zero();
        }
        let bits = v.to_bits();
        let biased = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (m, e) = if biased == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), biased - 1075)
        };
        let mut mant = BigInt::from(m);
        if v < 0.0 {
            mant = -mant;
        }
        BigFloat { mant, exp: e }
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mant.sign() == Sign::Minus
    }

    /// `floor(log2 |self|) + 1`; meaningless for zero.
    pub fn top(&self) -> i64 {
        self.exp + self.mant.bits() as i64
    }

    fn truncate(mut self, prec: u64) -> Self {
        let bits = self.mant.bits();
        if bits > prec {
            let sh = bits - prec;
            self.mant >>= sh;
            self.exp += sh as i64;
        }
        self
    }

    pub fn neg(&self) -> Self {
        BigFloat {
            mant: -&self.mant,
            exp: self.exp,
        }
    }

    pub fn abs(&self) -> Self {
        BigFloat {
            mant: self.mant.abs(),
            exp: self.exp,
        }
    }

    pub fn mul_pow2(&self, k: i64) -> Self {
        BigFloat {
            mant: self.mant.clone(),
            exp: self.exp + k,
        }
    }

    pub fn add(&self, o: &Self, prec: u64) -> Self {
        if o.is_zero() {
            return self.clone().truncate(prec);
        }
        if self.is_zero() {
            return o.clone().truncate(prec);
        }
        let (ta, tb) = (self.top(), o.top());
        let guard = prec as i64 + 4;
        if tb < ta - guard {
            return self.clone().truncate(prec);
        }
        if ta < tb - guard {
            return o.clone().truncate(prec);
        }
        let e = self.exp.min(o.exp);
        let a = &self.mant << (self.exp - e) as usize;
        let b = &o.mant << (o.exp - e) as usize;
        BigFloat {
            mant: a + b,
            exp: e,
        }
        .truncate(prec)
    }

    pub fn sub(&self, o: &Self, prec: u64) -> Self {
        self.add(&o.neg(), prec)
    }

    pub fn mul(&self, o: &Self, prec: u64) -> Self {
        BigFloat {
            mant: &self.mant * &o.mant,
            exp: self.exp + o.exp,
        }
        .truncate(prec)
    }

    pub fn div(&self, o: &Self, prec: u64) -> Self {
        assert!(!o.is_zero(), "oracle division by zero");
        let shift = (prec as i64 + 2 + o.mant.bits() as i64 - self.mant.bits() as i64).max(0);
        let num = &self.mant << shift as usize;
        BigFloat {
            mant: num / &o.mant,
            exp: self.exp - shift - o.exp,
        }
        .truncate(prec)
    }

    pub fn div_i64(&self, n: i64, prec: u64) -> Self {
        self.div(&BigFloat::from_i64(n), prec)
    }

    pub fn mul_i64(&self, n: i64, prec: u64) -> Self {
        BigFloat {
            mant: &self.mant * n,
            exp: self.exp,
        }
        .truncate(prec)
    }

    pub fn sqrt(&self, prec: u64) -> Self {
        assert!(!self.is_negative(), "oracle sqrt of a negative value");
        if self.is_zero() {
            return Self::zero();
        }
        let bits = self.mant.bits() as i64;
        let mut s = (2 * prec as i64 + 2 - bits).max(0);
        if (self.exp - s).rem_euclid(2) != 0 {
            s += 1;
        }
        let m = &self.mant << s as usize;
        BigFloat {
            mant: m.sqrt(),
            exp: (self.exp - s) / 2,
        }
        .truncate(prec)
    }

    pub fn cmp(&self, o: &Self) -> Ordering {
        let prec = self.mant.bits().max(o.mant.bits()) + 64;
        let d = self.sub(o, prec);
        match d.mant.sign() {
            Sign::Minus => Ordering::Less,
            Sign::NoSign => Ordering::Equal,
            Sign::Plus => Ordering::Greater,
        }
    }

    pub fn lt_f64(&self, v: f64) -> bool {
        self.cmp(&BigFloat::from_f64(v)) == Ordering::Less
    }

    /// Nearest binary64 value (ties to even, barring subnormal double rounding).
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let mag = self.mant.abs();
        let bits = mag.bits();
        let (top, shift) = if bits > 64 {
            let sh = bits - 64;
            let hi = (&mag >> sh).to_u64().expect("64-bit window");
            let sticky = mag.trailing_zeros().unwrap_or(0) < sh;
            (hi | sticky as u64, sh as i64)
        } else {
            (mag.to_u64().expect("fits"), 0)
        };
        let v = ldexp(top as f64, self.exp + shift);
        if self.is_negative() {
            -v
        } else {
            v
        }
    }

    /// `round(self * 10^k)` as an integer, half away from zero.
    pub fn scaled_round(&self, k: i64) -> BigInt {
        let mut num = self.mant.abs();
        let mut den = BigInt::one();
        if self.exp >= 0 {
            num <<= self.exp as usize;
        } else {
            den <<= (-self.exp) as usize;
        }
        let ten = BigInt::from(10);
        if k >= 0 {
            num *= num_traits::pow(ten, k as usize);
        } else {
            den *= num_traits::pow(ten, (-k) as usize);
        }
        (num * 2 + &den) / (den * 2)
    }
}

fn ldexp(mut v: f64, mut k: i64) -> f64 {
    let big = 2f64.powi(600);
    let small = 2f64.powi(-600);
    while k > 600 {
        v *= big;
        k -= 600;
    }
    while k < -600 {
        v *= small;
        k += 600;
    }
    v * 2f64.powi(k as i32)
}
