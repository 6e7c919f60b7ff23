//! Bivariate means evaluated through the homogeneity reduction.
//!
//! Every mean here is symmetric and homogeneous of degree one, so it factors
//! as `A(a,b) * m(x)` with `A` the arithmetic mean and `x = |a-b|/(a+b)` the
//! deviation. The profiles `m` are where all the numerical care goes.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dd::{self, Dd};
use crate::error::{check, Result};

/// Below this deviation the removable singularities of x/arctan(x) and
/// x/arcsinh(x) are evaluated by their Maclaurin series.
pub const PROFILE_SERIES_SWITCH: f64 = 1.0 / 1_048_576.0; // 2^-20

/// An unordered pair of positive reals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PositivePair {
    a: f64,
    b: f64,
}

impl PositivePair {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        check(a > 0.0 && a.is_finite(), "a", a, "(0, inf)")?;
        check(b > 0.0 && b.is_finite(), "b", b, "(0, inf)")?;
        Ok(PositivePair { a, b })
    }

    /// The symmetric pair `(1 + x, 1 - x)` whose deviation is `x`.
    pub fn centered(x: Deviation) -> Self {
        let x = x.get();
        PositivePair {
            a: 1.0 + x,
            b: 1.0 - x,
        }
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn swapped(&self) -> Self {
        PositivePair {
            a: self.b,
            b: self.a,
        }
    }

    pub fn arithmetic_mean(&self) -> f64 {
        let s = self.a + self.b;
        if s.is_finite() {
            0.5 * s
        } else {
            0.5 * self.a + 0.5 * self.b
        }
    }
}

/// The reduced variable `|a-b|/(a+b)`, in `[0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Deviation(f64);

impl Deviation {
    pub fn new(x: f64) -> Result<Self> {
        check((0.0..1.0).contains(&x), "x", x, "[0, 1)")?;
        Ok(Deviation(x))
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeanKind {
    Arithmetic,
    ContraHarmonic,
    RootMeanSquare,
    SecondSeiffert,
    NeumanSandor,
}

impl MeanKind {
    /// All kinds, in increasing order of their values for `a != b`.
    pub const ASCENDING: [MeanKind; 5] = [
        MeanKind::Arithmetic,
        MeanKind::NeumanSandor,
        MeanKind::SecondSeiffert,
        MeanKind::RootMeanSquare,
        MeanKind::ContraHarmonic,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MeanKind::Arithmetic => "arithmetic",
            MeanKind::ContraHarmonic => "contra_harmonic",
            MeanKind::RootMeanSquare => "root_mean_square",
            MeanKind::SecondSeiffert => "second_seiffert",
            MeanKind::NeumanSandor => "neuman_sandor",
        }
    }
}

impl fmt::Display for MeanKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MeanKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "a" | "arithmetic" => Ok(MeanKind::Arithmetic),
            "c" | "contra_harmonic" | "contraharmonic" => Ok(MeanKind::ContraHarmonic),
            "s" | "rms" | "root_mean_square" => Ok(MeanKind::RootMeanSquare),
            "t" | "seiffert" | "second_seiffert" => Ok(MeanKind::SecondSeiffert),
            "m" | "ns" | "neuman_sandor" => Ok(MeanKind::NeumanSandor),
            other => Err(format!(
                "unknown mean `{other}` (expected one of a, c, s, t, ns)"
            )),
        }
    }
}

pub fn deviation(pair: PositivePair) -> Deviation {
    let (a, b) = (pair.a, pair.b);
    let s = a + b;
    let x = if s.is_finite() {
        (a - b).abs() / s
    } else {
        (0.5 * a - 0.5 * b).abs() / (0.5 * a + 0.5 * b)
    };
    Deviation(x)
}

/// x/arcsinh(x) for `x >= 0`.
pub(crate) fn neuman_sandor_profile(x: f64) -> f64 {
    if x < PROFILE_SERIES_SWITCH {
        // 1 + x^2/6 - 17 x^4/360; the next term is below 2^-120.
        let x2 = x * x;
        1.0 + x2 * (1.0 / 6.0 - x2 * (17.0 / 360.0))
    } else {
        Dd::new(x).div(dd::asinh(x)).to_f64()
    }
}

/// x/arctan(x) for `x >= 0`.
pub(crate) fn second_seiffert_profile(x: f64) -> f64 {
    if x < PROFILE_SERIES_SWITCH {
        // 1 + x^2/3 - 4 x^4/45
        let x2 = x * x;
        1.0 + x2 * (1.0 / 3.0 - x2 * (4.0 / 45.0))
    } else {
        x / x.atan()
    }
}

/// The profile `m(x) = mean(kind, (1+x, 1-x))`.
pub fn normalized_profile(kind: MeanKind, x: Deviation) -> f64 {
    let x = x.get();
    match kind {
        MeanKind::Arithmetic => 1.0,
        MeanKind::ContraHarmonic => x.mul_add(x, 1.0),
        MeanKind::RootMeanSquare => x.mul_add(x, 1.0).sqrt(),
        MeanKind::SecondSeiffert => second_seiffert_profile(x),
        MeanKind::NeumanSandor => neuman_sandor_profile(x),
    }
}

pub fn mean(kind: MeanKind, pair: PositivePair) -> f64 {
    pair.arithmetic_mean() * normalized_profile(kind, deviation(pair))
}

/// `(t a + (1-t) b, t b + (1-t) a)`.
pub fn weighted_pair(pair: PositivePair, t: f64) -> Result<PositivePair> {
    check((0.0..=1.0).contains(&t), "t", t, "[0, 1]")?;
    let s = 1.0 - t;
    Ok(PositivePair {
        a: t * pair.a + s * pair.b,
        b: t * pair.b + s * pair.a,
    })
}

pub(crate) fn check_power(p: f64) -> Result<()> {
    check(p >= 0.5 && p.is_finite(), "p", p, "[1/2, inf)")
}

/// `Q_{t,p}(a,b) = C^p(weighted pair) * A^(1-p)`, evaluated as
/// `A * exp(p * ln1p(u x^2))` with `u = (2t-1)^2`.
pub fn q_mean(pair: PositivePair, t: f64, p: f64) -> Result<f64> {
    check((0.0..=1.0).contains(&t), "t", t, "[0, 1]")?;
    check_power(p)?;
    let s = 2.0 * t - 1.0;
    let u = s * s;
    let x = deviation(pair).get();
    Ok(pair.arithmetic_mean() * (p * (u * x * x).ln_1p()).exp())
}

/// Same quantity by the literal definition; used to cross-check `q_mean`.
pub fn q_mean_direct(pair: PositivePair, t: f64, p: f64) -> Result<f64> {
    check_power(p)?;
    let w = weighted_pair(pair, t)?;
    let a = pair.arithmetic_mean();
    Ok(mean(MeanKind::ContraHarmonic, w).powf(p) * a.powf(1.0 - p))
}
