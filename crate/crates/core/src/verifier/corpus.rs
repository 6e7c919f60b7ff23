//! The older sharp bounds for the second Seiffert mean `T`:
//! `S(weighted at alpha) < T < S(weighted at beta)` and
//! `C(weighted at lambda) < T < C(weighted at mu)`.
//!
//! `S` and `C` of the weighted pair are `Q_{t,1/2}` and `Q_{t,1}`, so both
//! reduce to the sign of `p ln(1+u x^2) + ln(arctan(x)/x)`. The sharp cases
//! use `u` in closed form; at the two upper constants the `x^2` coefficient
//! of that function vanishes exactly.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{check_sides_at, falsify_at, Falsification, SampleConfig, Side};
use crate::error::Result;
use crate::lemma::BoundedMean;
use crate::thresholds::{u_to_weight, weight_to_u};

/// Offset applied to each constant in the forbidden direction.
pub const PERTURBATION: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusCase {
    /// `alpha_max`, `beta_min`, `lambda_max` or `mu_min`, with a suffix for
    /// perturbed cases.
    pub name: String,
    /// `sampling` or `schedule`.
    pub method: String,
    pub side: Side,
    pub p: f64,
    pub t: f64,
    pub u: f64,
    pub expect_hold: bool,
    pub held: bool,
    pub passed: bool,
    /// Largest `f/x^2` (lower side) or smallest (upper side) seen.
    pub worst: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusReport {
    pub cases: Vec<CorpusCase>,
}

impl CorpusReport {
    pub fn passed(&self) -> bool {
        self.cases.iter().all(|c| c.passed)
    }

    pub fn falsifications(&self) -> usize {
        self.cases
            .iter()
            .filter(|c| !c.expect_hold && c.passed)
            .count()
    }
}

struct Constant {
    name: &'static str,
    p: f64,
    side: Side,
    u: f64,
}

fn constants() -> [Constant; 4] {
    let four_over_pi = 4.0 / PI;
    [
        Constant {
            name: "alpha_max",
            p: 0.5,
            side: Side::Lower,
            u: four_over_pi * four_over_pi - 1.0,
        },
        Constant {
            name: "beta_min",
            p: 0.5,
            side: Side::Upper,
            u: 2.0 / 3.0,
        },
        Constant {
            name: "lambda_max",
            p: 1.0,
            side: Side::Lower,
            u: four_over_pi - 1.0,
        },
        Constant {
            name: "mu_min",
            p: 1.0,
            side: Side::Upper,
            u: 1.0 / 3.0,
        },
    ]
}

fn sampled(c: &Constant, t: f64, u: f64, cfg: &SampleConfig) -> Result<(bool, f64)> {
    let at = Some((t, u));
    let (lower, upper) = match c.side {
        Side::Lower => (at, None),
        Side::Upper => (None, at),
    };
    let r = check_sides_at(BoundedMean::SecondSeiffert, c.p, lower, upper, cfg)?;
    let worst = match c.side {
        Side::Lower => r.worst_lower,
        Side::Upper => r.worst_upper,
    };
    Ok((r.passed(), worst.unwrap_or(f64::NAN)))
}

/// Check the four sharp constants by sampling, then move each by
/// [`PERTURBATION`] in the forbidden direction and require a counterexample
/// from both the sampled check and the endpoint schedule.
pub fn check_seiffert_corpus(cfg: &SampleConfig) -> Result<CorpusReport> {
    let mut cases = Vec::new();
    for c in constants() {
        let t = u_to_weight(c.u)?;
        let (held, worst) = sampled(&c, t, c.u, cfg)?;
        cases.push(CorpusCase {
            name: c.name.to_string(),
            method: "sampling".into(),
            side: c.side,
            p: c.p,
            t,
            u: c.u,
            expect_hold: true,
            held,
            passed: held,
            worst,
        });

        let (t_bad, suffix) = match c.side {
            Side::Lower => (t + PERTURBATION, "+1e-3"),
            Side::Upper => (t - PERTURBATION, "-1e-3"),
        };
        let u_bad = weight_to_u(t_bad)?;
        let name = format!("{}{}", c.name, suffix);
        let (held, worst) = sampled(&c, t_bad, u_bad, cfg)?;
        cases.push(CorpusCase {
            name: name.clone(),
            method: "sampling".into(),
            side: c.side,
            p: c.p,
            t: t_bad,
            u: u_bad,
            expect_hold: false,
            held,
            passed: !held,
            worst,
        });
        let found = falsify_at(BoundedMean::SecondSeiffert, c.side, c.p, t_bad, u_bad)?;
        let worst = match &found {
            Falsification::Found(cx) => cx.scaled,
            Falsification::NotFound { closest, .. } => *closest,
        };
        cases.push(CorpusCase {
            name,
            method: "schedule".into(),
            side: c.side,
            p: c.p,
            t: t_bad,
            u: u_bad,
            expect_hold: false,
            held: !found.is_found(),
            passed: found.is_found(),
            worst,
        });
    }
    Ok(CorpusReport { cases })
}
