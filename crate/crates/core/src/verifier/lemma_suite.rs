//! Every structural property of the means and the lemma functions, checked
//! on seeded grids and reported with its worst slack.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::oracle::{oracle_eval, ulp};
use super::SampleConfig;
use crate::lemma::{self, prefactor, ratio_unchecked, sign_carrier, BoundedMean};
use crate::means::{
    mean, normalized_profile, q_mean, weighted_pair, Deviation, MeanKind, PositivePair,
    PROFILE_SERIES_SWITCH,
};
use crate::thresholds::{h_p, u_high, u_low, u_to_weight, u_zero};
use crate::Result;

/// Powers checked by the per-`p` properties.
pub const P_GRID: [f64; 6] = [0.5, 0.75, 1.0, 2.0, 5.0, 10.0];

const RANDOM_CASES: usize = 10_000;
const SIGN_OFFSET: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyResult {
    pub name: String,
    pub passed: bool,
    /// Smallest slack over the grid; negative means violated. For strict
    /// properties zero also fails.
    pub worst_margin: f64,
    pub checked: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub seed: u64,
    pub properties: Vec<PropertyResult>,
}

impl LemmaReport {
    pub fn passed(&self) -> bool {
        self.properties.iter().all(|p| p.passed)
    }

    pub fn get(&self, name: &str) -> Option<&PropertyResult> {
        self.properties.iter().find(|p| p.name == name)
    }
}

struct Collector {
    out: Vec<PropertyResult>,
}

impl Collector {
    /// `min(margins) > 0`.
    fn strict(&mut self, name: &str, margins: impl IntoIterator<Item = f64>) {
        let (worst, n) = fold_min(margins);
        self.out.push(PropertyResult {
            name: name.into(),
            passed: worst > 0.0,
            worst_margin: worst,
            checked: n,
        });
    }

    /// `max(errors) <= tol`, reported as `tol - max(errors)`.
    fn within(&mut self, name: &str, tol: f64, errors: impl IntoIterator<Item = f64>) {
        let (worst, n) = fold_min(errors.into_iter().map(|e| tol - e));
        self.out.push(PropertyResult {
            name: name.into(),
            passed: worst >= 0.0,
            worst_margin: worst,
            checked: n,
        });
    }
}

fn fold_min(values: impl IntoIterator<Item = f64>) -> (f64, usize) {
    values.into_iter().fold((f64::INFINITY, 0), |(m, n), v| {
        // NaN counts as a failure
        (
            if v.is_nan() {
                f64::NEG_INFINITY
            } else {
                m.min(v)
            },
            n + 1,
        )
    })
}

fn linear(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

fn logspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.log10(), hi.log10());
    (0..n)
        .map(|i| 10f64.powf(a + (b - a) * i as f64 / (n - 1) as f64))
        .collect()
}

fn ulps(a: f64, b: f64) -> f64 {
    (a - b).abs() / ulp(b)
}

fn pair(a: f64, b: f64) -> PositivePair {
    PositivePair::new(a, b).expect("generated pairs are positive")
}

/// Random pair with scale in `[e^-20, e^20]` and deviation log-uniform in
/// `[1e-6, 1)`.
fn random_pair(rng: &mut ChaCha8Rng) -> PositivePair {
    let scale = rng.gen_range(-20.0f64..20.0).exp();
    let x = 10f64.powf(rng.gen_range(-6.0f64..0.0)).min(0.999_999);
    let (a, b) = (scale * (1.0 + x), scale * (1.0 - x));
    if rng.gen::<bool>() {
        pair(a, b)
    } else {
        pair(b, a)
    }
}

/// Run every property with the crate's own `h`.
pub fn run_lemma_suite(cfg: &SampleConfig) -> Result<LemmaReport> {
    run_lemma_suite_with_h(cfg, &|x| lemma::h(x).unwrap_or(f64::NAN))
}

/// Same as [`run_lemma_suite`] with `h` replaced, so that the harness can be
/// shown to catch a broken implementation.
pub fn run_lemma_suite_with_h(
    cfg: &SampleConfig,
    h: &(dyn Fn(f64) -> f64 + Sync),
) -> Result<LemmaReport> {
    let xs = cfg.samples()?;
    let mut c = Collector { out: Vec::new() };
    means_properties(&mut c, cfg.seed)?;
    h_properties(&mut c, h);
    ratio_properties(&mut c)?;
    sign_properties(&mut c, &xs, cfg.seed)?;
    Ok(LemmaReport {
        seed: cfg.seed,
        properties: c.out,
    })
}

fn means_properties(c: &mut Collector, seed: u64) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6d65_616e);
    let pairs: Vec<PositivePair> = (0..RANDOM_CASES).map(|_| random_pair(&mut rng)).collect();
    let weights: Vec<f64> = (0..RANDOM_CASES)
        .map(|_| rng.gen_range(0.0..=1.0))
        .collect();

    c.within(
        "mean_symmetry",
        0.0,
        pairs.iter().flat_map(|&pr| {
            MeanKind::ASCENDING
                .iter()
                .map(move |&k| (mean(k, pr) - mean(k, pr.swapped())).abs())
        }),
    );

    c.within(
        "mean_homogeneity",
        0.0,
        pairs.iter().flat_map(|&pr| {
            [2f64.powi(-40), 1.0, 2f64.powi(40)]
                .into_iter()
                .flat_map(move |l| {
                    let scaled = pair(l * pr.a(), l * pr.b());
                    MeanKind::ASCENDING
                        .iter()
                        .map(move |&k| ulps(mean(k, scaled), l * mean(k, pr)))
                })
        }),
    );

    c.strict(
        "mean_between_arguments",
        pairs.iter().flat_map(|&pr| {
            let (lo, hi) = (pr.a().min(pr.b()), pr.a().max(pr.b()));
            MeanKind::ASCENDING.iter().map(move |&k| {
                let m = mean(k, pr);
                (m - lo).min(hi - m) / (hi - lo)
            })
        }),
    );

    c.strict(
        "mean_ordering",
        pairs.iter().flat_map(|&pr| {
            let v: Vec<f64> = MeanKind::ASCENDING.iter().map(|&k| mean(k, pr)).collect();
            (0..4).map(move |i| (v[i + 1] - v[i]) / v[i])
        }),
    );

    let q_errors = |p: f64, kind: MeanKind| {
        pairs.iter().zip(&weights).map(move |(&pr, &t)| {
            let q = q_mean(pr, t, p).expect("valid parameters");
            let w = weighted_pair(pr, t).expect("valid weight");
            ulps(q, mean(kind, w))
        })
    };
    c.within(
        "q_half_is_rms_of_weighted_pair",
        4.0,
        q_errors(0.5, MeanKind::RootMeanSquare),
    );
    c.within(
        "q_one_is_contra_harmonic_of_weighted_pair",
        4.0,
        q_errors(1.0, MeanKind::ContraHarmonic),
    );

    // strictly increasing in t: a coarse grid over (1/2, 1) and a fine one
    // around a random weight, on pairs with deviation >= 1e-2
    let coarse = linear(0.501, 0.999, 499);
    let mut q_gaps = Vec::new();
    for _ in 0..200 {
        let x = rng.gen_range(0.01..0.99);
        let scale = rng.gen_range(-5.0f64..5.0).exp();
        let pr = pair(scale * (1.0 + x), scale * (1.0 - x));
        let p = rng.gen_range(0.5..10.0);
        let t0 = rng.gen_range(0.55..0.95);
        let fine: Vec<f64> = (0..100).map(|i| t0 + i as f64 * 1e-6).collect();
        for grid in [&coarse, &fine] {
            let qs: Vec<f64> = grid
                .iter()
                .map(|&t| q_mean(pr, t, p).expect("valid"))
                .collect();
            q_gaps.extend(qs.windows(2).map(|w| (w[1] - w[0]) / w[0]));
        }
    }
    c.strict("q_increasing_in_t", q_gaps);

    let mut xs = logspace(1e-300, 1.0 - 1e-12, 120);
    for s in [PROFILE_SERIES_SWITCH, 1.0 / 16.0, 1.0 / 1024.0] {
        xs.extend([s * (1.0 - f64::EPSILON), s, s * (1.0 + 2.0 * f64::EPSILON)]);
    }
    xs.push(1.0 - 1e-12);
    let errors: Vec<f64> = xs
        .par_iter()
        .map(|&x| {
            let want = oracle_eval("neuman_sandor_profile", &[x], 30)?;
            let got = normalized_profile(MeanKind::NeumanSandor, Deviation::new(x)?);
            Ok(want.ulp_error(got))
        })
        .collect::<Result<_>>()?;
    c.within("neuman_sandor_profile_accuracy_ulps", 2.0, errors);
    Ok(())
}

fn h_properties(c: &mut Collector, h: &(dyn Fn(f64) -> f64 + Sync)) {
    let grids = [
        linear(0.0025, 10.0, 4000),
        logspace(1e-4, 10.0, 4000),
        linear(1e-5, 0.01, 1000),
    ];
    c.strict(
        "h_increasing",
        grids
            .iter()
            .flat_map(|g| g.windows(2).map(|w| h(w[1]) - h(w[0])).collect::<Vec<_>>()),
    );
    c.within(
        "h_convex",
        1e-12,
        grids[..1].iter().chain(&grids[2..]).flat_map(|g| {
            g.windows(3)
                .map(|w| -(h(w[0]) - 2.0 * h(w[1]) + h(w[2])))
                .collect::<Vec<_>>()
        }),
    );
    let pos: Vec<f64> = grids.iter().flatten().copied().collect();
    c.strict(
        "h1_positive",
        pos.iter().map(|&x| lemma::h1(x).unwrap_or(f64::NAN)),
    );
    c.strict(
        "h2_positive",
        pos.iter().map(|&x| lemma::h2(x).unwrap_or(f64::NAN)),
    );
}

fn ratio_properties(c: &mut Collector) -> Result<()> {
    let grid = linear(1e-4, 1.0, 10_000);
    let mut drops = Vec::new();
    let mut limit0 = Vec::new();
    let mut limit1 = Vec::new();
    let mut d_values = Vec::new();
    let mut d_rises = Vec::new();
    let mut d_identity = Vec::new();
    for p in P_GRID {
        let r: Vec<f64> = grid.par_iter().map(|&x| ratio_unchecked(x, p)).collect();
        drops.extend(r.windows(2).map(|w| (w[0] - w[1]) / w[0]));
        limit0.push((lemma::ratio(1e-9, p)? - 1.0 / (6.0 * p)).abs());
        limit1.push(oracle_eval("u_low", &[p], 30)?.ulp_error(lemma::ratio(1.0, p)?));

        let dgrid = linear(0.0, 1.0, 1001);
        let d: Vec<f64> = dgrid
            .iter()
            .map(|&x| lemma::denom_d(x, p))
            .collect::<Result<_>>()?;
        d_values.extend(d.iter().copied());
        d_rises.extend(d.windows(2).map(|w| w[1] - w[0]));
        for x in [0.1, 0.5, 0.9] {
            let step = 1e-6;
            let g1p = (lemma::g1(x + step)? - lemma::g1(x - step)?) / (2.0 * step);
            let g2p = (lemma::g2(x + step, p)? - lemma::g2(x - step, p)?) / (2.0 * step);
            d_identity.push((g1p / g2p * lemma::denom_d(x, p)? - 1.0).abs());
        }
    }
    c.strict("ratio_decreasing", drops);
    c.within("ratio_limit_at_zero", 1e-12, limit0);
    c.within("ratio_limit_at_one_ulps", 4.0, limit1);
    c.strict("denom_d_positive", d_values);
    c.strict("denom_d_increasing", d_rises);
    c.within("denom_d_identity", 1e-8, d_identity);

    // f' against central differences, relative to the size of the two
    // terms whose difference f' is
    let mut fd = Vec::new();
    for p in P_GRID {
        for u in linear(0.0, 1.0, 21) {
            for x in linear(0.05, 0.95, 19) {
                let step = 1e-6;
                let num = (lemma::f(x + step, u, p)? - lemma::f(x - step, u, p)?) / (2.0 * step);
                let exact = lemma::f_prime(x, u, p)?;
                let scale = exact
                    .abs()
                    .max(prefactor(x, u, p) * (u + ratio_unchecked(x, p)));
                fd.push((num - exact).abs() / scale);
            }
        }
    }
    c.within("f_prime_matches_differences", 1e-6, fd);
    Ok(())
}

fn sign_properties(c: &mut Collector, xs: &[f64], seed: u64) -> Result<()> {
    let mut sandwich = Vec::new();
    let mut hp_high = Vec::new();
    let mut hp_low = Vec::new();
    let mut above = Vec::new();
    let mut below = Vec::new();
    for p in P_GRID {
        let (lo, zero, high) = (u_low(p)?, u_zero(p)?, u_high(p)?);
        sandwich.push((zero - lo).min(high - zero));
        hp_high.push(h_p(high, p)?);
        hp_low.push(-h_p(lo, p)?);
        let (ua, ub) = (high + SIGN_OFFSET, zero - SIGN_OFFSET);
        let signs: Vec<(f64, f64)> = xs
            .par_iter()
            .map(|&x| {
                (
                    sign_carrier(BoundedMean::NeumanSandor, x, ua, p),
                    -sign_carrier(BoundedMean::NeumanSandor, x, ub, p),
                )
            })
            .collect();
        above.extend(signs.iter().map(|s| s.0));
        below.extend(signs.iter().map(|s| s.1));
    }
    c.strict("u_low_below_u_zero_below_u_high", sandwich);
    c.strict("h_p_positive_at_u_high", hp_high);
    c.strict("h_p_negative_at_u_low", hp_low);
    c.strict("f_positive_above_u_high", above);
    c.strict("f_negative_below_u_zero", below);

    // ln(Q/M) on the pair (1+x, 1-x) against f
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7265_6475);
    let cases: Vec<(f64, f64, f64)> = (0..RANDOM_CASES)
        .map(|_| {
            (
                rng.gen_range(1e-6..0.999_999),
                rng.gen_range(0.0..=1.0),
                rng.gen_range(0.5..10.0),
            )
        })
        .collect();
    let gaps: Vec<f64> = cases
        .par_iter()
        .map(|&(x, u, p)| {
            let pr = PositivePair::centered(Deviation::new(x)?);
            let q = q_mean(pr, u_to_weight(u)?, p)?;
            let m = mean(MeanKind::NeumanSandor, pr);
            Ok((lemma::f(x, u, p)? - (q / m).ln()).abs())
        })
        .collect::<Result<_>>()?;
    c.within("reduction_identity", 1e-13, gaps);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> SampleConfig {
        SampleConfig {
            n_uniform: 1000,
            n_log_low: 200,
            n_log_high: 200,
            seed: 3,
        }
    }

    #[test]
    fn all_properties_hold() {
        let r = run_lemma_suite(&cfg()).unwrap();
        for p in &r.properties {
            assert!(p.passed, "{p:?}");
        }
    }

    #[test]
    fn broken_h_is_caught() {
        // piecewise linear table of h with one node pushed down
        let nodes: Vec<(f64, f64)> = (0..=20)
            .map(|i| {
                let x = i as f64 * 0.5;
                let v = lemma::h(x).unwrap();
                (x, if i == 10 { v - 0.1 } else { v })
            })
            .collect();
        let table = move |x: f64| {
            let i = ((x / 0.5) as usize).min(19);
            let (x0, y0) = nodes[i];
            let (x1, y1) = nodes[i + 1];
            y0 + (y1 - y0) * (x - x0) / (x1 - x0)
        };
        let r = run_lemma_suite_with_h(&cfg(), &table).unwrap();
        assert!(!r.get("h_convex").unwrap().passed);
        assert!(r.get("h1_positive").unwrap().passed);
    }
}
