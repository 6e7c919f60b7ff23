//! End-to-end acceptance run. Each criterion prints one PASS/FAIL line;
//! the test fails at the end if any of them failed.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use means_sharp::certifier::{certify_theorem, f_enclosure, Interval};
use means_sharp::lemma::{RATIO_SERIES_SWITCH, SCALED_SERIES_SWITCH};
use means_sharp::means::PROFILE_SERIES_SWITCH;
use means_sharp::thresholds::{h_p, u_high, u_low, u_to_weight, u_zero, weight_to_u};
use means_sharp::verifier::oracle::ulp;
use means_sharp::verifier::{
    check_double_inequality, check_seiffert_corpus, falsify_lower, falsify_upper, oracle_eval,
    run_lemma_suite, Falsification, OracleValue, SampleConfig, LOG_LOW_MIN, MAX_DYADIC_EXPONENT,
};
use means_sharp::{
    f, lower_weight_threshold, mean, normalized_profile, q_mean, t_star, upper_weight_threshold,
    weighted_pair, Deviation, MeanKind, PositivePair,
};

const P_GRID: [f64; 9] = [0.5, 0.6, 0.75, 1.0, 1.5, 2.0, 5.0, 10.0, 100.0];

type Verdict = Result<String, String>;
type Criterion = (&'static str, fn() -> Verdict);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        // negated so that a NaN fails the check
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn oracle(expr: &str, inputs: &[f64]) -> OracleValue {
    oracle_eval(expr, inputs, 30).unwrap_or_else(|e| panic!("oracle {expr}{inputs:?}: {e}"))
}

fn ulp_distance(a: f64, b: f64) -> f64 {
    (a - b).abs() / ulp(b)
}

fn constants() -> Verdict {
    let mut worst: f64 = 0.0;
    let mut check = |label: &str, got: f64, want: OracleValue, limit: f64| -> Result<(), String> {
        let e = want.ulp_error(got);
        worst = worst.max(e);
        ensure!(
            e <= limit,
            "{label}: {got:e} is {e} ulp from {}",
            want.decimal
        );
        Ok(())
    };
    check("t_star", t_star(), oracle("t_star", &[]), 1.0)?;
    let t2_half = upper_weight_threshold(0.5).map_err(|e| e.to_string())?;
    let t2_one = upper_weight_threshold(1.0).map_err(|e| e.to_string())?;
    let t1_half = lower_weight_threshold(0.5).map_err(|e| e.to_string())?;
    let t1_one = lower_weight_threshold(1.0).map_err(|e| e.to_string())?;
    check("t2(1/2)", t2_half, oracle("closed_upper_p_half", &[]), 1.0)?;
    check("t2(1)", t2_one, oracle("closed_upper_p_one", &[]), 1.0)?;
    check("t1(1/2)", t1_half, oracle("closed_lower_p_half", &[]), 2.0)?;
    check("t1(1)", t1_one, oracle("closed_lower_p_one", &[]), 2.0)?;
    // the general threshold formulas agree with the closed forms
    for (general, closed, p) in [
        ("lower_weight_threshold", "closed_lower_p_half", 0.5),
        ("lower_weight_threshold", "closed_lower_p_one", 1.0),
        ("upper_weight_threshold", "closed_upper_p_half", 0.5),
        ("upper_weight_threshold", "closed_upper_p_one", 1.0),
    ] {
        let a = oracle_eval(general, &[p], 30).map_err(|e| e.to_string())?;
        let b = oracle_eval(closed, &[], 30).map_err(|e| e.to_string())?;
        ensure!(
            a.decimal == b.decimal,
            "{general}({p}) = {} but {closed} = {}",
            a.decimal,
            b.decimal
        );
    }
    Ok(format!("worst error {worst:.2} ulp"))
}

fn sufficiency() -> Verdict {
    let cfg = SampleConfig::default();
    let xs = cfg.samples().map_err(|e| e.to_string())?;
    let top = 1.0 - (-(MAX_DYADIC_EXPONENT as f64)).exp2();
    ensure!(xs.len() >= 100_000, "only {} samples", xs.len());
    ensure!(xs.contains(&LOG_LOW_MIN), "1e-300 not sampled");
    ensure!(xs.contains(&top), "1 - 2^-40 not sampled");
    let start = Instant::now();
    for p in P_GRID {
        let t1 = lower_weight_threshold(p).map_err(|e| e.to_string())? - 1e-6;
        let t2 = upper_weight_threshold(p).map_err(|e| e.to_string())? + 1e-6;
        let r = check_double_inequality(p, t1, t2, &cfg).map_err(|e| e.to_string())?;
        ensure!(r.samples >= 100_000, "p={p}: {} samples", r.samples);
        ensure!(r.passed(), "p={p}: counterexample {:?}", r.counterexample);
    }
    let took = start.elapsed();
    ensure!(took <= Duration::from_secs(60), "took {took:?}");
    Ok(format!(
        "9 values of p, {} samples each, {took:.2?}",
        xs.len()
    ))
}

fn sharpness() -> Verdict {
    let (mut lower, mut upper) = (0, 0);
    let mut failures = Vec::new();
    for p in P_GRID {
        let t1 = lower_weight_threshold(p).map_err(|e| e.to_string())?;
        let t2 = upper_weight_threshold(p).map_err(|e| e.to_string())?;
        let cases = [
            ("lower", t1 + 1e-3, true, falsify_lower(p, t1 + 1e-3)),
            ("lower", t1 - 1e-3, false, falsify_lower(p, t1 - 1e-3)),
            ("upper", t2 - 1e-3, true, falsify_upper(p, t2 - 1e-3)),
            ("upper", t2 + 1e-3, false, falsify_upper(p, t2 + 1e-3)),
        ];
        for (side, t, want_found, outcome) in cases {
            let outcome = outcome.map_err(|e| e.to_string())?;
            let ok = match &outcome {
                Falsification::Found(cx) => want_found && cx.reverify(),
                Falsification::NotFound { .. } => !want_found,
            };
            if ok {
                if side == "lower" {
                    lower += 1;
                } else {
                    upper += 1;
                }
            } else {
                failures.push(format!("{side} p={p} t={t}"));
            }
        }
    }
    ensure!(
        failures.is_empty(),
        "wrong outcomes: {}",
        failures.join(", ")
    );
    Ok(format!("lower {lower}/18, upper {upper}/18"))
}

fn reduction_identity() -> Verdict {
    let xs: Vec<f64> = (0..25)
        .map(|i| {
            if i < 10 {
                10f64.powi(-i - 1)
            } else {
                (i - 9) as f64 / 16.0 - 1e-9
            }
        })
        .collect();
    let us: Vec<f64> = (0..20).map(|i| i as f64 / 19.0).collect();
    let ps: Vec<f64> = (0..20).map(|i| 0.5 * 1.3f64.powi(i)).collect();
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for &x in &xs {
        let pair = PositivePair::centered(Deviation::new(x).map_err(|e| e.to_string())?);
        let m = mean(MeanKind::NeumanSandor, pair);
        for &u0 in &us {
            let t = u_to_weight(u0).map_err(|e| e.to_string())?;
            let u = weight_to_u(t).map_err(|e| e.to_string())?;
            for &p in &ps {
                let q = q_mean(pair, t, p).map_err(|e| e.to_string())?;
                let direct = (q / m).ln();
                let reduced = f(x, u, p).map_err(|e| e.to_string())?;
                let e = (direct - reduced).abs();
                ensure!(
                    e <= 1e-13,
                    "x={x} u={u} p={p}: |{direct:e} - {reduced:e}| = {e:e}"
                );
                worst = worst.max(e);
                count += 1;
            }
        }
    }
    Ok(format!("{count} points, worst {worst:.2e}"))
}

fn lemma_suite() -> Verdict {
    let r = run_lemma_suite(&SampleConfig::default()).map_err(|e| e.to_string())?;
    let failed: Vec<&str> = r
        .properties
        .iter()
        .filter(|p| !p.passed)
        .map(|p| p.name.as_str())
        .collect();
    ensure!(failed.is_empty(), "failed: {}", failed.join(", "));
    for p in P_GRID {
        let (lo, mid, hi) = (
            u_low(p).map_err(|e| e.to_string())?,
            u_zero(p).map_err(|e| e.to_string())?,
            u_high(p).map_err(|e| e.to_string())?,
        );
        ensure!(lo < mid && mid < hi, "p={p}: {lo} {mid} {hi}");
        ensure!(
            h_p(hi, p).map_err(|e| e.to_string())? > 0.0,
            "h_p(u_high) <= 0 at p={p}"
        );
        ensure!(
            h_p(lo, p).map_err(|e| e.to_string())? < 0.0,
            "h_p(u_low) >= 0 at p={p}"
        );
    }
    Ok(format!("{} properties", r.properties.len()))
}

fn q_family() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst: f64 = 0.0;
    for _ in 0..10_000 {
        let a = 10f64.powf(rng.gen_range(-3.0..3.0));
        let b = 10f64.powf(rng.gen_range(-3.0..3.0));
        if a == b {
            continue;
        }
        let pair = PositivePair::new(a, b).map_err(|e| e.to_string())?;
        let t: f64 = rng.gen_range(0.0..=1.0);
        let w = weighted_pair(pair, t).map_err(|e| e.to_string())?;
        for (p, kind) in [
            (0.5, MeanKind::RootMeanSquare),
            (1.0, MeanKind::ContraHarmonic),
        ] {
            let q = q_mean(pair, t, p).map_err(|e| e.to_string())?;
            let m = mean(kind, w);
            let e = ulp_distance(q, m);
            ensure!(e <= 4.0, "a={a} b={b} t={t} p={p}: {e} ulp");
            worst = worst.max(e);
        }
        let values: Vec<f64> = MeanKind::ASCENDING.iter().map(|&k| mean(k, pair)).collect();
        ensure!(
            values.windows(2).all(|w| w[0] < w[1]),
            "ordering fails at a={a} b={b}: {values:?}"
        );
        let p = rng.gen_range(0.5..10.0);
        let ts: Vec<f64> = (0..=10).map(|i| 0.5 + 0.05 * i as f64).collect();
        let qs = ts
            .iter()
            .map(|&t| q_mean(pair, t, p))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| e.to_string())?;
        ensure!(
            qs.windows(2).all(|w| w[0] < w[1]),
            "Q not increasing in t at a={a} b={b} p={p}"
        );
    }
    Ok(format!("worst identity error {worst:.2} ulp"))
}

fn certification() -> Verdict {
    let start = Instant::now();
    for p in [0.5, 1.0, 2.0] {
        let c = certify_theorem(p, 1e-3).map_err(|e| e.to_string())?;
        ensure!(c.complete, "p={p}: flagged {:?}", c.flagged);
        for part in &c.parts {
            let cert = part.outcome.certificate();
            ensure!(
                cert.is_some_and(|c| c.replay()),
                "p={p}: {} does not replay",
                part.label
            );
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let points: Vec<(f64, f64, f64)> = (0..10_000)
        .map(|i| {
            let x = if i % 2 == 0 {
                10f64.powf(rng.gen_range(-8.0..0.0))
            } else {
                rng.gen_range(1e-6..1.0)
            };
            (
                x.min(1.0 - 1e-12),
                rng.gen_range(0.0..=1.0),
                rng.gen_range(0.5..10.0),
            )
        })
        .collect();
    let misses: Vec<String> = points
        .par_iter()
        .filter_map(|&(x, u, p)| {
            let enc = f_enclosure(Interval::point(x), u, p).ok()?;
            let want = oracle_eval("f", &[x, u, p], 30).ok()?;
            (!want.within(enc.lo(), enc.hi())).then(|| format!("f({x}, {u}, {p})"))
        })
        .collect();
    ensure!(
        misses.is_empty(),
        "{} enclosures miss, e.g. {}",
        misses.len(),
        misses[0]
    );
    let took = start.elapsed();
    ensure!(took <= Duration::from_secs(120), "took {took:?}");
    Ok(format!(
        "3 complete certificates, 10000 enclosures sound, {took:.2?}"
    ))
}

fn corpus() -> Verdict {
    let r = check_seiffert_corpus(&SampleConfig::default()).map_err(|e| e.to_string())?;
    let sharp = r.cases.iter().filter(|c| c.expect_hold && c.passed).count();
    ensure!(sharp == 4, "{sharp}/4 sharp constants hold");
    ensure!(
        r.falsifications() == 8,
        "{}/8 falsifications",
        r.falsifications()
    );
    ensure!(r.passed(), "corpus failed");
    Ok("4/4 sharp constants, 8/8 falsifications".into())
}

fn stability() -> Verdict {
    let mut xs: Vec<f64> = (0..=600)
        .map(|i| 10f64.powf(-300.0 + 300.0 * i as f64 / 600.0))
        .filter(|&x| x < 1.0)
        .collect();
    xs.extend((1..=12).map(|k| 1.0 - 10f64.powi(-k)));
    for s in [
        PROFILE_SERIES_SWITCH,
        SCALED_SERIES_SWITCH,
        RATIO_SERIES_SWITCH,
    ] {
        let mut lo = s;
        let mut hi = s;
        for _ in 0..3 {
            lo = lo.next_down();
            xs.extend([lo, hi]);
            hi = hi.next_up();
        }
        xs.extend([s * (1.0 - 1e-9), s * (1.0 + 1e-9)]);
    }
    let params = [
        (0.2, 1.0),
        (1.0 / 3.0, 0.5),
        (0.5, 2.0),
        (1.0, 10.0),
        (0.0, 0.5),
        (u_zero(1.0).map_err(|e| e.to_string())?, 1.0),
    ];
    let results: Vec<Result<(f64, f64), String>> = xs
        .par_iter()
        .map(|&x| {
            let d = Deviation::new(x).map_err(|e| e.to_string())?;
            let got = normalized_profile(MeanKind::NeumanSandor, d);
            let prof = oracle("neuman_sandor_profile", &[x]).ulp_error(got);
            if prof > 2.0 {
                return Err(format!("profile at x={x:e}: {prof} ulp"));
            }
            let mut f_err: f64 = 0.0;
            for (u, p) in params {
                let want = oracle("f", &[x, u, p]);
                let got = f(x, u, p).map_err(|e| e.to_string())?;
                let e = want.abs_error(got);
                if e > 1e-15 + 2.0 * ulp(want.hi) {
                    return Err(format!(
                        "f({x:e}, {u}, {p}) = {got:e}, oracle {}",
                        want.decimal
                    ));
                }
                f_err = f_err.max(e);
            }
            Ok((prof, f_err))
        })
        .collect();
    let mut worst = (0.0f64, 0.0f64);
    for r in results {
        let (a, b) = r?;
        worst = (worst.0.max(a), worst.1.max(b));
    }
    Ok(format!(
        "{} points, profile {:.2} ulp, f {:.2e}",
        xs.len(),
        worst.0,
        worst.1
    ))
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 9] = [
        ("constants", constants),
        ("sufficiency", sufficiency),
        ("sharpness", sharpness),
        ("reduction identity", reduction_identity),
        ("lemma suite", lemma_suite),
        ("Q family", q_family),
        ("certification", certification),
        ("Seiffert corpus", corpus),
        ("numerical stability", stability),
    ];
    let mut failed = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let n = i + 1;
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|e| {
            Err(e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        match outcome {
            Ok(detail) => println!("criterion {n} ({name}): PASS  {detail}"),
            Err(why) => {
                println!("criterion {n} ({name}): FAIL  {why}");
                failed.push(n);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
