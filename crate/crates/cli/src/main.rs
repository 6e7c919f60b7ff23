//! `means-sharp`: evaluate the means, tabulate the sharp weights, and run the
//! sampled, scheduled and interval checks of `Q_{t1,p} < M < Q_{t2,p}`.
//!
//! Exit codes: 0 pass or certified, 1 counterexample or undecided, 2 usage.

mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use means_sharp::certifier::{certify_theorem_with_depth, DEFAULT_MAX_DEPTH};
use means_sharp::thresholds::{u_high, u_low, u_zero, weight_to_u};
use means_sharp::verifier::{
    check_double_inequality, check_seiffert_corpus, falsify, run_lemma_suite, SampleConfig, Side,
};
use means_sharp::{
    f, lower_weight_threshold, mean, normalized_profile, q_mean, upper_weight_threshold,
    BoundedMean, Deviation, MeanKind, PositivePair,
};

use output::{emit_csv, emit_json, number, Manifest, WriteError};

#[derive(Parser)]
#[command(name = "means-sharp", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print one mean of `a` and `b`.
    Eval(EvalArgs),
    /// Tabulate the sharp weights over a range of `p`.
    Thresholds(ThresholdArgs),
    /// Sample both sides of the double inequality.
    Verify(VerifyArgs),
    /// Search the endpoint schedule for a counterexample to one side.
    Falsify(FalsifyArgs),
    /// Interval certificates for both sides at distance `delta`.
    Certify(CertifyArgs),
    /// Curves of the bounded mean, the bounds and `f` for plotting.
    Profile(ProfileArgs),
    /// Run the sampled lemma properties.
    Lemmas(SampleArgs),
    /// Check the sharp bounds for the second Seiffert mean.
    Corpus(SampleArgs),
}

#[derive(clap::Args)]
#[command(allow_negative_numbers = true)]
struct EvalArgs {
    /// One of a, ns, t, s, c (or the full names).
    #[arg(long, required_unless_present = "q", conflicts_with = "q")]
    mean: Option<MeanKind>,
    /// Evaluate `Q_{t,p}` instead of a named mean.
    #[arg(long, requires_all = ["t", "p"])]
    q: bool,
    #[arg(long)]
    t: Option<f64>,
    #[arg(long)]
    p: Option<f64>,
    a: f64,
    b: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(clap::Args)]
struct ThresholdArgs {
    #[arg(long, default_value_t = 0.5)]
    p_min: f64,
    #[arg(long, default_value_t = 10.0)]
    p_max: f64,
    /// Number of rows; `p` is evenly spaced.
    #[arg(long, default_value_t = 20)]
    n: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(clap::Args)]
struct SampleArgs {
    #[arg(long, default_value_t = SampleConfig::default().seed)]
    seed: u64,
    /// Uniform, low log-spaced and near-one sample counts.
    #[arg(long, default_value = "60000,20000,20000")]
    counts: Counts,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, Serialize)]
struct Counts([usize; 3]);

impl std::str::FromStr for Counts {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(',').collect();
        if parts.len() != 3 {
            return Err("expected three comma-separated counts".into());
        }
        let mut out = [0; 3];
        for (slot, part) in out.iter_mut().zip(parts) {
            *slot = part.trim().parse().map_err(|e| format!("`{part}`: {e}"))?;
        }
        Ok(Counts(out))
    }
}

impl SampleArgs {
    fn config(&self) -> SampleConfig {
        let [n_uniform, n_log_low, n_log_high] = self.counts.0;
        SampleConfig {
            n_uniform,
            n_log_low,
            n_log_high,
            seed: self.seed,
        }
    }
}

#[derive(clap::Args)]
struct VerifyArgs {
    #[arg(long)]
    p: f64,
    #[arg(long)]
    t1: f64,
    #[arg(long)]
    t2: f64,
    #[command(flatten)]
    sampling: SampleArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum Target {
    /// Neuman-Sandor mean.
    Ns,
    /// Second Seiffert mean.
    T,
}

#[derive(clap::Args)]
struct FalsifyArgs {
    #[arg(long)]
    p: f64,
    #[arg(long)]
    t: f64,
    #[arg(long)]
    side: Side,
    #[arg(long, value_enum, default_value_t = Target::Ns)]
    target: Target,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(clap::Args)]
struct CertifyArgs {
    #[arg(long)]
    p: f64,
    #[arg(long, default_value_t = 1e-3)]
    delta: f64,
    #[arg(long, default_value_t = DEFAULT_MAX_DEPTH)]
    depth: u32,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(clap::Args)]
struct ProfileArgs {
    #[arg(long)]
    p: f64,
    /// Weights; `t1` and `t2` stand for the sharp thresholds at `p`.
    #[arg(long, value_delimiter = ',', default_value = "t1,t2")]
    t: Vec<String>,
    /// Number of abscissae.
    #[arg(long, default_value_t = 200)]
    n: usize,
    #[arg(long)]
    output: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Write(WriteError),
}

impl From<means_sharp::Error> for Failure {
    fn from(e: means_sharp::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<WriteError> for Failure {
    fn from(e: WriteError) -> Self {
        Failure::Write(e)
    }
}

type Outcome = Result<bool, Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn cmd_eval(args: &EvalArgs) -> Outcome {
    if !(args.a > 0.0 && args.b > 0.0 && args.a.is_finite() && args.b.is_finite()) {
        return Err(usage(format!(
            "a and b must be positive and finite, got {} and {}",
            args.a, args.b
        )));
    }
    let pair = PositivePair::new(args.a, args.b)?;
    let v = match (args.mean, args.t, args.p) {
        (Some(kind), _, _) => mean(kind, pair),
        (None, Some(t), Some(p)) => q_mean(pair, t, p)?,
        _ => return Err(usage("give --mean, or --q with --t and --p")),
    };
    println!("{}", number(v));
    Ok(true)
}

#[derive(Serialize)]
struct ThresholdRow {
    p: f64,
    t1_max: f64,
    t2_min: f64,
    u_zero: f64,
    u_low: f64,
    u_high: f64,
}

fn cmd_thresholds(args: &ThresholdArgs) -> Outcome {
    if !(args.p_min >= 0.5 && args.p_min <= args.p_max && args.p_max.is_finite()) {
        return Err(usage("need 1/2 <= p-min <= p-max < inf"));
    }
    if args.n == 0 {
        return Err(usage("n must be at least 1"));
    }
    let n = args.n;
    let rows = (0..n)
        .map(|i| {
            let p = if i + 1 == n && n > 1 {
                args.p_max
            } else {
                args.p_min + (args.p_max - args.p_min) * i as f64 / (n - 1).max(1) as f64
            };
            Ok(ThresholdRow {
                p,
                t1_max: lower_weight_threshold(p)?,
                t2_min: upper_weight_threshold(p)?,
                u_zero: u_zero(p)?,
                u_low: u_low(p)?,
                u_high: u_high(p)?,
            })
        })
        .collect::<Result<Vec<_>, means_sharp::Error>>()?;
    let format = match args.format {
        Format::Csv => "csv",
        Format::Json => "json",
    };
    let manifest = Manifest::new(
        "thresholds",
        json!({ "p_min": args.p_min, "p_max": args.p_max, "n": n, "format": format }),
        None,
    );
    let out = args.output.as_deref();
    match args.format {
        Format::Json => emit_json(manifest, "rows", &rows, out)?,
        Format::Csv => {
            let header: Vec<String> = ["p", "t1_max", "t2_min", "u_zero", "u_low", "u_high"]
                .map(String::from)
                .to_vec();
            let table: Vec<Vec<f64>> = rows
                .iter()
                .map(|r| vec![r.p, r.t1_max, r.t2_min, r.u_zero, r.u_low, r.u_high])
                .collect();
            emit_csv(manifest, &header, &table, out)?
        }
    }
    Ok(true)
}

fn sample_params(s: &SampleArgs) -> serde_json::Value {
    json!({ "counts": s.counts, "seed": s.seed })
}

fn cmd_verify(args: &VerifyArgs) -> Outcome {
    let cfg = args.sampling.config();
    let report = check_double_inequality(args.p, args.t1, args.t2, &cfg)?;
    let manifest = Manifest::new(
        "verify",
        json!({ "p": args.p, "t1": args.t1, "t2": args.t2, "sampling": sample_params(&args.sampling) }),
        Some(cfg.seed),
    );
    emit_json(manifest, "report", &report, args.sampling.output.as_deref())?;
    Ok(report.passed())
}

fn cmd_falsify(args: &FalsifyArgs) -> Outcome {
    let (target, name) = match args.target {
        Target::Ns => (BoundedMean::NeumanSandor, "ns"),
        Target::T => (BoundedMean::SecondSeiffert, "t"),
    };
    let found = falsify(target, args.side, args.p, args.t)?;
    let manifest = Manifest::new(
        "falsify",
        json!({ "p": args.p, "t": args.t, "side": args.side, "target": name }),
        None,
    );
    emit_json(manifest, "report", &found, args.output.as_deref())?;
    Ok(!found.is_found())
}

fn cmd_certify(args: &CertifyArgs) -> Outcome {
    let cert = certify_theorem_with_depth(args.p, args.delta, args.depth)?;
    let manifest = Manifest::new(
        "certify",
        json!({ "p": args.p, "delta": args.delta, "depth": args.depth }),
        None,
    );
    emit_json(manifest, "certificate", &cert, args.output.as_deref())?;
    Ok(cert.complete)
}

/// Increasing abscissae in three parts: log-spaced on `[1e-8, 0.1)`, evenly
/// spaced on `[0.1, 0.9)`, and `1 - x` log-spaced from `0.1` down to `1e-8`.
fn profile_grid(n: usize) -> Vec<f64> {
    let n_low = n / 3;
    let n_high = n / 3;
    let n_mid = n - n_low - n_high;
    let step = |i: usize, k: usize| i as f64 / k.max(1) as f64;
    let low = (0..n_low).map(|i| 10f64.powf(-8.0 + 7.0 * step(i, n_low)));
    let mid = (0..n_mid).map(|i| 0.1 + 0.8 * step(i, n_mid));
    let high = (0..n_high).map(|i| 1.0 - 10f64.powf(-1.0 - 7.0 * step(i + 1, n_high)));
    low.chain(mid).chain(high).collect()
}

fn cmd_profile(args: &ProfileArgs) -> Outcome {
    if args.n < 2 {
        return Err(usage("n must be at least 2"));
    }
    if args.t.is_empty() {
        return Err(usage("give at least one weight"));
    }
    let p = args.p;
    // the keywords use the exact offsets, so the sign of f is not at the
    // mercy of rounding t and squaring it back
    let curves = args
        .t
        .iter()
        .map(|s| match s.as_str() {
            "t1" => Ok((s.clone(), u_zero(p)?)),
            "t2" => Ok((s.clone(), u_high(p)?)),
            other => {
                let t: f64 = other
                    .parse()
                    .map_err(|_| usage(format!("bad weight `{other}`")))?;
                Ok((s.clone(), weight_to_u(t)?))
            }
        })
        .collect::<Result<Vec<_>, Failure>>()?;
    // validates p
    upper_weight_threshold(p)?;
    let mut header = vec!["x".to_string(), "m_M".to_string()];
    header.extend(curves.iter().map(|(name, _)| format!("q_t={name}")));
    header.extend(curves.iter().map(|(name, _)| format!("f_t={name}")));
    let rows = profile_grid(args.n)
        .into_iter()
        .map(|x| {
            let mut row = vec![
                x,
                normalized_profile(MeanKind::NeumanSandor, Deviation::new(x)?),
            ];
            row.extend(curves.iter().map(|&(_, u)| (p * (u * x * x).ln_1p()).exp()));
            for &(_, u) in &curves {
                row.push(f(x, u, p)?);
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>, means_sharp::Error>>()?;
    let manifest = Manifest::new("profile", json!({ "p": p, "t": args.t, "n": args.n }), None);
    emit_csv(manifest, &header, &rows, args.output.as_deref())?;
    Ok(true)
}

fn cmd_lemmas(args: &SampleArgs) -> Outcome {
    let cfg = args.config();
    let report = run_lemma_suite(&cfg)?;
    let manifest = Manifest::new("lemmas", sample_params(args), Some(cfg.seed));
    emit_json(manifest, "report", &report, args.output.as_deref())?;
    Ok(report.passed())
}

fn cmd_corpus(args: &SampleArgs) -> Outcome {
    let cfg = args.config();
    let report = check_seiffert_corpus(&cfg)?;
    let manifest = Manifest::new("corpus", sample_params(args), Some(cfg.seed));
    emit_json(manifest, "report", &report, args.output.as_deref())?;
    Ok(report.passed())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Eval(a) => cmd_eval(a),
        Command::Thresholds(a) => cmd_thresholds(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Falsify(a) => cmd_falsify(a),
        Command::Certify(a) => cmd_certify(a),
        Command::Profile(a) => cmd_profile(a),
        Command::Lemmas(a) => cmd_lemmas(a),
        Command::Corpus(a) => cmd_corpus(a),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Write(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
