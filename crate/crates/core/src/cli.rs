//! `qpolar` command-line front end.
//!
//! Exit status is 0 on success, 1 on runtime failure and 2 on usage errors.
//! Every JSON document carries a `config` object with the resolved flags;
//! output destinations and `--threads` are not part of it, so files are
//! byte-identical across reruns and worker counts.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::channels::ChannelSpec;
use crate::construction::{
    construct, CodeSpec, FrozenPolicy, MethodRequest, DEFAULT_EPSILON, DEFAULT_MC_TRIALS,
};
use crate::error::{Error, Result};
use crate::qsim::{SimReport, Simulator};
use crate::threshold::{solve_coherent_zero, solve_threshold, Family};
use crate::transform::log2_len;

#[derive(Debug, Parser)]
#[command(name = "qpolar", version, about = "Quantum polar code construction and simulation")]
pub struct Cli {
    /// Worker threads (default: all cores). Does not affect results.
    #[arg(long, global = true, value_parser = parse_positive_usize)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a code and write it as JSON.
    Construct(ConstructArgs),
    /// Simulate a code written by `construct`.
    Simulate(SimulateArgs),
    /// Solve for the assistance threshold and coherent-information zero.
    Threshold(ThresholdArgs),
    /// Construct and simulate over a grid of channel parameters.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FrozenArg {
    Zero,
    Random,
}

#[derive(Debug, clap::Args)]
pub struct ConstructArgs {
    #[arg(long)]
    pub channel: ChannelSpec,
    #[arg(long, default_value_t = 1024, value_parser = parse_block_len)]
    pub n: usize,
    #[arg(long, default_value_t = DEFAULT_EPSILON, value_parser = parse_epsilon)]
    pub epsilon: f64,
    /// auto, exact-bec, monte-carlo or fprime-bound.
    #[arg(long, default_value = "auto")]
    pub method: MethodRequest,
    /// Monte Carlo trials per reliability profile.
    #[arg(long, default_value_t = DEFAULT_MC_TRIALS, value_parser = parse_trials)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = FrozenArg::Zero)]
    pub frozen: FrozenArg,
    /// Code JSON destination; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
pub struct SimulateArgs {
    /// Code JSON produced by `construct`.
    #[arg(long)]
    pub code: PathBuf,
    /// Simulate on this channel instead of the design channel.
    #[arg(long)]
    pub channel: Option<ChannelSpec>,
    #[arg(long, default_value_t = 10_000, value_parser = parse_trials)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Report JSON destination; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write the report as a one-row CSV table.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
pub struct ThresholdArgs {
    /// independent-equal or depolarizing.
    #[arg(long)]
    pub family: Family,
    #[arg(long, default_value_t = 1e-9, value_parser = parse_tol)]
    pub tol: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepFamily {
    Depolarizing,
    IndependentEqual,
    Erasure,
}

impl SweepFamily {
    fn channel(self, t: f64) -> ChannelSpec {
        match self {
            Self::Depolarizing => ChannelSpec::Depolarizing { q: t },
            Self::IndependentEqual => ChannelSpec::Xz { du: t, dv: t },
            Self::Erasure => ChannelSpec::Erasure { p: t },
        }
    }
}

#[derive(Debug, clap::Args)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub family: SweepFamily,
    /// Comma-separated channel parameters.
    #[arg(long, value_delimiter = ',', required = true, value_parser = parse_probability)]
    pub points: Vec<f64>,
    /// Block lengths; repeat or separate with commas.
    #[arg(long, value_delimiter = ',', default_value = "1024", value_parser = parse_block_len)]
    pub n: Vec<usize>,
    #[arg(long, default_value_t = DEFAULT_EPSILON, value_parser = parse_epsilon)]
    pub epsilon: f64,
    #[arg(long, default_value = "auto")]
    pub method: MethodRequest,
    /// Monte Carlo trials per reliability profile.
    #[arg(long, default_value_t = DEFAULT_MC_TRIALS, value_parser = parse_trials)]
    pub construct_trials: u64,
    /// Simulated blocks per point.
    #[arg(long, default_value_t = 10_000, value_parser = parse_trials)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// CSV destination; standard output when absent.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Full JSON reports.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_block_len(s: &str) -> std::result::Result<usize, String> {
    let n: usize = s.parse().map_err(|e| format!("{e}"))?;
    log2_len(n).map_err(|e| e.to_string())?;
    Ok(n)
}

fn parse_epsilon(s: &str) -> std::result::Result<f64, String> {
    let e: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if e > 0.0 && e < 1.0 {
        Ok(e)
    } else {
        Err(format!("epsilon must lie in (0, 1), got {e}"))
    }
}

fn parse_probability(s: &str) -> std::result::Result<f64, String> {
    let p: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if (0.0..=1.0).contains(&p) {
        Ok(p)
    } else {
        Err(format!("parameter must lie in [0, 1], got {p}"))
    }
}

fn parse_tol(s: &str) -> std::result::Result<f64, String> {
    let t: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if t > 0.0 && t.is_finite() {
        Ok(t)
    } else {
        Err(format!("tolerance must be positive, got {t}"))
    }
}

fn parse_trials(s: &str) -> std::result::Result<u64, String> {
    match s.parse::<u64>() {
        Ok(0) => Err("at least one trial is required".into()),
        Ok(t) => Ok(t),
        Err(e) => Err(e.to_string()),
    }
}

fn parse_positive_usize(s: &str) -> std::result::Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be at least 1".into()),
        Ok(t) => Ok(t),
        Err(e) => Err(e.to_string()),
    }
}

fn method_name(m: MethodRequest) -> &'static str {
    match m {
        MethodRequest::Auto => "auto",
        MethodRequest::ExactBec => "exact-bec",
        MethodRequest::MonteCarlo => "monte-carlo",
        MethodRequest::FprimeBound => "fprime-bound",
    }
}

fn frozen_policy(arg: FrozenArg, seed: u64) -> FrozenPolicy {
    match arg {
        FrozenArg::Zero => FrozenPolicy::AllZero,
        FrozenArg::Random => FrozenPolicy::Random { seed },
    }
}

fn to_json<T: Serialize>(v: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn with_config(mut doc: Value, config: Value) -> Value {
    if let Value::Object(map) = &mut doc {
        map.insert("config".into(), config);
    }
    doc
}

const CSV_HEADER: [&str; 10] = [
    "n",
    "channel_param",
    "net_rate",
    "ent_rate",
    "amp_err",
    "phase_err",
    "block_err",
    "ci_halfwidth",
    "trials",
    "seed",
];

fn csv_table(reports: &[SimReport]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER)?;
    for r in reports {
        w.write_record([
            r.n.to_string(),
            r.channel.parameter().to_string(),
            r.net_rate.to_string(),
            r.entanglement_rate.to_string(),
            r.amp_err.rate.to_string(),
            r.phase_err.rate.to_string(),
            r.block_err.rate.to_string(),
            r.block_err.half_width.to_string(),
            r.trials.to_string(),
            r.seed.to_string(),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn cmd_construct(a: &ConstructArgs) -> Result<()> {
    let code = construct(
        &a.channel,
        a.n,
        a.epsilon,
        a.method,
        a.trials,
        a.seed,
        frozen_policy(a.frozen, a.seed),
    )?;
    let config = json!({
        "subcommand": "construct",
        "channel": a.channel.to_string(),
        "n": a.n,
        "epsilon": a.epsilon,
        "method": method_name(a.method),
        "trials": a.trials,
        "seed": a.seed,
        "frozen": a.frozen,
    });
    let doc = with_config(serde_json::to_value(&code)?, config);
    let p = code.partition();
    let summary = format!(
        "n={} |Q|={} |A|={} |P|={} |E|={} net_rate={:.6} coherent_information={:.6}\n",
        code.n(),
        p.q.len(),
        p.a.len(),
        p.p.len(),
        p.e.len(),
        code.net_rate(),
        code.noise().coherent_information(),
    );
    match &a.out {
        Some(path) => {
            emit(Some(path), &to_json(&doc)?)?;
            print!("{summary}");
        }
        None => {
            eprint!("{summary}");
            emit(None, &to_json(&doc)?)?;
        }
    }
    Ok(())
}

fn read_code(path: &Path) -> Result<CodeSpec> {
    let text = fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

fn cmd_simulate(a: &SimulateArgs) -> Result<()> {
    let code = read_code(&a.code)?;
    let sim = Simulator::new(&code, a.channel.as_ref())?;
    let report = sim.simulate(a.trials, a.seed)?;
    let config = json!({
        "subcommand": "simulate",
        "code": a.code.display().to_string(),
        "channel": a.channel.as_ref().unwrap_or(code.channel()).to_string(),
        "n": code.n(),
        "epsilon": code.epsilon(),
        "trials": a.trials,
        "seed": a.seed,
    });
    let doc = with_config(serde_json::to_value(&report)?, config);
    if let Some(path) = &a.csv {
        fs::write(path, csv_table(std::slice::from_ref(&report))?)?;
    }
    emit(a.out.as_deref(), &to_json(&doc)?)
}

fn cmd_threshold(a: &ThresholdArgs) -> Result<()> {
    let doc = json!({
        "family": a.family.name(),
        "assistance_threshold": solve_threshold(a.family, a.tol)?,
        "coherent_zero": solve_coherent_zero(a.family, a.tol)?,
        "tol": a.tol,
        "config": {
            "subcommand": "threshold",
            "family": a.family.name(),
            "tol": a.tol,
        },
    });
    emit(a.out.as_deref(), &to_json(&doc)?)
}

fn cmd_sweep(a: &SweepArgs) -> Result<()> {
    let mut reports = Vec::new();
    for &n in &a.n {
        for &t in &a.points {
            let channel = a.family.channel(t);
            let code = construct(
                &channel,
                n,
                a.epsilon,
                a.method,
                a.construct_trials,
                a.seed,
                FrozenPolicy::AllZero,
            )?;
            reports.push(Simulator::new(&code, None)?.simulate(a.trials, a.seed)?);
        }
    }
    let table = csv_table(&reports)?;
    emit(a.csv.as_deref(), &table)?;
    if let Some(path) = &a.out {
        let doc = json!({
            "reports": reports,
            "config": {
                "subcommand": "sweep",
                "family": a.family,
                "points": a.points,
                "n": a.n,
                "epsilon": a.epsilon,
                "method": method_name(a.method),
                "construct_trials": a.construct_trials,
                "trials": a.trials,
                "seed": a.seed,
            },
        });
        fs::write(path, to_json(&doc)?)?;
    }
    Ok(())
}

/// Runs a parsed command.
pub fn run(cli: &Cli) -> Result<()> {
    let go = || match &cli.command {
        Command::Construct(a) => cmd_construct(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Threshold(a) => cmd_threshold(a),
        Command::Sweep(a) => cmd_sweep(a),
    };
    match cli.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::InvalidArgument(e.to_string()))?
            .install(go),
        None => go(),
    }
}

/// Parses `args` and runs; returns the process exit status.
pub fn main_with_args<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(main_with_args(["qpolar", "construct", "--n", "16"]), 2);
        assert_eq!(main_with_args(["qpolar", "construct", "--channel", "bogus:q=1"]), 2);
        assert_eq!(main_with_args(["qpolar", "construct", "--channel", "depolarizing:q=0.1", "--n", "12"]), 2);
        assert_eq!(main_with_args(["qpolar", "threshold", "--family", "nope"]), 2);
        assert_eq!(main_with_args(["qpolar", "simulate", "--code", "x.json", "--trials", "0"]), 2);
    }

    #[test]
    fn missing_code_file_is_runtime_failure() {
        assert_eq!(main_with_args(["qpolar", "simulate", "--code", "/nonexistent/code.json"]), 1);
    }

    #[test]
    fn csv_has_expected_columns() {
        let table = csv_table(&[]).unwrap();
        assert_eq!(
            table.trim(),
            "n,channel_param,net_rate,ent_rate,amp_err,phase_err,block_err,ci_halfwidth,trials,seed"
        );
    }
}
