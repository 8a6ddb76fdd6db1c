//! `chandisc` — bounds and exact oracles for channel discrimination.
//!
//! Subcommands: `bounds-symmetric`, `bounds-asymmetric`, `bounds-mary`,
//! `sc-states`, `oracle-nstar`, `verify-sandwich`, `sweep`.
//!
//! Exit codes: 0 success, 2 validation failure (the message names the
//! violated invariant), 3 capacity limit hit.

mod instance;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use chandisc_core::channel_divergence::InputOptConfig;
use chandisc_core::channels::{random_classical, Channel, ChannelJson};
use chandisc_core::complexity::{
    qc_asymmetric_bounds, qc_mary_bounds, qc_precise_bounds, qc_symmetric_bounds, sc_state_bounds,
    trivial_case, BoundReport, TrivialVerdict,
};
use chandisc_core::error::Error;
use chandisc_core::oracle::{
    exact_nstar_asymmetric, exact_nstar_product_channel, exact_nstar_states, OracleConfig,
};
use chandisc_core::rng::stream_rng;
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use instance::InstanceFile;
use report::{
    bounds_to_csv_rows, bounds_to_json, json_number, oracle_to_json, Envelope, CSV_HEADER,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Parser)]
#[command(
    name = "chandisc",
    version,
    about = "Channel-discrimination bounds and exact oracles"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,

    /// Instance JSON file (see docs/formats.md)
    #[arg(long, global = true)]
    instance: Option<PathBuf>,

    /// Output path; stdout when omitted
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Master seed; all randomness is derived from it
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Worker threads for instance-level parallelism
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Search cap for the oracles
    #[arg(long = "n-max", global = true)]
    n_max: Option<u32>,

    /// Override the instance file's epsilon
    #[arg(long = "eps", global = true)]
    eps: Option<f64>,

    /// Override the instance file's delta
    #[arg(long, global = true)]
    delta: Option<f64>,

    /// Override the instance file's prior p
    #[arg(long, global = true)]
    p: Option<f64>,

    /// Omit timestamp and timings so identical runs are byte-identical
    #[arg(long = "no-timestamp", global = true, default_value_t = false)]
    no_timestamp: bool,

    /// Instance count for verify-sandwich
    #[arg(long, global = true, default_value_t = 20)]
    count: usize,

    /// Restarts for the input-state optimizer
    #[arg(long, global = true, default_value_t = 32)]
    restarts: usize,

    /// Write the geometric-fidelity SDP for the instance's channel pair to
    /// this path (documented JSON form for external solvers)
    #[arg(long = "export-sdp", global = true)]
    export_sdp: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Symmetric binary query-complexity bounds for a channel pair
    BoundsSymmetric,
    /// Asymmetric binary query-complexity bounds for a channel pair
    BoundsAsymmetric,
    /// M-ary query-complexity bounds for a channel ensemble
    BoundsMary,
    /// Sample-complexity bounds for a state pair
    ScStates,
    /// Exact n* search (states when the instance has "states", channels otherwise)
    OracleNstar,
    /// Bounds-vs-oracle sandwich check on seeded random classical instances
    VerifySandwich,
    /// Bound values over an epsilon- or p-grid from the instance's "sweep"
    Sweep,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global();
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_capacity() {
                ExitCode::from(3)
            } else {
                ExitCode::from(2)
            }
        }
    }
}

struct Ctx {
    instance: InstanceFile,
    opt_cfg: InputOptConfig,
    oracle_cfg: OracleConfig,
    timings: Vec<(String, f64)>,
}

fn build_ctx(cli: &Cli) -> Result<Ctx, Error> {
    let mut instance = match &cli.instance {
        Some(path) => InstanceFile::load(path)?,
        None => InstanceFile::default(),
    };
    if cli.eps.is_some() {
        instance.epsilon = cli.eps;
    }
    if cli.delta.is_some() {
        instance.delta = cli.delta;
    }
    if cli.p.is_some() {
        instance.p = cli.p;
    }
    let opt_cfg = InputOptConfig {
        seed: cli.seed,
        restarts: cli.restarts,
        ..InputOptConfig::default()
    };
    let mut oracle_cfg = OracleConfig::default();
    if let Some(n_max) = cli.n_max {
        oracle_cfg.n_max_quantum = n_max;
        oracle_cfg.n_max_classical = n_max;
    }
    Ok(Ctx {
        instance,
        opt_cfg,
        oracle_cfg,
        timings: Vec::new(),
    })
}

fn run(cli: &Cli) -> Result<(), Error> {
    let mut ctx = build_ctx(cli)?;
    let (body, csv, command) = match cli.command {
        Cmd::BoundsSymmetric => {
            let (body, csv) = cmd_bounds_symmetric(cli, &mut ctx)?;
            (body, csv, "bounds-symmetric")
        }
        Cmd::BoundsAsymmetric => {
            let (body, csv) = cmd_bounds_asymmetric(cli, &mut ctx)?;
            (body, csv, "bounds-asymmetric")
        }
        Cmd::BoundsMary => {
            let (body, csv) = cmd_bounds_mary(cli, &mut ctx)?;
            (body, csv, "bounds-mary")
        }
        Cmd::ScStates => {
            let (body, csv) = cmd_sc_states(cli, &mut ctx)?;
            (body, csv, "sc-states")
        }
        Cmd::OracleNstar => {
            let (body, csv) = cmd_oracle_nstar(cli, &mut ctx)?;
            (body, csv, "oracle-nstar")
        }
        Cmd::VerifySandwich => {
            let (body, csv) = cmd_verify_sandwich(cli, &mut ctx)?;
            (body, csv, "verify-sandwich")
        }
        Cmd::Sweep => {
            let (body, csv) = cmd_sweep(cli, &mut ctx)?;
            (body, csv, "sweep")
        }
    };

    let output = match cli.format {
        Format::Json => {
            let envelope = Envelope {
                command: command.to_string(),
                seed: cli.seed,
                inputs: inputs_echo(&ctx.instance),
                body,
                timings_ms: ctx.timings,
                with_timestamp: !cli.no_timestamp,
            };
            format!("{:#}\n", envelope.to_json())
        }
        Format::Csv => {
            let mut text = String::from(CSV_HEADER);
            text.push('\n');
            for row in csv {
                text.push_str(&row);
                text.push('\n');
            }
            text
        }
    };
    match &cli.out {
        Some(path) => std::fs::write(path, output)
            .map_err(|e| Error::Validation(format!("cannot write {path:?}: {e}")))?,
        None => print!("{output}"),
    }
    Ok(())
}

fn inputs_echo(instance: &InstanceFile) -> Value {
    serde_json::to_value(instance).unwrap_or(Value::Null)
}

fn timed<T>(ctx: &mut Ctx, stage: &str, f: impl FnOnce() -> T) -> T {
    let start = Instant::now();
    let out = f();
    ctx.timings
        .push((stage.to_string(), start.elapsed().as_secs_f64() * 1e3));
    out
}

fn instance_id(instance: &InstanceFile, fallback: &str) -> String {
    instance
        .name
        .clone()
        .unwrap_or_else(|| fallback.to_string())
}

/// Symmetric bounds; merges the precise (ε < p/64) entries when applicable.
fn symmetric_report(
    p: f64,
    n: &Channel,
    m: &Channel,
    eps: f64,
    opt_cfg: &InputOptConfig,
) -> Result<BoundReport, Error> {
    let mut report = qc_symmetric_bounds(p, n, m, eps, opt_cfg)?;
    if p <= 0.5 && eps < p / 64.0 {
        let precise = qc_precise_bounds(p, n, m, eps, opt_cfg)?;
        let mut entries = report.entries.clone();
        entries.extend(precise.entries.clone());
        let mut divergences = report.divergence_values.clone();
        for (k, v) in precise.divergence_values {
            divergences.entry(k).or_insert(v);
        }
        report = merge_report(entries, divergences);
    }
    Ok(report)
}

fn merge_report(
    entries: Vec<chandisc_core::complexity::BoundEntry>,
    divergences: std::collections::BTreeMap<String, f64>,
) -> BoundReport {
    use chandisc_core::complexity::BoundDirection;
    let best_lower = entries
        .iter()
        .filter(|e| e.direction == BoundDirection::Lower && e.applicable && e.certified)
        .map(|e| e.value)
        .fold(0.0_f64, f64::max);
    let best_upper = entries
        .iter()
        .filter(|e| e.direction == BoundDirection::Upper && e.applicable && e.certified)
        .map(|e| e.value)
        .fold(f64::INFINITY, f64::min);
    BoundReport {
        entries,
        best_lower,
        best_upper,
        divergence_values: divergences,
    }
}

fn cmd_bounds_symmetric(cli: &Cli, ctx: &mut Ctx) -> Result<(Value, Vec<String>), Error> {
    let (n, m) = ctx.instance.channel_pair()?;
    if let Some(path) = &cli.export_sdp {
        let program =
            chandisc_core::sdp::export_fidelity_sdp_json(&n.to_quantum(), &m.to_quantum());
        std::fs::write(path, format!("{program:#}\n"))
            .map_err(|e| Error::Validation(format!("cannot write {path:?}: {e}")))?;
    }
    let p = ctx.instance.require_p()?;
    let eps = ctx.instance.require_epsilon()?;
    let opt_cfg = ctx.opt_cfg.clone();
    let verdict = trivial_case(p, eps, &n, &m, &[])?;
    if verdict != TrivialVerdict::NonTrivial {
        let body = json!({"trivial": format!("{verdict:?}")});
        return Ok((body, vec![]));
    }
    let report = timed(ctx, "bounds", || symmetric_report(p, &n, &m, eps, &opt_cfg))?;
    let id = instance_id(&ctx.instance, "instance-0");
    let csv = bounds_to_csv_rows(&id, &report);
    Ok((bounds_to_json(&report), csv))
}

fn cmd_bounds_asymmetric(_cli: &Cli, ctx: &mut Ctx) -> Result<(Value, Vec<String>), Error> {
    let (n, m) = ctx.instance.channel_pair()?;
    let eps = ctx.instance.require_epsilon()?;
    let delta = ctx.instance.require_delta()?;
    let opt_cfg = ctx.opt_cfg.clone();
    let report = timed(ctx, "bounds", || {
        qc_asymmetric_bounds(&n, &m, eps, delta, &opt_cfg)
    })?;
    let id = instance_id(&ctx.instance, "instance-0");
    let csv = bounds_to_csv_rows(&id, &report);
    Ok((bounds_to_json(&report), csv))
}

fn cmd_bounds_mary(_cli: &Cli, ctx: &mut Ctx) -> Result<(Value, Vec<String>), Error> {
    let channels = ctx.instance.channels()?;
    let priors = ctx
        .instance
        .priors
        .clone()
        .ok_or_else(|| Error::Validation("M-ary bounds need \"priors\"".into()))?;
    if priors.len() != channels.len() {
        return Err(Error::Validation(format!(
            "got {} priors for {} channels",
            priors.len(),
            channels.len()
        )));
    }
    let eps = ctx.instance.require_epsilon()?;
    let ensemble: Vec<(f64, Channel)> = priors.into_iter().zip(channels).collect();
    let opt_cfg = ctx.opt_cfg.clone();
    let report = timed(ctx, "bounds", || qc_mary_bounds(&ensemble, eps, &opt_cfg))?;
    let id = instance_id(&ctx.instance, "instance-0");
    let csv = bounds_to_csv_rows(&id, &report);
    Ok((bounds_to_json(&report), csv))
}

fn cmd_sc_states(_cli: &Cli, ctx: &mut Ctx) -> Result<(Value, Vec<String>), Error> {
    let (rho, sigma) = ctx.instance.state_pair()?;
    let p = ctx.instance.require_p()?;
    let eps = ctx.instance.require_epsilon()?;
    let report = timed(ctx, "bounds", || sc_state_bounds(p, &rho, &sigma, eps))?;
    let id = instance_id(&ctx.instance, "instance-0");
    let csv = bounds_to_csv_rows(&id, &report);
    Ok((bounds_to_json(&report), csv))
}

fn cmd_oracle_nstar(_cli: &Cli, ctx: &mut Ctx) -> Result<(Value, Vec<String>), Error> {
    let eps = ctx.instance.require_epsilon()?;
    let oracle_cfg = ctx.oracle_cfg.clone();
    let result = if ctx.instance.states.is_some() {
        let (rho, sigma) = ctx.instance.state_pair()?;
        match ctx.instance.delta {
            Some(delta) => timed(ctx, "oracle", || {
                exact_nstar_asymmetric(&rho, &sigma, eps, delta, &oracle_cfg)
            })?,
            None => {
                let p = ctx.instance.require_p()?;
                timed(ctx, "oracle", || {
                    exact_nstar_states(p, &rho, &sigma, eps, &oracle_cfg)
                })?
            }
        }
    } else {
        let (n, m) = ctx.instance.channel_pair()?;
        let p = ctx.instance.require_p()?;
        timed(ctx, "oracle", || {
            exact_nstar_product_channel(p, &n, &m, eps, &[], &oracle_cfg)
        })?
    };
    let body = oracle_to_json(&result);
    let id = instance_id(&ctx.instance, "instance-0");
    let n_str = result
        .n_star
        .map(|n| n.to_string())
        .unwrap_or_else(|| "inf".into());
    let csv = vec![format!("{id},oracle/n_star,{n_str},lower,oracle,true,")];
    Ok((body, csv))
}

/// Random binary classical channel pair with a minimum separation so the
/// exact search stays desk-scale; rows are redrawn until
/// `-ln F_H(N, M) >= min_rate`.
fn separated_classical_pair(
    seed: u64,
    stream: u64,
    min_rate: f64,
) -> (
    chandisc_core::channels::ClassicalChannel,
    chandisc_core::channels::ClassicalChannel,
) {
    for attempt in 0..64 {
        let mut rng = stream_rng(seed, (stream << 8) | attempt);
        let n = random_classical(2, 2, &mut rng);
        let m = random_classical(2, 2, &mut rng);
        let rate = (0..2)
            .map(|x| {
                let bc: f64 = n
                    .row(x)
                    .iter()
                    .zip(m.row(x))
                    .map(|(a, b)| (a * b).sqrt())
                    .sum();
                -(bc * bc).ln()
            })
            .fold(0.0_f64, f64::max);
        if rate >= min_rate {
            return (n, m);
        }
    }
    // last resort: a fixed well-separated pair
    (
        chandisc_core::channels::ClassicalChannel::new(vec![vec![0.9, 0.1], vec![0.8, 0.2]])
            .unwrap(),
        chandisc_core::channels::ClassicalChannel::new(vec![vec![0.6, 0.4], vec![0.3, 0.7]])
            .unwrap(),
    )
}

fn cmd_verify_sandwich(cli: &Cli, ctx: &mut Ctx) -> Result<(Value, Vec<String>), Error> {
    let p = ctx.instance.p.unwrap_or(0.5);
    let eps = ctx.instance.epsilon.unwrap_or(1e-3);
    let count = cli.count;
    if count == 0 {
        return Err(Error::Validation(
            "verify-sandwich needs --count >= 1".into(),
        ));
    }
    let opt_cfg = ctx.opt_cfg.clone();
    let seed = cli.seed;
    let rows: Result<Vec<Value>, Error> = timed(ctx, "verify", || {
        use rayon::prelude::*;
        (0..count as u64)
            .into_par_iter()
            .map(|i| {
                let (nc, mc) = separated_classical_pair(seed, i, 0.02);
                let n = Channel::Classical(nc);
                let m = Channel::Classical(mc);
                let report = symmetric_report(p, &n, &m, eps, &opt_cfg)?;
                let upper = report.best_upper;
                let oracle_cfg = OracleConfig {
                    n_max_classical: (upper.min(1e6) as u32).saturating_add(2),
                    ..OracleConfig::default()
                };
                let oracle = exact_nstar_product_channel(p, &n, &m, eps, &[], &oracle_cfg)?;
                let n_star = oracle.n_star;
                let ok = match n_star {
                    Some(ns) => report.best_lower <= ns as f64 && (ns as f64) <= report.best_upper,
                    None => false,
                };
                Ok(json!({
                    "instance_id": format!("random-{i}"),
                    "best_lower": json_number(report.best_lower),
                    "n_star": n_star,
                    "best_upper": json_number(report.best_upper),
                    "sandwich_ok": ok,
                }))
            })
            .collect()
    });
    let rows = rows?;
    let csv: Vec<String> = rows
        .iter()
        .map(|r| {
            format!(
                "{},sandwich_ok,{},check,oracle-vs-bounds,true,lower={} upper={} n_star={}",
                r["instance_id"].as_str().unwrap_or(""),
                r["sandwich_ok"],
                r["best_lower"],
                r["best_upper"],
                r["n_star"],
            )
        })
        .collect();
    Ok((json!({"instances": rows}), csv))
}

fn cmd_sweep(_cli: &Cli, ctx: &mut Ctx) -> Result<(Value, Vec<String>), Error> {
    let sweep = ctx.instance.sweep.clone().ok_or_else(|| {
        Error::Validation("sweep needs a \"sweep\" section in the instance".into())
    })?;
    if sweep.values.len() < 2 {
        return Err(Error::Validation(format!(
            "sweep grid needs at least 2 points, found {}",
            sweep.values.len()
        )));
    }
    let (n, m) = ctx.instance.channel_pair()?;
    let opt_cfg = ctx.opt_cfg.clone();
    let base_p = ctx.instance.p;
    let base_eps = ctx.instance.epsilon;
    let id = instance_id(&ctx.instance, "instance-0");

    let mut rows_json = Vec::new();
    let mut rows_csv = Vec::new();
    let points: Result<Vec<(f64, f64, f64, BoundReport)>, Error> = timed(ctx, "sweep", || {
        sweep
            .values
            .iter()
            .map(|&v| {
                let (p, eps) = match sweep.variable.as_str() {
                    "epsilon" => (
                        base_p.ok_or_else(|| {
                            Error::Validation("epsilon sweep needs a fixed \"p\"".into())
                        })?,
                        v,
                    ),
                    "p" => (
                        v,
                        base_eps
                            .map(Ok)
                            .unwrap_or_else(|| Ok::<f64, Error>(v / 100.0))?,
                    ),
                    other => {
                        return Err(Error::Validation(format!(
                            "sweep variable must be \"epsilon\" or \"p\", got {other:?}"
                        )))
                    }
                };
                let report = symmetric_report(p, &n, &m, eps, &opt_cfg)?;
                Ok((v, p, eps, report))
            })
            .collect()
    });
    for (v, p, eps, report) in points? {
        let lambda = if p <= 0.5 && eps < p {
            chandisc_core::complexity::lambda_star(p, eps).ok()
        } else {
            None
        };
        rows_json.push(json!({
            "grid_value": v,
            "p": p,
            "epsilon": eps,
            "lambda_star": lambda,
            "report": bounds_to_json(&report),
        }));
        for e in &report.entries {
            let value = if e.value.is_finite() {
                format!("{}", e.value)
            } else {
                "inf".into()
            };
            rows_csv.push(format!(
                "{id}@{v},{},{},{},{},{},{}",
                e.name,
                value,
                e.direction.name(),
                e.method,
                e.applicable,
                e.reason.as_deref().unwrap_or("")
            ));
        }
    }
    Ok((
        json!({"variable": sweep.variable, "points": rows_json}),
        rows_csv,
    ))
}

/// Build a channel-spec JSON value (used by tests and docs generation).
#[allow(dead_code)]
fn channel_to_json(ch: &Channel) -> Value {
    serde_json::to_value(ChannelJson::from_channel(ch)).unwrap_or(Value::Null)
}
