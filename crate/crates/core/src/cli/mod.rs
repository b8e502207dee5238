//! Command-line front end. Every run is described by an [`ExperimentConfig`]
//! that is echoed into the manifest, so `rerun` reproduces the CSV exactly.

pub mod output;

use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::env::{classify_regime, AveragedVerdict, EnvLaw, RegimeReport};
use crate::error::{Error, Result};
use crate::exact::{self, Side};
use crate::ladder::{self, StepLaw, SupMethod};
use crate::mc::{self, McConfig, ReturnMode, SamplerMode};
use crate::stats::default_workers;
use output::{render_csv, write_outputs, Manifest, Row};

#[derive(Debug, Parser)]
#[command(
    name = "rwre",
    version,
    about = "Random walks in random environments: exact formulas and simulation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Master seed. Drawn at random and recorded in the output when absent.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Worker threads.
    #[arg(long, global = true, env = "RWRE_WORKERS")]
    pub workers: Option<usize>,

    /// Write PREFIX.csv and PREFIX.json instead of printing the CSV.
    #[arg(long, global = true, value_name = "PREFIX")]
    pub out: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum Command {
    /// Regime of a law: direction, speed, strong transience, kappa.
    Classify(ClassifyArgs),
    /// Exact quenched quantities for the environment keyed by the seed.
    Exact(ExactArgs),
    /// Walk-level simulation: speed, first returns, conditional return time.
    Simulate(SimulateArgs),
    /// Samples of the hitting time of 0 from 1 given that it is finite.
    Conditioned(ConditionedArgs),
    /// Tilted random-walk estimators for a step law.
    Ladder(LadderArgs),
    /// Diagnostics for an infinite averaged conditional return time.
    Diverge(DivergeArgs),
    /// Repeat the run recorded in a manifest.
    Rerun(RerunArgs),
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct ClassifyArgs {
    /// Environment law: `constant:p`, `discrete:w@p,...` or `beta:a,b`.
    #[arg(long)]
    pub law: EnvLaw,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SideArg {
    Right,
    Left,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct SeriesArgs {
    /// Relative truncation tolerance of series.
    #[arg(long, default_value_t = 1e-14)]
    pub tol: f64,
    /// Term budget of series and site budget of windows.
    #[arg(long, default_value_t = 1 << 20)]
    pub max_terms: usize,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct ExactArgs {
    /// Environment law: `constant:p`, `discrete:w@p,...` or `beta:a,b`.
    #[arg(long)]
    pub law: EnvLaw,
    /// First-step decomposition of the return time to 0.
    #[arg(long)]
    pub return_decomposition: bool,
    /// Expected hitting time of a neighbor of this site.
    #[arg(long, allow_hyphen_values = true)]
    pub expected_hit: Option<i64>,
    #[arg(long, value_enum, default_value_t = SideArg::Right)]
    pub side: SideArg,
    /// Tail sum `R_i` at this site.
    #[arg(long, allow_hyphen_values = true)]
    pub r_tail: Option<i64>,
    /// Expected hitting time of 0 from 1 given that it is finite.
    #[arg(long)]
    pub conditioned_return: bool,
    /// Limiting speed and averaged `E[T_1]`.
    #[arg(long)]
    pub speed: bool,
    #[command(flatten)]
    pub series: SeriesArgs,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct McArgs {
    /// Step budget per walk.
    #[arg(long, default_value_t = 1 << 32)]
    pub cap: u64,
    /// Certified bound on returning after reaching the right window edge.
    #[arg(long, default_value_t = 1e-12)]
    pub escape_eps: f64,
    #[command(flatten)]
    pub series: SeriesArgs,
}

impl McArgs {
    fn config(&self, workers: usize) -> McConfig {
        McConfig {
            cap: self.cap,
            escape_eps: self.escape_eps,
            tol: self.series.tol,
            horizon: self.series.max_terms,
            workers,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReturnModeArg {
    Quenched,
    Averaged,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct SimulateArgs {
    /// Environment law: `constant:p`, `discrete:w@p,...` or `beta:a,b`.
    #[arg(long)]
    pub law: EnvLaw,
    /// Averaged speed `X_horizon / horizon`.
    #[arg(long)]
    pub speed: bool,
    #[arg(long, default_value_t = 100_000)]
    pub horizon: u64,
    #[arg(long, default_value_t = 100)]
    pub reps: usize,
    /// Raw first-return attempts with certified escape.
    #[arg(long)]
    pub first_return: bool,
    /// Conditional expected return time.
    #[arg(long, value_enum)]
    pub return_conditional: Option<ReturnModeArg>,
    /// Environment seed for quenched runs; defaults to the master seed.
    #[arg(long)]
    pub env_seed: Option<u64>,
    /// Walks for first returns.
    #[arg(short = 'n', long = "n", default_value_t = 10_000)]
    pub n: usize,
    #[arg(long, default_value_t = 1000)]
    pub n_env: usize,
    /// Walk-level draws checking a quenched conditional return time.
    #[arg(long, default_value_t = 0)]
    pub n_walk: usize,
    #[command(flatten)]
    pub mc: McArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplerArg {
    HTransform,
    Rejection,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct ConditionedArgs {
    /// Environment law: `constant:p`, `discrete:w@p,...` or `beta:a,b`.
    #[arg(long)]
    pub law: EnvLaw,
    /// Environment seed; defaults to the master seed.
    #[arg(long)]
    pub env_seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = SamplerArg::HTransform)]
    pub mode: SamplerArg,
    #[arg(short = 'n', long = "n", default_value_t = 10_000)]
    pub n: usize,
    /// Emit one row per sample.
    #[arg(long)]
    pub samples: bool,
    #[command(flatten)]
    pub mc: McArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodArg {
    Importance,
    Naive,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct LadderArgs {
    /// Step law: `lattice:w@v,...`, `real:w@v,...` or `logrho:<law>`.
    #[arg(long, allow_hyphen_values = true)]
    pub step: StepLaw,
    /// Tilt root `gamma`.
    #[arg(long)]
    pub gamma: bool,
    /// Levels `t` for `P(sup S_n >= t)`.
    #[arg(long, value_delimiter = ',')]
    pub sup_tail: Vec<f64>,
    #[arg(long, value_enum, default_value_t = MethodArg::Importance)]
    pub method: MethodArg,
    /// Paths per estimate.
    #[arg(short = 'n', long = "n", default_value_t = 100_000)]
    pub n: usize,
    /// Scaled level-crossing probabilities for lattice levels `k_min..=k_max`.
    #[arg(long)]
    pub overshoot: bool,
    #[arg(long, default_value_t = 10)]
    pub k_min: i64,
    #[arg(long, default_value_t = 20)]
    pub k_max: i64,
    /// Levels `t` for `phi(t)`.
    #[arg(long, value_delimiter = ',')]
    pub phi: Vec<f64>,
    /// Censoring level of the naive estimator.
    #[arg(long, default_value_t = ladder::DEFAULT_CENSOR_EPS)]
    pub censor_eps: f64,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct DivergeArgs {
    /// Environment law: `constant:p`, `discrete:w@p,...` or `beta:a,b`.
    #[arg(long)]
    pub law: EnvLaw,
    /// Environment counts at which the running estimate is reported.
    #[arg(long, value_delimiter = ',', default_values_t = [1000usize, 10_000, 100_000])]
    pub schedule: Vec<usize>,
    #[command(flatten)]
    pub mc: McArgs,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct RerunArgs {
    /// Manifest written by an earlier run.
    pub manifest: PathBuf,
}

/// A fully resolved run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub workers: usize,
    pub out: Option<String>,
    pub command: Command,
}

impl ExperimentConfig {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Config(format!("bad config: {e}")))
    }
}

/// Rows plus an optional structured result for the manifest and stdout.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunOutput {
    pub rows: Vec<Row>,
    pub result: Option<serde_json::Value>,
}

fn to_value<T: Serialize>(x: &T) -> Option<serde_json::Value> {
    serde_json::to_value(x).ok()
}

fn side(s: SideArg) -> Side {
    match s {
        SideArg::Right => Side::Right,
        SideArg::Left => Side::Left,
    }
}

/// Executes a resolved configuration.
pub fn execute(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let seed = cfg.seed;
    match &cfg.command {
        Command::Classify(a) => {
            let report = classify_regime(&a.law)?;
            let mut rows = vec![
                Row::exact("mean_log_rho", "", report.mean_log_rho, seed),
                Row::exact("mean_rho", "", report.mean_rho, seed),
                Row::exact("mean_inv_rho", "", report.mean_inv_rho, seed),
                Row::exact("speed", "", report.speed, seed),
            ];
            if let Some(k) = report.kappa {
                rows.push(Row::exact("kappa", "", k, seed));
            }
            Ok(RunOutput {
                rows,
                result: to_value(&report),
            })
        }
        Command::Exact(a) => exact_rows(a, seed),
        Command::Simulate(a) => simulate_rows(a, seed, cfg.workers),
        Command::Conditioned(a) => {
            let env_seed = a.env_seed.unwrap_or(seed);
            let mode = match a.mode {
                SamplerArg::HTransform => SamplerMode::HTransform,
                SamplerArg::Rejection => SamplerMode::Rejection,
            };
            let s = mc::conditioned_sampler(
                &a.law,
                env_seed,
                mode,
                a.n,
                seed,
                &a.mc.config(cfg.workers),
            )?;
            let param = format!("env_seed={env_seed}");
            let mut mean = Row::estimate("t0_mean", param.clone(), &s.mean(seed));
            if s.censored > 0 {
                mean = mean.unconverged();
            }
            let mut rows = vec![
                mean,
                Row::exact("censored", param.clone(), s.censored as f64, seed),
                Row::exact("escaped", param, s.escaped as f64, seed),
            ];
            if a.samples {
                rows.extend(
                    s.times
                        .iter()
                        .enumerate()
                        .map(|(i, &t)| Row::exact("t0", format!("i={i}"), t as f64, seed)),
                );
            }
            Ok(RunOutput { rows, result: None })
        }
        Command::Ladder(a) => ladder_rows(a, seed, cfg.workers),
        Command::Diverge(a) => {
            let r =
                mc::divergence_diagnostic(&a.law, &a.schedule, seed, &a.mc.config(cfg.workers))?;
            let mut rows: Vec<Row> = r
                .running
                .iter()
                .map(|p| Row {
                    quantity: "running_return_given_return".into(),
                    param: format!("n={}", p.n),
                    value: p.value,
                    std_error: p.std_error,
                    error_budget: 0.0,
                    n: p.n as u64,
                    seed,
                    converged: true,
                })
                .collect();
            rows.push(Row::exact(
                "hill_index",
                format!("k={}", r.hill_k),
                r.hill_index,
                seed,
            ));
            for p in &r.tail_grid {
                rows.push(Row::exact("r1_tail", format!("t={}", p.t), p.tail, seed));
                rows.push(Row::exact(
                    "r1_tail_scaled",
                    format!("t={}", p.t),
                    p.scaled,
                    seed,
                ));
            }
            rows.push(Row::exact("r1_tail_floor", "", r.tail_floor, seed));
            rows.push(Row::exact("r1_tail_slope", "", r.tail_slope, seed));
            if let Some(k) = r.kappa {
                rows.push(Row::exact("kappa", "", k, seed));
            }
            rows.push(Row::exact("failures", "", r.failures as f64, seed));
            Ok(RunOutput {
                rows,
                result: to_value(&r),
            })
        }
        Command::Rerun(_) => Err(Error::Config("a manifest cannot describe a rerun".into())),
    }
}

fn exact_rows(a: &ExactArgs, seed: u64) -> Result<RunOutput> {
    let (tol, horizon) = (a.series.tol, a.series.max_terms);
    let mut rows = Vec::new();
    if a.return_decomposition {
        let d = exact::return_decomposition(&a.law, seed, tol, horizon)?;
        for (name, v) in [
            ("omega0", d.omega0),
            ("p_return", d.p_return),
            ("e_return_indicator", d.e_return_indicator),
            ("e_left_hit", d.e_left_hit),
            ("p_right_return", d.p_right_return),
            ("e_cond_right", d.e_cond_right),
            ("e_return_given_return", d.e_return_given_return),
            ("r1", d.r1),
        ] {
            let row = Row::exact(name, "", v, seed);
            rows.push(if d.converged { row } else { row.unconverged() });
        }
    }
    if let Some(x) = a.expected_hit {
        let v = exact::expected_hit(&a.law, seed, x, side(a.side), tol, horizon);
        let param = format!(
            "x={x};side={}",
            if a.side == SideArg::Right {
                "right"
            } else {
                "left"
            }
        );
        rows.push(Row::series("expected_hit", param, &v, seed));
    }
    if let Some(i) = a.r_tail {
        let v = exact::r_tail(&a.law, seed, i, horizon, tol)?;
        rows.push(Row::series("r_tail", format!("i={i}"), &v, seed));
    }
    if a.conditioned_return {
        let v = exact::conditioned_return_expectation(&a.law, seed, tol, horizon)?;
        rows.push(Row::series("conditioned_return", "", &v, seed));
    }
    if a.speed {
        let (v, et1) = exact::speed_and_et1(&a.law)?;
        rows.push(Row::exact("speed", "", v, seed));
        rows.push(Row::exact("e_t1", "", et1, seed));
    }
    if rows.is_empty() {
        return Err(Error::Config(
            "choose at least one of --return-decomposition, --expected-hit, --r-tail, --conditioned-return, --speed".into(),
        ));
    }
    Ok(RunOutput { rows, result: None })
}

fn simulate_rows(a: &SimulateArgs, seed: u64, workers: usize) -> Result<RunOutput> {
    let cfg = a.mc.config(workers);
    let env_seed = a.env_seed.unwrap_or(seed);
    let mut rows = Vec::new();
    let mut result = None;
    if a.speed {
        let e = mc::speed_estimate(&a.law, a.horizon, a.reps, seed, workers)?;
        rows.push(Row::estimate("speed", format!("horizon={}", a.horizon), &e));
    }
    if a.first_return {
        let s = mc::first_returns(&a.law, env_seed, a.n, seed, &cfg)?;
        let param = format!("env_seed={env_seed}");
        let row = Row::estimate("p_return", param.clone(), &s.p_return(seed));
        rows.push(if s.censored() > 0 {
            row.unconverged()
        } else {
            row
        });
        rows.push(Row::exact(
            "escape_bound",
            param.clone(),
            s.escape_bound,
            seed,
        ));
        rows.push(Row::exact("right_edge", param, s.right_edge as f64, seed));
    }
    if let Some(mode) = a.return_conditional {
        let mode = match mode {
            ReturnModeArg::Quenched => ReturnMode::Quenched { env_seed },
            ReturnModeArg::Averaged => ReturnMode::Averaged,
        };
        let r = mc::estimate_return_conditional(&a.law, mode, a.n_env, a.n_walk, seed, &cfg)?;
        rows.push(Row::estimate("e_return_given_return", "", &r.estimate));
        rows.push(Row::estimate("p_return", "", &r.p_return));
        rows.push(Row::exact(
            "theory_infinite",
            "",
            r.theory_infinite as u8 as f64,
            seed,
        ));
        rows.push(Row::exact(
            "failures",
            format!("environments={}", r.environments),
            r.failures as f64,
            seed,
        ));
        if let Some(check) = &r.mc_check {
            let row = Row::estimate("e_return_given_return_walk", "", check);
            rows.push(if r.mc_censored > 0 {
                row.unconverged()
            } else {
                row
            });
        }
        result = to_value(&r);
    }
    if rows.is_empty() {
        return Err(Error::Config(
            "choose at least one of --speed, --first-return, --return-conditional".into(),
        ));
    }
    Ok(RunOutput { rows, result })
}

fn ladder_rows(a: &LadderArgs, seed: u64, workers: usize) -> Result<RunOutput> {
    let mut rows = Vec::new();
    let mut result = None;
    if a.gamma {
        rows.push(Row::exact(
            "gamma",
            "",
            ladder::gamma_root(&a.step, 0.0)?,
            seed,
        ));
    }
    let method = match a.method {
        MethodArg::Importance => SupMethod::Importance,
        MethodArg::Naive => SupMethod::Naive,
    };
    for &t in &a.sup_tail {
        let e = ladder::sup_tail_censored(&a.step, t, a.n, method, seed, workers, a.censor_eps)?;
        rows.push(Row::estimate("sup_tail", format!("t={t}"), &e));
    }
    if a.overshoot {
        let r = ladder::overshoot_constant(&a.step, a.k_min..=a.k_max, a.n, seed, workers)?;
        for (k, e) in &r.rows {
            rows.push(Row::estimate("overshoot_scaled", format!("k={k}"), e));
        }
        for (o, count) in &r.overshoot_hist {
            rows.push(Row::exact(
                "overshoot_count",
                format!("units={o}"),
                *count as f64,
                seed,
            ));
        }
        rows.push(Row::estimate(
            "wald_residual",
            format!("k={}", a.k_max),
            &r.wald.residual,
        ));
        result = to_value(&r);
    }
    for &t in &a.phi {
        let e = ladder::phi_estimate(&a.step, t, a.n, seed, workers)?;
        rows.push(Row::estimate("phi", format!("t={t}"), &e));
    }
    if rows.is_empty() {
        return Err(Error::Config(
            "choose at least one of --gamma, --sup-tail, --overshoot, --phi".into(),
        ));
    }
    Ok(RunOutput { rows, result })
}

/// Exit status for a library error: 2 for convergence failures, 1 for
/// everything else (bad input).
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NotConverged(_)
        | Error::TooManyFailures { .. }
        | Error::EscapeNotCertified { .. } => 2,
        _ => 1,
    }
}

fn verdict_word(v: AveragedVerdict) -> &'static str {
    match v {
        AveragedVerdict::Yes => "strong",
        AveragedVerdict::No => "weak",
        AveragedVerdict::BoundaryUnresolved => "unresolved",
        AveragedVerdict::Inapplicable => "n/a",
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

/// Two-column summary of a regime report.
pub fn regime_table(r: &RegimeReport) -> String {
    let direction = serde_json::to_value(r.direction)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default();
    let lines = [
        ("direction", direction),
        ("E[log rho]", format!("{}", r.mean_log_rho)),
        ("E[rho]", format!("{}", r.mean_rho)),
        ("E[1/rho]", format!("{}", r.mean_inv_rho)),
        ("speed", format!("{}", r.speed)),
        ("ballistic", yes_no(r.ballistic).into()),
        (
            "quenched strong",
            yes_no(r.quenched_strongly_transient).into(),
        ),
        (
            "averaged",
            verdict_word(r.averaged_strongly_transient).into(),
        ),
        ("kappa", r.kappa.map_or("none".into(), |k| format!("{k}"))),
    ];
    lines.iter().map(|(k, v)| format!("{k:<18}{v}\n")).collect()
}

fn resolve(cli: Cli) -> Result<ExperimentConfig> {
    match cli.command {
        Command::Rerun(r) => {
            let text = std::fs::read_to_string(&r.manifest)
                .map_err(|e| Error::Config(format!("cannot read {}: {e}", r.manifest.display())))?;
            let manifest: Manifest = serde_json::from_str(&text).map_err(|e| {
                Error::Config(format!("bad manifest {}: {e}", r.manifest.display()))
            })?;
            let mut config = manifest.config;
            if cli.out.is_some() {
                config.out = cli.out;
            }
            Ok(config)
        }
        command => Ok(ExperimentConfig {
            seed: cli.seed.unwrap_or_else(rand::random),
            workers: cli
                .workers
                .filter(|&w| w > 0)
                .unwrap_or_else(default_workers),
            out: cli.out,
            command,
        }),
    }
}

/// Runs a resolved configuration and writes its outputs. Returns the exit
/// status.
pub fn run_config(config: &ExperimentConfig) -> i32 {
    let start = Instant::now();
    let out = match execute(config) {
        Ok(out) => out,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code(&e);
        }
    };
    let all_converged = out.rows.iter().all(|r| r.converged);
    let csv = render_csv(&out.rows);
    if let (Command::Classify(_), Some(result)) = (&config.command, &out.result) {
        println!("{result}");
        if let Ok(report) = serde_json::from_value::<RegimeReport>(result.clone()) {
            eprint!("{}", regime_table(&report));
        }
    }
    match &config.out {
        Some(prefix) => {
            let manifest = Manifest {
                config: config.clone(),
                version: env!("CARGO_PKG_VERSION").to_string(),
                wall_time_secs: start.elapsed().as_secs_f64(),
                workers: config.workers,
                rows: out.rows.len(),
                all_converged,
                result: out.result.clone(),
            };
            if let Err(e) = write_outputs(prefix, &csv, &manifest) {
                eprintln!("error: cannot write outputs for {prefix}: {e}");
                return 1;
            }
            eprintln!("seed {} -> {prefix}.csv, {prefix}.json", config.seed);
        }
        None => {
            if !matches!(config.command, Command::Classify(_)) {
                print!("{csv}");
            }
            eprintln!("seed {}", config.seed);
        }
    }
    if all_converged {
        0
    } else {
        eprintln!("warning: some values did not converge");
        2
    }
}

/// Parses `args` and runs. Parse errors exit with 1.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
        }
    };
    match resolve(cli) {
        Ok(config) => run_config(&config),
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
