//! Monte Carlo simulation of the walk: raw stepping, first returns with
//! certified escape, conditioned return times, speed, and diagnostics for
//! the weakly transient regime.
//!
//! Every replicate draws from its own keyed stream, so results depend on
//! the seed and parameters but not on the worker count.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::env::{sample_window, EnvLaw, EnvWindow, Environment, KeyedEnv, BOUNDARY_TOL};
use crate::error::{Error, Result};
use crate::exact::{self, policy_for, r_tail_in, ReturnDecomposition};
use crate::rng::{self, tag};
use crate::stats::{hill_index, linear_fit, par_map, ratio_estimate, Estimate};

/// Largest fraction of environments allowed to fail in averaged runs.
pub const MAX_FAILURE_FRACTION: f64 = 1e-3;
/// Window doublings attempted before giving up on a replicate.
const MAX_GROWTH: u32 = 24;

/// Shared knobs for the simulation routines.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    /// Step budget per replicate.
    pub cap: u64,
    /// Certified bound on returning after reaching the right edge.
    pub escape_eps: f64,
    /// Relative truncation tolerance for exact series.
    pub tol: f64,
    /// Term and site budget for exact series and window sizing.
    pub horizon: usize,
    pub workers: usize,
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig {
            cap: 1 << 32,
            escape_eps: 1e-12,
            tol: 1e-14,
            horizon: 1 << 20,
            workers: crate::stats::default_workers(),
        }
    }
}

/// Result of [`simulate_until`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stop {
    Hit { site: i64, steps: u64 },
    Censored { steps: u64 },
}

/// Steps the chain from `start` until it stands on a target or `cap` steps
/// have been taken. One uniform per step. Leaving the window is an error.
pub fn simulate_until<R: Rng + ?Sized>(
    env: &EnvWindow,
    start: i64,
    targets: &[i64],
    cap: u64,
    rng: &mut R,
) -> Result<Stop> {
    for &s in std::iter::once(&start).chain(targets) {
        env.at(s)?;
    }
    let lo = env.lo;
    let omega = &env.omega;
    let mut x = start;
    let mut steps = 0u64;
    loop {
        if targets.contains(&x) {
            return Ok(Stop::Hit { site: x, steps });
        }
        if steps >= cap {
            return Ok(Stop::Censored { steps });
        }
        let w = match omega.get((x - lo) as usize) {
            Some(w) if x >= lo => *w,
            _ => return Err(env.at(x).unwrap_err()),
        };
        x += if rng.random::<f64>() < w { 1 } else { -1 };
        steps += 1;
    }
}

/// Position after exactly `n` steps from `start`.
pub fn walk_steps<R: Rng + ?Sized>(
    env: &EnvWindow,
    start: i64,
    n: u64,
    rng: &mut R,
) -> Result<i64> {
    let mut x = start;
    for _ in 0..n {
        let w = env.at(x)?;
        x += if rng.random::<f64>() < w { 1 } else { -1 };
    }
    env.at(x)?;
    Ok(x)
}

/// Runs `run(world, i)` for every `i`, rebuilding the world with a larger
/// level for replicates that walked off it. Replicates keep their streams,
/// so a rerun is the same path on a bigger window.
fn with_growth<W, T, B, F>(n: usize, workers: usize, mut build: B, run: F) -> Result<Vec<T>>
where
    W: Sync,
    T: Send,
    B: FnMut(u32) -> Result<W>,
    F: Fn(&W, usize) -> Result<T> + Sync,
{
    let mut out: Vec<Option<T>> = (0..n).map(|_| None).collect();
    let mut pending: Vec<usize> = (0..n).collect();
    for level in 0..=MAX_GROWTH {
        let world = build(level)?;
        let results = par_map(pending.len(), workers, |j| run(&world, pending[j]));
        let mut next = Vec::new();
        for (j, r) in results.into_iter().enumerate() {
            match r {
                Ok(v) => out[pending[j]] = Some(v),
                Err(Error::OutOfWindow { .. }) => next.push(pending[j]),
                Err(e) => return Err(e),
            }
        }
        if next.is_empty() {
            return Ok(out.into_iter().map(|v| v.expect("filled")).collect());
        }
        pending = next;
    }
    Err(Error::Config(format!(
        "{} replicates left every window after {MAX_GROWTH} doublings",
        pending.len()
    )))
}

/// Smallest right edge `M` (found by doubling) with a certified
/// `P^M(T_0 < inf) = Pi_{1,M-1} R_M / (1 + R_1) <= eps`. Returns `(M, bound)`.
/// The bound uses the series remainder of `R_M`.
pub fn certify_right_edge(
    law: &EnvLaw,
    env_seed: u64,
    eps: f64,
    tol: f64,
    horizon: usize,
) -> Result<(i64, f64)> {
    let mlr = law.mean_log_rho();
    if !(mlr < 0.0) {
        return Err(Error::NotTransientRight { mean_log_rho: mlr });
    }
    let env = KeyedEnv::new(law, env_seed);
    let policy = policy_for(law, tol, horizon);
    let r1 = r_tail_in(&env, 1, &policy);
    if !r1.converged {
        return Err(Error::NotConverged(format!(
            "R_1 for environment {env_seed}"
        )));
    }
    let mut m: i64 = 8;
    let mut log_pi = 0.0;
    let mut summed_to = 1;
    let mut bound = f64::INFINITY;
    while (m as usize) <= horizon {
        while summed_to < m {
            log_pi += env.rho(summed_to).unwrap().ln();
            summed_to += 1;
        }
        let rm = r_tail_in(&env, m, &policy);
        bound = log_pi.exp() * (rm.value + rm.remainder_bound) / (1.0 + r1.value);
        if rm.converged && bound <= eps {
            return Ok((m, bound));
        }
        m *= 2;
    }
    Err(Error::EscapeNotCertified {
        bound,
        eps,
        max_sites: horizon as i64,
    })
}

/// How a first-return attempt ended.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReturnStatus {
    /// Back at the origin after `steps >= 2` (always even).
    Returned {
        steps: u64,
    },
    /// Reached the right edge, from where the return probability is at most
    /// `bound`.
    Escaped {
        bound: f64,
    },
    Censored {
        cap: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReturnOutcome {
    pub status: ReturnStatus,
    /// `+1` or `-1`.
    pub first_step: i8,
}

/// A window `[lo, M]` whose right edge certifies escape.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnSetup {
    pub window: EnvWindow,
    pub escape_bound: f64,
}

impl ReturnSetup {
    pub fn new(law: &EnvLaw, env_seed: u64, left: i64, cfg: &McConfig) -> Result<Self> {
        let (m, bound) = certify_right_edge(law, env_seed, cfg.escape_eps, cfg.tol, cfg.horizon)?;
        Ok(ReturnSetup {
            window: sample_window(law, env_seed, -left.max(1), m)?,
            escape_bound: bound,
        })
    }

    pub fn right_edge(&self) -> i64 {
        self.window.hi()
    }
}

/// One attempt at the first return to 0, started at 0.
pub fn sample_first_return<R: Rng + ?Sized>(
    setup: &ReturnSetup,
    cap: u64,
    rng: &mut R,
) -> Result<ReturnOutcome> {
    let env = &setup.window;
    let m = setup.right_edge();
    let first_step: i8 = if rng.random::<f64>() < env.at(0)? {
        1
    } else {
        -1
    };
    let status = match simulate_until(env, first_step as i64, &[0, m], cap.saturating_sub(1), rng)?
    {
        Stop::Hit { site: 0, steps } => ReturnStatus::Returned { steps: steps + 1 },
        Stop::Hit { .. } => ReturnStatus::Escaped {
            bound: setup.escape_bound,
        },
        Stop::Censored { .. } => ReturnStatus::Censored { cap },
    };
    Ok(ReturnOutcome { status, first_step })
}

/// First-return attempts on one environment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReturnSample {
    pub outcomes: Vec<ReturnOutcome>,
    pub escape_bound: f64,
    pub right_edge: i64,
}

impl ReturnSample {
    /// Fraction returned. Escapes count as non-returns, which biases by at
    /// most the escape bound; censored attempts add their fraction to the
    /// error budget.
    pub fn p_return(&self, seed: u64) -> Estimate {
        let xs: Vec<f64> = self
            .outcomes
            .iter()
            .map(|o| matches!(o.status, ReturnStatus::Returned { .. }) as u8 as f64)
            .collect();
        let censored = self.censored();
        let mut e = Estimate::from_samples(&xs, "raw-first-return", seed);
        e.error_budget = self.escape_bound + censored as f64 / xs.len().max(1) as f64;
        e
    }

    pub fn censored(&self) -> usize {
        self.outcomes
            .iter()
            .filter(|o| matches!(o.status, ReturnStatus::Censored { .. }))
            .count()
    }
}

/// `n` first-return attempts in the environment keyed by `env_seed`.
pub fn first_returns(
    law: &EnvLaw,
    env_seed: u64,
    n: usize,
    seed: u64,
    cfg: &McConfig,
) -> Result<ReturnSample> {
    let base = ReturnSetup::new(law, env_seed, 64, cfg)?;
    let (m, bound) = (base.right_edge(), base.escape_bound);
    let outcomes = with_growth(
        n,
        cfg.workers,
        |level| {
            Ok(ReturnSetup {
                window: sample_window(law, env_seed, -(64 << level), m)?,
                escape_bound: bound,
            })
        },
        |setup, i| sample_first_return(setup, cfg.cap, &mut rng::stream(seed, tag::WALK, i as u64)),
    )?;
    Ok(ReturnSample {
        outcomes,
        escape_bound: bound,
        right_edge: m,
    })
}

/// Conditioned-path sampler.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplerMode {
    /// Walk from 1 in the conditioned environment until 0.
    HTransform,
    /// Walk from 1 in the original environment; keep paths that hit 0
    /// before the certified escape edge.
    Rejection,
}

/// Samples of `T_0` from 1 given `T_0 < inf`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionedSamples {
    pub mode: SamplerMode,
    /// Accepted hitting times, all odd.
    pub times: Vec<u64>,
    /// Replicates that ran out of steps.
    pub censored: usize,
    /// Rejected (escaped) replicates.
    pub escaped: usize,
    /// Certified escape bound for rejection mode, 0 otherwise.
    pub escape_bound: f64,
}

impl ConditionedSamples {
    pub fn mean(&self, seed: u64) -> Estimate {
        let xs: Vec<f64> = self.times.iter().map(|&t| t as f64).collect();
        let mut e = Estimate::from_samples(&xs, "conditioned-walk", seed);
        e.error_budget = self.escape_bound;
        e
    }
}

fn conditioned_world(law: &EnvLaw, env_seed: u64, level: u32, cfg: &McConfig) -> Result<EnvWindow> {
    let ce = exact::conditioned_env(law, env_seed, 256 << level, cfg.tol, cfg.horizon)?;
    if !ce.converged {
        return Err(Error::NotConverged(format!(
            "conditioned environment {env_seed}"
        )));
    }
    Ok(ce.window)
}

enum Draw {
    Accepted(u64),
    Escaped,
    Censored,
}

/// `n` draws of `T_0` from 1 conditioned on `T_0 < inf` in the environment
/// keyed by `env_seed`. Replicate `i` uses stream `(seed, i)`.
pub fn conditioned_sampler(
    law: &EnvLaw,
    env_seed: u64,
    mode: SamplerMode,
    n: usize,
    seed: u64,
    cfg: &McConfig,
) -> Result<ConditionedSamples> {
    let (draws, escape_bound) = match mode {
        SamplerMode::HTransform => {
            let draws = with_growth(
                n,
                cfg.workers,
                |level| conditioned_world(law, env_seed, level, cfg),
                |env, i| {
                    let mut rng = rng::stream(seed, tag::WALK, i as u64);
                    Ok(match simulate_until(env, 1, &[0], cfg.cap, &mut rng)? {
                        Stop::Hit { steps, .. } => Draw::Accepted(steps),
                        Stop::Censored { .. } => Draw::Censored,
                    })
                },
            )?;
            (draws, 0.0)
        }
        SamplerMode::Rejection => {
            let (m, bound) =
                certify_right_edge(law, env_seed, cfg.escape_eps, cfg.tol, cfg.horizon)?;
            let env = sample_window(law, env_seed, 0, m)?;
            let draws = par_map(n, cfg.workers, |i| {
                let mut rng = rng::stream(seed, tag::WALK, i as u64);
                Ok(match simulate_until(&env, 1, &[0, m], cfg.cap, &mut rng)? {
                    Stop::Hit { site: 0, steps } => Draw::Accepted(steps),
                    Stop::Hit { .. } => Draw::Escaped,
                    Stop::Censored { .. } => Draw::Censored,
                })
            })
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
            (draws, bound)
        }
    };
    let mut out = ConditionedSamples {
        mode,
        times: Vec::with_capacity(n),
        censored: 0,
        escaped: 0,
        escape_bound,
    };
    for d in draws {
        match d {
            Draw::Accepted(t) => out.times.push(t),
            Draw::Escaped => out.escaped += 1,
            Draw::Censored => out.censored += 1,
        }
    }
    Ok(out)
}

/// Which measure the conditional return time is taken under.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum ReturnMode {
    /// One environment, keyed by `env_seed`.
    Quenched { env_seed: u64 },
    /// Averaged over environments.
    Averaged,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReturnConditionalReport {
    /// Estimate of `E[r | r < inf]`.
    pub estimate: Estimate,
    /// Estimate of `P(r < inf)`.
    pub p_return: Estimate,
    /// The law has `E[rho] >= 1`, where the averaged expectation is infinite
    /// and `estimate` is only a finite-sample statistic.
    pub theory_infinite: bool,
    pub failures: usize,
    pub environments: usize,
    /// Walk-level check of the quenched value, when requested.
    pub mc_check: Option<Estimate>,
    /// Walk-level replicates lost to the step cap.
    pub mc_censored: usize,
}

fn decomposition_ok(d: &Result<ReturnDecomposition>) -> Option<&ReturnDecomposition> {
    match d {
        Ok(d) if d.converged && d.e_return_indicator.is_finite() => Some(d),
        _ => None,
    }
}

/// Exact decompositions for environments `0..n` keyed off `seed`.
fn decompositions(
    law: &EnvLaw,
    n: usize,
    seed: u64,
    cfg: &McConfig,
) -> Vec<Result<ReturnDecomposition>> {
    par_map(n, cfg.workers, |i| {
        exact::return_decomposition(
            law,
            rng::derive_seed(seed, tag::ENV, i as u64),
            cfg.tol,
            cfg.horizon,
        )
    })
}

fn check_failures(failed: usize, total: usize) -> Result<()> {
    if failed as f64 > MAX_FAILURE_FRACTION * total as f64 {
        return Err(Error::TooManyFailures {
            failed,
            total,
            allowed: MAX_FAILURE_FRACTION,
        });
    }
    Ok(())
}

/// Draws of `r` given `r < inf` in one environment: the first step is
/// chosen with its conditional odds, then the right branch uses the
/// conditioned walk and the left branch the original walk from -1.
fn conditional_return_draws(
    law: &EnvLaw,
    env_seed: u64,
    d: &ReturnDecomposition,
    n: usize,
    seed: u64,
    cfg: &McConfig,
) -> Result<(Vec<u64>, usize)> {
    let right = d.omega0 * d.p_right_return;
    let p_first_right = right / (right + (1.0 - d.omega0));
    let draws = with_growth(
        n,
        cfg.workers,
        |level| {
            Ok((
                conditioned_world(law, env_seed, level, cfg)?,
                sample_window(law, env_seed, -(64 << level), 0)?,
            ))
        },
        |(cond, left), i| {
            let mut rng = rng::stream(seed, tag::WALK, i as u64);
            let stop = if rng.random::<f64>() < p_first_right {
                simulate_until(cond, 1, &[0], cfg.cap, &mut rng)?
            } else {
                simulate_until(left, -1, &[0], cfg.cap, &mut rng)?
            };
            Ok(match stop {
                Stop::Hit { steps, .. } => Some(steps + 1),
                Stop::Censored { .. } => None,
            })
        },
    )?;
    let censored = draws.iter().filter(|d| d.is_none()).count();
    Ok((draws.into_iter().flatten().collect(), censored))
}

/// `E[r | r < inf]`, quenched or averaged.
///
/// Quenched: the exact decomposition of one environment, optionally checked
/// against `n_walk` walk-level draws. Averaged: `n_env` environments, each
/// replaced by its exact `E_w[r 1{r < inf}]` and `P_w(r < inf)`, combined
/// by the ratio of means.
pub fn estimate_return_conditional(
    law: &EnvLaw,
    mode: ReturnMode,
    n_env: usize,
    n_walk: usize,
    seed: u64,
    cfg: &McConfig,
) -> Result<ReturnConditionalReport> {
    let theory_infinite = law.moment_rho(1.0) >= 1.0 - BOUNDARY_TOL;
    match mode {
        ReturnMode::Quenched { env_seed } => {
            let d = exact::return_decomposition(law, env_seed, cfg.tol, cfg.horizon)?;
            if decomposition_ok(&Ok(d)).is_none() {
                return Err(Error::TooManyFailures {
                    failed: 1,
                    total: 1,
                    allowed: MAX_FAILURE_FRACTION,
                });
            }
            let (mc_check, mc_censored) = if n_walk > 0 {
                let (draws, censored) =
                    conditional_return_draws(law, env_seed, &d, n_walk, seed, cfg)?;
                let xs: Vec<f64> = draws.iter().map(|&t| t as f64).collect();
                (
                    Some(Estimate::from_samples(&xs, "conditioned-walk", seed)),
                    censored,
                )
            } else {
                (None, 0)
            };
            Ok(ReturnConditionalReport {
                estimate: Estimate::exact(d.e_return_given_return, "exact-quenched", env_seed),
                p_return: Estimate::exact(d.p_return, "exact-quenched", env_seed),
                theory_infinite,
                failures: 0,
                environments: 1,
                mc_check,
                mc_censored,
            })
        }
        ReturnMode::Averaged => {
            let all = decompositions(law, n_env, seed, cfg);
            let good: Vec<&ReturnDecomposition> = all.iter().filter_map(decomposition_ok).collect();
            let failures = n_env - good.len();
            check_failures(failures, n_env)?;
            let num: Vec<f64> = good.iter().map(|d| d.e_return_indicator).collect();
            let den: Vec<f64> = good.iter().map(|d| d.p_return).collect();
            let (r, se) = ratio_estimate(&num, &den);
            let estimate = Estimate {
                value: r,
                std_error: se,
                n: good.len() as u64,
                method: "rao-blackwell-ratio".into(),
                seed,
                error_budget: 0.0,
            };
            Ok(ReturnConditionalReport {
                estimate,
                p_return: Estimate::from_samples(&den, "rao-blackwell", seed),
                theory_infinite,
                failures,
                environments: n_env,
                mc_check: None,
                mc_censored: 0,
            })
        }
    }
}

/// Averaged speed: a fresh environment on `[-horizon, horizon]` per
/// replicate and the mean of `X_horizon / horizon`.
pub fn speed_estimate(
    law: &EnvLaw,
    horizon: u64,
    reps: usize,
    seed: u64,
    workers: usize,
) -> Result<Estimate> {
    let mlr = law.mean_log_rho();
    if !mlr.is_finite() {
        return Err(Error::InvalidLaw(format!(
            "E[log rho] = {mlr} is not finite"
        )));
    }
    if horizon == 0 {
        return Err(Error::Config("horizon must be positive".into()));
    }
    let h = horizon as i64;
    let xs = par_map(reps, workers, |i| {
        let env = sample_window(law, rng::derive_seed(seed, tag::ENV, i as u64), -h, h)?;
        let x = walk_steps(
            &env,
            0,
            horizon,
            &mut rng::stream(seed, tag::WALK, i as u64),
        )?;
        Ok(x as f64 / horizon as f64)
    })
    .into_iter()
    .collect::<Result<Vec<f64>>>()?;
    Ok(Estimate::from_samples(&xs, "walk-speed", seed))
}

/// Running value of the averaged conditional return statistic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunningPoint {
    pub n: usize,
    pub value: f64,
    pub std_error: f64,
}

/// Empirical `P(R_1 >= t)` and `t P(R_1 >= t)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailPoint {
    pub t: f64,
    pub tail: f64,
    pub scaled: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DivergenceReport {
    /// Ratio-of-means estimate of `E[r | r < inf]` over the first `n`
    /// environments, for each `n` in the schedule.
    pub running: Vec<RunningPoint>,
    /// Hill index of the per-environment `E_w[r 1{r < inf}]` on its top 1%.
    pub hill_index: f64,
    pub hill_k: usize,
    pub tail_grid: Vec<TailPoint>,
    /// `min_t t P(R_1 >= t)` over the grid.
    pub tail_floor: f64,
    /// Least-squares slope of `log P(R_1 > t)` on `log t`.
    pub tail_slope: f64,
    pub kappa: Option<f64>,
    pub failures: usize,
    pub environments: usize,
}

/// Grid for the `t P(R_1 >= t)` floor.
pub const FLOOR_GRID: [f64; 3] = [10.0, 100.0, 1000.0];

/// Diagnostics for an infinite averaged conditional return time. Each
/// environment contributes its exact quenched values, which stand in for
/// walk-level draws weighted by the return probability.
pub fn divergence_diagnostic(
    law: &EnvLaw,
    schedule: &[usize],
    seed: u64,
    cfg: &McConfig,
) -> Result<DivergenceReport> {
    let n_max = schedule.iter().copied().max().unwrap_or(0);
    if n_max < 2 {
        return Err(Error::Config("schedule needs a size of at least 2".into()));
    }
    let all = decompositions(law, n_max, seed, cfg);
    let failures = all.iter().filter(|d| decomposition_ok(d).is_none()).count();
    check_failures(failures, n_max)?;

    let mut sorted: Vec<usize> = schedule.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let running = sorted
        .iter()
        .map(|&n| {
            let good: Vec<&ReturnDecomposition> =
                all[..n].iter().filter_map(decomposition_ok).collect();
            let num: Vec<f64> = good.iter().map(|d| d.e_return_indicator).collect();
            let den: Vec<f64> = good.iter().map(|d| d.p_return).collect();
            let (value, std_error) = ratio_estimate(&num, &den);
            RunningPoint {
                n,
                value,
                std_error,
            }
        })
        .collect();

    let good: Vec<&ReturnDecomposition> = all.iter().filter_map(decomposition_ok).collect();
    let stat: Vec<f64> = good.iter().map(|d| d.e_return_indicator).collect();
    let hill_k = (stat.len() / 100).max(1);
    let r1: Vec<f64> = good.iter().map(|d| d.r1).collect();
    let frac_at_least = |t: f64| r1.iter().filter(|&&r| r >= t).count() as f64 / r1.len() as f64;
    let tail_grid: Vec<TailPoint> = FLOOR_GRID
        .iter()
        .map(|&t| {
            let tail = frac_at_least(t);
            TailPoint {
                t,
                tail,
                scaled: t * tail,
            }
        })
        .collect();
    let tail_floor = tail_grid
        .iter()
        .map(|p| p.scaled)
        .fold(f64::INFINITY, f64::min);

    // Quarter-decade grid from 10 while at least 10 exceedances remain.
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    let mut t = 10.0f64;
    loop {
        let count = r1.iter().filter(|&&r| r > t).count();
        if count < 10 {
            break;
        }
        xs.push(t.ln());
        ys.push((count as f64 / r1.len() as f64).ln());
        t *= 10f64.powf(0.25);
    }
    let tail_slope = if xs.len() >= 2 {
        linear_fit(&xs, &ys).0
    } else {
        f64::NAN
    };
    let kappa = crate::env::kappa_root(law, 1e-13)?;

    Ok(DivergenceReport {
        running,
        hill_index: hill_index(&stat, hill_k),
        hill_k,
        tail_grid,
        tail_floor,
        tail_slope,
        kappa,
        failures,
        environments: n_max,
    })
}
