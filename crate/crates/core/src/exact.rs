//! Exact quenched computations on a realized environment.
//!
//! Notation: `Pi_{i,j} = prod_{x=i}^{j} rho_x`, `R_{i,j} = sum_{k=i}^{j}
//! Pi_{i,k}` and `R_i = R_{i,inf}`. Products are accumulated in log space
//! and sums with compensation; `Pi` spans hundreds of orders of magnitude
//! on long windows.

use serde::{Deserialize, Serialize};

use crate::env::{rho_of, speed_from_moments, EnvLaw, EnvWindow, Environment, KeyedEnv};
use crate::error::{Error, Result};
use crate::series::{CompensatedSum, SeriesPolicy, SeriesValue};

/// Which neighbor a hitting time targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    /// `E^x[T_{x+1}]`.
    Right,
    /// `E^x[T_{x-1}]`.
    Left,
}

/// First-step decomposition of the return time to the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReturnDecomposition {
    pub omega0: f64,
    /// `P_w(r < inf)`.
    pub p_return: f64,
    /// `E_w[r 1{r < inf}]`.
    pub e_return_indicator: f64,
    /// `E_w^{-1}[T_0]`.
    pub e_left_hit: f64,
    /// `P_w^1(T_0 < inf) = R_1 / (1 + R_1)`.
    pub p_right_return: f64,
    /// `E_w^1[T_0 | T_0 < inf]`.
    pub e_cond_right: f64,
    /// `E_w[r | r < inf]`.
    pub e_return_given_return: f64,
    pub r1: f64,
    pub converged: bool,
}

fn window_slice(env: &EnvWindow, i: i64, j: i64) -> Result<&[f64]> {
    if i > j {
        return Err(Error::InvalidInterval(format!("i {i} > j {j}")));
    }
    for s in [i, j] {
        if !env.contains(s) {
            return Err(Error::OutOfWindow {
                site: s,
                lo: env.lo,
                hi: env.hi(),
            });
        }
    }
    let a = (i - env.lo) as usize;
    let b = (j - env.lo) as usize;
    Ok(&env.omega[a..=b])
}

/// `(Pi_{i,j}, R_{i,j})` in one left-to-right pass.
pub fn cascade(env: &EnvWindow, i: i64, j: i64) -> Result<(f64, f64)> {
    let omegas = window_slice(env, i, j)?;
    let mut log_pi = 0.0;
    let mut r = CompensatedSum::default();
    for &o in omegas {
        log_pi += rho_of(o).ln();
        r.add(log_pi.exp());
    }
    Ok((log_pi.exp(), r.value()))
}

/// `(P^x(T_a < T_b), P^x(T_b < T_a))`.
///
/// At `x = a` the left probability is 1 and at `x = b` it is 0. Computed
/// as a ratio of log-sum-exp partial sums of `Pi_{a,k}`, `k in [a, b-1]`.
pub fn hitting_prob(env: &EnvWindow, x: i64, a: i64, b: i64) -> Result<(f64, f64)> {
    if !(a < b && a <= x && x <= b) {
        return Err(Error::InvalidInterval(format!(
            "need a < b and a <= x <= b, got a={a} x={x} b={b}"
        )));
    }
    let omegas = window_slice(env, a, b - 1)?;
    let mut log_pi = Vec::with_capacity(omegas.len());
    let mut acc = 0.0;
    for &o in omegas {
        acc += rho_of(o).ln();
        log_pi.push(acc);
    }
    let shift = log_pi.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let split = (x - a) as usize;
    let below: CompensatedSum = log_pi[..split].iter().map(|l| (l - shift).exp()).collect();
    let above: CompensatedSum = log_pi[split..].iter().map(|l| (l - shift).exp()).collect();
    let (below, above) = (below.value(), above.value());
    let total = below + above;
    Ok((above / total, below / total))
}

/// Absorption probability at `a` and expected absorption time in
/// `{a, b}` from `x`, by direct elimination of the tridiagonal systems.
/// Independent of the product formulas; used only to validate them.
pub fn absorption_oracle(env: &EnvWindow, a: i64, b: i64, x: i64) -> Result<(f64, f64)> {
    if !(a < b && a <= x && x <= b) {
        return Err(Error::InvalidInterval(format!(
            "need a < b and a <= x <= b, got a={a} x={x} b={b}"
        )));
    }
    if x == a {
        return Ok((1.0, 0.0));
    }
    if x == b {
        return Ok((0.0, 0.0));
    }
    let n = (b - a - 1) as usize;
    let omegas = window_slice(env, a + 1, b - 1)?;
    // Row k (site a+1+k): -(1-w) u_{k-1} + u_k - w u_{k+1} = rhs_k.
    let lower: Vec<f64> = omegas.iter().map(|w| -(1.0 - w)).collect();
    let upper: Vec<f64> = omegas.iter().map(|w| -w).collect();
    let mut rhs_h = vec![0.0; n];
    rhs_h[0] = 1.0 - omegas[0];
    let rhs_t = vec![1.0; n];
    let h = thomas(&lower, &upper, &rhs_h);
    let t = thomas(&lower, &upper, &rhs_t);
    let k = (x - a - 1) as usize;
    Ok((h[k], t[k]))
}

/// Tridiagonal solve with unit diagonal.
fn thomas(lower: &[f64], upper: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = rhs.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    c[0] = upper[0];
    d[0] = rhs[0];
    for i in 1..n {
        let m = 1.0 - lower[i] * c[i - 1];
        c[i] = upper[i] / m;
        d[i] = (rhs[i] - lower[i] * d[i - 1]) / m;
    }
    let mut out = vec![0.0; n];
    out[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        out[i] = d[i] - c[i] * out[i + 1];
    }
    out
}

fn require_right(law: &EnvLaw) -> Result<f64> {
    let mlr = law.mean_log_rho();
    if mlr < 0.0 {
        Ok(mlr)
    } else {
        Err(Error::NotTransientRight { mean_log_rho: mlr })
    }
}

/// Policy for series over `Pi` products of `law`.
pub fn policy_for(law: &EnvLaw, tol: f64, horizon: usize) -> SeriesPolicy {
    SeriesPolicy::new(tol, law.decay_ratio()).with_max_terms(horizon)
}

/// `R_i = sum_{k >= i} Pi_{i,k}` summed rightward on any environment.
/// Running off a finite window leaves the result unconverged.
pub fn r_tail_in<E: Environment>(env: &E, i: i64, policy: &SeriesPolicy) -> SeriesValue {
    let mut acc = policy.accumulator();
    let mut log_pi = 0.0;
    let mut k = i;
    while let Some(rho) = env.rho(k) {
        log_pi += rho.ln();
        if acc.push(log_pi.exp()) {
            break;
        }
        k += 1;
    }
    acc.finish()
}

/// `R_i` for the environment of `law` keyed by `seed`.
pub fn r_tail(law: &EnvLaw, seed: u64, i: i64, horizon: usize, tol: f64) -> Result<SeriesValue> {
    require_right(law)?;
    Ok(r_tail_in(
        &KeyedEnv::new(law, seed),
        i,
        &policy_for(law, tol, horizon),
    ))
}

/// Quenched expected hitting time of a neighbor of `x` on any environment:
/// `E^x[T_{x+1}] = 1 + 2 sum_{i <= x} Pi_{i,x}` or
/// `E^x[T_{x-1}] = 1 + 2 sum_{i >= x} Pi_{x,i}^{-1}`.
pub fn expected_hit_in<E: Environment>(
    env: &E,
    x: i64,
    side: Side,
    policy: &SeriesPolicy,
) -> SeriesValue {
    let mut acc = policy.accumulator();
    let mut log_pi = 0.0;
    let mut k = x;
    let step = match side {
        Side::Right => -1,
        Side::Left => 1,
    };
    while let Some(rho) = env.rho(k) {
        match side {
            Side::Right => log_pi += rho.ln(),
            Side::Left => log_pi -= rho.ln(),
        }
        if acc.push(log_pi.exp()) {
            break;
        }
        k += step;
    }
    acc.finish().affine(1.0, 2.0)
}

/// Quenched expected hitting time for the keyed environment of `law`.
/// A law without drift toward `side` yields a divergent (unconverged,
/// infinite) value.
pub fn expected_hit(
    law: &EnvLaw,
    seed: u64,
    x: i64,
    side: Side,
    tol: f64,
    horizon: usize,
) -> SeriesValue {
    let mlr = law.mean_log_rho();
    let drift_ok = match side {
        Side::Right => mlr < 0.0,
        Side::Left => mlr > 0.0,
    };
    if !drift_ok {
        return SeriesValue::divergent();
    }
    let decay = (-mlr.abs() / 2.0).exp();
    let policy = SeriesPolicy::new(tol, decay).with_max_terms(horizon);
    expected_hit_in(&KeyedEnv::new(law, seed), x, side, &policy)
}

/// `R_k` for `k in [from, to]` by the backward recursion
/// `R_k = rho_k (1 + R_{k+1})`, seeded with `R_to` from a forward tail sum.
/// Index `k - from` of the result holds `R_k`.
fn tail_sweep<E: Environment>(
    env: &E,
    from: i64,
    to: i64,
    policy: &SeriesPolicy,
) -> (Vec<f64>, Vec<f64>, bool) {
    let tail = r_tail_in(env, to, policy);
    let len = (to - from + 1) as usize;
    let mut rhos = vec![0.0; len];
    let mut tails = vec![0.0; len];
    tails[len - 1] = tail.value;
    rhos[len - 1] = env.rho(to).unwrap_or(f64::NAN);
    for k in (from..to).rev() {
        let idx = (k - from) as usize;
        let rho = env.rho(k).unwrap_or(f64::NAN);
        rhos[idx] = rho;
        tails[idx] = rho * (1.0 + tails[idx + 1]);
    }
    (rhos, tails, tail.converged)
}

/// The environment under which the walk from 1 reproduces the law of the
/// original walk conditioned on `T_0 < inf`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionedEnv {
    /// `omega~_x` for `x in [0, hi]`.
    pub window: EnvWindow,
    /// `R_k` for `k in [1, hi + 1]`, at index `k - 1`.
    pub tails: Vec<f64>,
    pub converged: bool,
}

impl ConditionedEnv {
    /// `R_k` for `1 <= k <= hi + 1`.
    pub fn tail(&self, k: i64) -> f64 {
        self.tails[(k - 1) as usize]
    }
}

/// `omega~_x = omega_x R_{x+1} / (1 + R_{x+1})` for `x >= 1` and
/// `omega~_x = omega_x` for `x <= 0`, on `[0, hi]`. All `R` come from one
/// backward sweep seeded at `hi + 1`.
pub fn conditioned_env(
    law: &EnvLaw,
    seed: u64,
    hi: i64,
    tol: f64,
    horizon: usize,
) -> Result<ConditionedEnv> {
    require_right(law)?;
    if hi < 0 {
        return Err(Error::InvalidInterval(format!("hi {hi} < 0")));
    }
    let env = KeyedEnv::new(law, seed);
    let policy = policy_for(law, tol, horizon);
    let (_, tails, converged) = tail_sweep(&env, 1, hi + 1, &policy);
    let mut omega = Vec::with_capacity(hi as usize + 1);
    omega.push(env.omega(0).unwrap());
    for x in 1..=hi {
        let w = env.omega(x).unwrap();
        let r = tails[x as usize];
        omega.push(w * r / (1.0 + r));
    }
    Ok(ConditionedEnv {
        window: EnvWindow {
            lo: 0,
            omega,
            law: law.clone(),
            seed,
        },
        tails,
        converged,
    })
}

/// `E^1[T_0 | T_0 < inf] = 1 + 2 sum_{n>=1} Pi_{1,n} (1+R_{n+1}) R_{n+1} /
/// ((1+R_1) R_1)`.
///
/// The extension is doubled until the series stops inside it. In debug
/// builds each term is checked against the telescoped product of
/// `omega~ / (1 - omega~)`.
pub fn conditioned_return_expectation(
    law: &EnvLaw,
    seed: u64,
    tol: f64,
    horizon: usize,
) -> Result<SeriesValue> {
    require_right(law)?;
    let env = KeyedEnv::new(law, seed);
    let policy = policy_for(law, tol, horizon);
    let mut len: i64 = 64;
    loop {
        let (rhos, tails, tail_ok) = tail_sweep(&env, 1, len + 1, &policy);
        if !tail_ok {
            return Ok(SeriesValue {
                converged: false,
                ..SeriesValue::divergent()
            });
        }
        let r1 = tails[0];
        let log_norm = ((1.0 + r1) * r1).ln();
        let mut acc = policy.accumulator();
        let mut log_pi = 0.0;
        let mut log_tilde_inv = 0.0;
        let mut stopped = false;
        for n in 1..=len {
            let idx = n as usize;
            log_pi += rhos[idx - 1].ln();
            let r_next = tails[idx];
            let term = (log_pi + ((1.0 + r_next) * r_next).ln() - log_norm).exp();
            if cfg!(debug_assertions) {
                let w = env.omega(n).unwrap();
                let wt = w * r_next / (1.0 + r_next);
                log_tilde_inv += (wt / (1.0 - wt)).ln();
                let gap = (log_tilde_inv - term.ln()).abs();
                debug_assert!(
                    gap <= 1e-8 * (1.0 + log_tilde_inv.abs()),
                    "tilde identity gap {gap}"
                );
            }
            if acc.push(term) {
                stopped = true;
                break;
            }
        }
        if stopped || len as usize >= horizon {
            return Ok(acc.finish().affine(1.0, 2.0));
        }
        len *= 2;
    }
}

/// First-step decomposition of `E_w[r 1{r < inf}]` from exact quenched
/// quantities:
/// `P_w(r < inf) + (1 - w_0) E^{-1}[T_0] + w_0 P^1(T_0 < inf) E^1[T_0 | T_0 < inf]`.
/// The leading term is the first step of every returning path.
pub fn return_decomposition(
    law: &EnvLaw,
    seed: u64,
    tol: f64,
    horizon: usize,
) -> Result<ReturnDecomposition> {
    require_right(law)?;
    let omega0 = law.site_omega(seed, 0);
    let left = expected_hit(law, seed, -1, Side::Right, tol, horizon);
    let r1 = r_tail(law, seed, 1, horizon, tol)?;
    let cond = conditioned_return_expectation(law, seed, tol, horizon)?;
    let p_right_return = r1.value / (1.0 + r1.value);
    let p_return = (1.0 - omega0) + omega0 * p_right_return;
    let e_return_indicator =
        p_return + (1.0 - omega0) * left.value + omega0 * p_right_return * cond.value;
    Ok(ReturnDecomposition {
        omega0,
        p_return,
        e_return_indicator,
        e_left_hit: left.value,
        p_right_return,
        e_cond_right: cond.value,
        e_return_given_return: e_return_indicator / p_return,
        r1: r1.value,
        converged: left.converged && r1.converged && cond.converged,
    })
}

/// Limiting speed and the averaged `E[T_1]`.
pub fn speed_and_et1(law: &EnvLaw) -> Result<(f64, f64)> {
    let mlr = law.mean_log_rho();
    if !mlr.is_finite() {
        return Err(Error::InvalidLaw(format!(
            "E[log rho] = {mlr} is not finite"
        )));
    }
    let m = law.moment_rho(1.0);
    let speed = speed_from_moments(m, law.moment_rho(-1.0));
    let e_t1 = if m < 1.0 - crate::env::BOUNDARY_TOL {
        (1.0 + m) / (1.0 - m)
    } else {
        f64::INFINITY
    };
    Ok((speed, e_t1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::sample_window;

    fn ballistic() -> EnvLaw {
        EnvLaw::discrete(vec![(0.5, 0.8), (0.5, 0.6)]).unwrap()
    }

    fn sub_ballistic() -> EnvLaw {
        EnvLaw::discrete(vec![(0.5, 0.75), (0.5, 1.0 / 3.0)]).unwrap()
    }

    fn constant_window(p: f64, lo: i64, hi: i64) -> EnvWindow {
        sample_window(&EnvLaw::constant(p).unwrap(), 0, lo, hi).unwrap()
    }

    #[test]
    fn cascade_examples() {
        let w = constant_window(0.7, -3, 3);
        let (pi, r) = cascade(&w, 0, 0).unwrap();
        assert!((pi - 3.0 / 7.0).abs() < 1e-15 && (r - 3.0 / 7.0).abs() < 1e-15);
        let (pi, r) = cascade(&w, 0, 1).unwrap();
        assert!((pi - 9.0 / 49.0).abs() < 1e-15);
        assert!((r - 30.0 / 49.0).abs() < 1e-15);
        assert!(cascade(&w, 0, 4).is_err());
        assert!(cascade(&w, 2, 1).is_err());
    }

    #[test]
    fn cascade_splits() {
        let w = sample_window(&sub_ballistic(), 9, 0, 40).unwrap();
        let (pij, rij) = cascade(&w, 0, 40).unwrap();
        for k in 0..40 {
            let (pik, rik) = cascade(&w, 0, k).unwrap();
            let (pkj, rkj) = cascade(&w, k + 1, 40).unwrap();
            assert!((pik * pkj - pij).abs() <= 1e-12 * pij);
            assert!((rik + pik * rkj - rij).abs() <= 1e-12 * rij);
        }
    }

    #[test]
    fn hitting_prob_examples() {
        let w = constant_window(0.5, 0, 10);
        let (l, r) = hitting_prob(&w, 3, 0, 10).unwrap();
        assert!((l - 0.7).abs() < 1e-14 && (l + r - 1.0).abs() < 1e-15);

        let w = constant_window(0.7, 0, 10);
        let (l, _) = hitting_prob(&w, 1, 0, 2).unwrap();
        assert!((l - 0.3).abs() < 1e-14);

        // Classical gambler's ruin.
        let rho: f64 = 3.0 / 7.0;
        let expect = (rho.powi(3) - rho.powi(10)) / (1.0 - rho.powi(10));
        let (l, _) = hitting_prob(&w, 3, 0, 10).unwrap();
        assert!((l - expect).abs() < 1e-14);
        assert!((expect - 0.078_524_574_723_404_68).abs() < 1e-15);

        assert_eq!(hitting_prob(&w, 0, 0, 10).unwrap(), (1.0, 0.0));
        assert_eq!(hitting_prob(&w, 10, 0, 10).unwrap(), (0.0, 1.0));
        assert!(hitting_prob(&w, 3, 5, 10).is_err());
        assert!(hitting_prob(&w, 3, 3, 3).is_err());
        assert!(hitting_prob(&w, 3, 0, 12).is_err());
        // b may be hi + 1.
        assert!(hitting_prob(&w, 3, 0, 11).is_ok());
    }

    #[test]
    fn oracle_examples() {
        let w = constant_window(0.5, 0, 10);
        let (p, t) = absorption_oracle(&w, 0, 10, 3).unwrap();
        assert!((p - 0.7).abs() < 1e-13 && (t - 21.0).abs() < 1e-12);
        let w = constant_window(0.7, 0, 10);
        let (p, t) = absorption_oracle(&w, 0, 2, 1).unwrap();
        assert!((p - 0.3).abs() < 1e-15 && (t - 1.0).abs() < 1e-15);
    }

    #[test]
    fn oracle_matches_formula_on_random_windows() {
        for seed in 0..100 {
            let w = sample_window(&sub_ballistic(), seed, 0, 19).unwrap();
            for x in 0..=20 {
                let (p, _) = hitting_prob(&w, x, 0, 20).unwrap();
                let (q, _) = absorption_oracle(&w, 0, 20, x).unwrap();
                assert!((p - q).abs() <= 1e-10, "seed {seed} x {x}: {p} vs {q}");
            }
        }
    }

    #[test]
    fn hitting_prob_monotone_in_x() {
        let w = sample_window(&sub_ballistic(), 3, -30, 30).unwrap();
        let mut prev = 1.0;
        for x in -30..=31 {
            let (p, q) = hitting_prob(&w, x, -30, 31).unwrap();
            assert!(p <= prev + 1e-15);
            assert!((p + q - 1.0).abs() <= 1e-12);
            prev = p;
        }
    }

    #[test]
    fn r_tail_examples() {
        let c = EnvLaw::constant(0.7).unwrap();
        let s = r_tail(&c, 0, 1, 100_000, 1e-12).unwrap();
        assert!(s.converged);
        assert!((s.value - 0.75).abs() < 1e-14);
        assert!(s.remainder_bound <= 1e-10);
        let c = EnvLaw::constant(0.55).unwrap();
        let s = r_tail(&c, 0, 1, 100_000, 1e-12).unwrap();
        assert!((s.value - 4.5).abs() < 1e-10);
        assert!(r_tail(&EnvLaw::constant(0.5).unwrap(), 0, 1, 100, 1e-12).is_err());
        assert!(r_tail(&EnvLaw::constant(0.4).unwrap(), 0, 1, 100, 1e-12).is_err());
    }

    #[test]
    fn r_tail_budget_exhaustion() {
        let c = EnvLaw::constant(0.55).unwrap();
        let s = r_tail(&c, 0, 1, 10, 1e-12).unwrap();
        assert!(!s.converged);
        assert_eq!(s.terms_used, 10);
    }

    #[test]
    fn r_tail_doubling_horizon_is_stable() {
        let law = sub_ballistic();
        for seed in 0..20 {
            let a = r_tail(&law, seed, 1, 1 << 16, 1e-14).unwrap();
            let b = r_tail(&law, seed, 1, 1 << 17, 1e-14).unwrap();
            assert!(a.converged);
            assert_eq!(a.value, b.value);
        }
    }

    #[test]
    fn expected_hit_examples() {
        let c = EnvLaw::constant(0.7).unwrap();
        let s = expected_hit(&c, 0, 0, Side::Right, 1e-14, 1 << 20);
        assert!(s.converged && (s.value - 2.5).abs() <= 1e-12);
        let s = expected_hit(&c, 0, 5, Side::Left, 1e-14, 1 << 20);
        assert!(!s.converged && s.value.is_infinite());
        let c = EnvLaw::constant(0.3).unwrap();
        let s = expected_hit(&c, 0, 0, Side::Left, 1e-14, 1 << 20);
        assert!(s.converged && (s.value - 2.5).abs() <= 1e-12);
        let s = expected_hit(
            &EnvLaw::constant(0.5).unwrap(),
            0,
            0,
            Side::Right,
            1e-12,
            100,
        );
        assert!(!s.converged);
    }

    #[test]
    fn expected_hit_matches_oracle_far_from_left_wall() {
        // With the left wall far away, absorption time from x to x+1 in
        // [x - L, x + 1] approaches E^x[T_{x+1}] for a right-transient law.
        let law = EnvLaw::discrete(vec![(0.5, 0.8), (0.5, 0.6)]).unwrap();
        for seed in 0..10 {
            let w = sample_window(&law, seed, -200, 1).unwrap();
            let s = expected_hit_in(&w, 0, Side::Right, &policy_for(&law, 1e-15, 1000));
            let (p_left, t) = absorption_oracle(&w, -200, 1, 0).unwrap();
            assert!(p_left < 1e-20);
            assert!((s.value - t).abs() < 1e-9 * t, "{} vs {t}", s.value);
        }
    }

    #[test]
    fn conditioned_env_examples() {
        for (p, expect) in [(0.7, 0.3), (0.9, 0.1)] {
            let c = EnvLaw::constant(p).unwrap();
            let ce = conditioned_env(&c, 0, 20, 1e-15, 1 << 20).unwrap();
            assert!(ce.converged);
            assert_eq!(ce.window.omega(0), Some(p));
            for x in 1..=20 {
                assert!((ce.window.omega(x).unwrap() - expect).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn conditioned_env_lowers_and_satisfies_rho_identity() {
        let law = sub_ballistic();
        let ce = conditioned_env(&law, 17, 100, 1e-15, 1 << 20).unwrap();
        let base = sample_window(&law, 17, 0, 100).unwrap();
        for x in 1..=100i64 {
            let wt = ce.window.omega(x).unwrap();
            assert!(wt < base.omega(x).unwrap());
            let lhs = (1.0 - wt) / wt;
            let rhs = (1.0 + ce.tail(x)) / ce.tail(x + 1);
            assert!((lhs - rhs).abs() <= 1e-10 * rhs.max(1.0), "x {x}");
        }
    }

    #[test]
    fn conditioned_return_examples() {
        let c = EnvLaw::constant(0.7).unwrap();
        let s = conditioned_return_expectation(&c, 0, 1e-15, 1 << 20).unwrap();
        assert!(s.converged && (s.value - 2.5).abs() < 1e-12, "{}", s.value);
        let c = EnvLaw::constant(0.9).unwrap();
        let s = conditioned_return_expectation(&c, 0, 1e-15, 1 << 20).unwrap();
        assert!((s.value - 1.25).abs() < 1e-12);
    }

    #[test]
    fn conditioned_return_equals_hit_in_conditioned_env() {
        let law = sub_ballistic();
        for seed in 0..20 {
            let s = conditioned_return_expectation(&law, seed, 1e-15, 1 << 20).unwrap();
            let hi = 2 * s.terms_used as i64 + 64;
            let ce = conditioned_env(&law, seed, hi, 1e-15, 1 << 20).unwrap();
            let h = expected_hit_in(&ce.window, 1, Side::Left, &policy_for(&law, 1e-15, 1 << 20));
            assert!(s.converged && h.converged);
            assert!(
                (s.value - h.value).abs() <= 1e-8 * s.value.max(1.0),
                "{} vs {}",
                s.value,
                h.value
            );
        }
    }

    /// `(P(r < inf), E[r 1{r < inf}])` by pushing the walk's mass from 0
    /// through `steps` steps on `env`, killing it on return and at the
    /// window edges.
    fn return_mass_oracle(env: &EnvWindow, steps: usize) -> (f64, f64) {
        let n = env.len();
        let origin = (-env.lo) as usize;
        let mut mass = vec![0.0; n];
        mass[origin] = 1.0;
        let (mut p, mut e) = (0.0, 0.0);
        for step in 1..=steps {
            let mut next = vec![0.0; n];
            for (k, &m) in mass.iter().enumerate() {
                if m == 0.0 {
                    continue;
                }
                let w = env.omega[k];
                if k + 1 < n {
                    next[k + 1] += w * m;
                }
                if k > 0 {
                    next[k - 1] += (1.0 - w) * m;
                }
            }
            let back = next[origin];
            p += back;
            e += step as f64 * back;
            next[origin] = 0.0;
            mass = next;
        }
        (p, e)
    }

    #[test]
    fn return_decomposition_matches_mass_oracle() {
        for p in [0.7, 0.9] {
            let law = EnvLaw::constant(p).unwrap();
            let env = sample_window(&law, 0, -200, 200).unwrap();
            let (pr, er) = return_mass_oracle(&env, 4000);
            let d = return_decomposition(&law, 0, 1e-15, 1 << 20).unwrap();
            assert!((d.p_return - pr).abs() < 1e-12, "{} vs {pr}", d.p_return);
            assert!(
                (d.e_return_indicator - er).abs() < 1e-10,
                "{} vs {er}",
                d.e_return_indicator
            );
            assert!((d.p_right_return - (1.0 - p) / p).abs() < 1e-12);
        }
        for seed in 0..5 {
            let law = ballistic();
            let env = sample_window(&law, seed, -300, 600).unwrap();
            let (pr, er) = return_mass_oracle(&env, 200_000);
            let d = return_decomposition(&law, seed, 1e-15, 1 << 20).unwrap();
            assert!((d.p_return - pr).abs() < 1e-9, "{} vs {pr}", d.p_return);
            assert!(
                (d.e_return_indicator - er).abs() < 1e-7 * er,
                "{} vs {er}",
                d.e_return_indicator
            );
        }
    }

    /// Solves `-(1-w_k) u_{k-1} + u_k - w_k u_{k+1} = rhs_k` with zero
    /// boundary values by forward elimination.
    fn solve_birth_death(omegas: &[f64], rhs: &[f64]) -> Vec<f64> {
        let n = omegas.len();
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        for k in 0..n {
            let a = -(1.0 - omegas[k]);
            let (cp, dp) = if k == 0 {
                (0.0, 0.0)
            } else {
                (c[k - 1], d[k - 1])
            };
            let denom = 1.0 - a * cp;
            c[k] = -omegas[k] / denom;
            d[k] = (rhs[k] - a * dp) / denom;
        }
        let mut u = vec![0.0; n];
        for k in (0..n).rev() {
            u[k] = d[k] - if k + 1 < n { c[k] * u[k + 1] } else { 0.0 };
        }
        u
    }

    /// `(P^x(T_a < T_b), E^x[T_a 1{T_a < T_b}])` for every interior `x`.
    fn killed_hit_oracle(env: &EnvWindow, a: i64, b: i64) -> (Vec<f64>, Vec<f64>) {
        let lo = (a + 1 - env.lo) as usize;
        let hi = (b - 1 - env.lo) as usize;
        let omegas = &env.omega[lo..=hi];
        let n = omegas.len();
        // The a-side boundary value 1 enters the first row.
        let mut rhs = vec![0.0; n];
        rhs[0] = 1.0 - omegas[0];
        let h = solve_birth_death(omegas, &rhs);
        let u = solve_birth_death(omegas, &h);
        (h, u)
    }

    #[test]
    fn return_decomposition_matches_linear_oracle_on_traps() {
        let law = sub_ballistic();
        for seed in 0..10 {
            let env = sample_window(&law, seed, -400, 1200).unwrap();
            let (h_right, u_right) = killed_hit_oracle(&env, 0, 1200);
            // Mirror the left side so the target 0 is the left boundary.
            let mirrored: Vec<f64> = env.omega[..=400].iter().rev().map(|w| 1.0 - w).collect();
            let left = EnvWindow {
                lo: 0,
                omega: mirrored,
                law: law.clone(),
                seed,
            };
            let (h_left, u_left) = killed_hit_oracle(&left, 0, 400);
            let w0 = env.omega[400];
            let pr = (1.0 - w0) * h_left[0] + w0 * h_right[0];
            let er = pr + (1.0 - w0) * u_left[0] + w0 * u_right[0];
            let d = return_decomposition(&law, seed, 1e-15, 1 << 20).unwrap();
            assert!((d.p_return - pr).abs() < 1e-12, "{} vs {pr}", d.p_return);
            assert!(
                (d.e_return_indicator - er).abs() < 1e-9 * er,
                "{} vs {er}",
                d.e_return_indicator
            );
        }
    }

    #[test]
    fn return_decomposition_identities() {
        let law = sub_ballistic();
        for seed in 0..100 {
            let d = return_decomposition(&law, seed, 1e-14, 1 << 20).unwrap();
            assert!(d.converged);
            let rebuilt = d.p_return
                + (1.0 - d.omega0) * d.e_left_hit
                + d.omega0 * d.p_right_return * d.e_cond_right;
            assert!((rebuilt - d.e_return_indicator).abs() <= 1e-12 * rebuilt);
            assert!((d.p_return - (1.0 - d.omega0 + d.omega0 * d.p_right_return)).abs() < 1e-15);
            assert!(d.p_right_return > 0.0 && d.p_right_return < 1.0);
            assert!(d.e_return_given_return >= 2.0);
            assert!(d.e_left_hit >= 1.0 && d.e_cond_right >= 1.0);
        }
    }

    #[test]
    fn speed_and_et1_examples() {
        for p in [0.55, 0.7, 0.9] {
            let (v, e) = speed_and_et1(&EnvLaw::constant(p).unwrap()).unwrap();
            assert!((v - (2.0 * p - 1.0)).abs() < 1e-14);
            assert!((v * e - 1.0).abs() < 1e-12);
        }
        let a = EnvLaw::discrete(vec![(0.5, 0.8), (0.5, 0.6)]).unwrap();
        let (v, e) = speed_and_et1(&a).unwrap();
        assert!((v - 13.0 / 35.0).abs() < 1e-14 && (e - 35.0 / 13.0).abs() < 1e-13);
        let (v, e) = speed_and_et1(&sub_ballistic()).unwrap();
        assert_eq!(v, 0.0);
        assert!(e.is_infinite());
    }
}
