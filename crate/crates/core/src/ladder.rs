//! Negative-drift random walks `S_n = xi_1 + ... + xi_n` with finitely
//! supported increments: exponential tilting, level-crossing probabilities,
//! lattice overshoot and the pre-drop functional `phi(t)`.
//!
//! On a lattice `a Z` paths are simulated in integer units of `a`, so level
//! comparisons are exact.

use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::env::EnvLaw;
use crate::error::{Error, Result};
use crate::rng::{self, tag};
use crate::roots;
use crate::stats::{par_map, Estimate};

/// Tolerance for lattice membership of a support point.
pub const LATTICE_TOL: f64 = 1e-9;
/// Default censoring level for the naive level-crossing estimator.
pub const DEFAULT_CENSOR_EPS: f64 = 1e-12;

/// Finitely supported increment law.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct StepLaw {
    /// `(weight, value)` pairs.
    pub support: Vec<(f64, f64)>,
    /// Span `a` when every value lies in `a Z`.
    pub lattice: Option<f64>,
}

fn real_gcd(mut a: f64, mut b: f64, tol: f64) -> f64 {
    a = a.abs();
    b = b.abs();
    if a < b {
        std::mem::swap(&mut a, &mut b);
    }
    while b > tol {
        let r = a % b;
        a = b;
        b = if r > b - tol { 0.0 } else { r };
    }
    a
}

impl StepLaw {
    /// Validates weights. The lattice span is not set.
    pub fn new(support: Vec<(f64, f64)>) -> Result<Self> {
        if support.is_empty() {
            return Err(Error::InvalidStepLaw("empty support".into()));
        }
        for &(w, v) in &support {
            if !(w > 0.0) || !w.is_finite() || !v.is_finite() {
                return Err(Error::InvalidStepLaw(format!("bad atom {w}@{v}")));
            }
        }
        let total: f64 = support.iter().map(|s| s.0).sum();
        if (total - 1.0).abs() > crate::env::WEIGHT_TOL {
            return Err(Error::InvalidStepLaw(format!(
                "weights sum to {total}, not 1"
            )));
        }
        Ok(StepLaw {
            support,
            lattice: None,
        })
    }

    /// Sets the span `a`, checking that every value is an integer multiple.
    pub fn with_lattice(mut self, a: f64) -> Result<Self> {
        if !(a > 0.0) {
            return Err(Error::InvalidStepLaw(format!(
                "lattice span {a} must be positive"
            )));
        }
        for &(_, v) in &self.support {
            let q = v / a;
            if (q - q.round()).abs() > LATTICE_TOL {
                return Err(Error::InvalidStepLaw(format!(
                    "value {v} is not a multiple of {a}"
                )));
            }
        }
        self.lattice = Some(a);
        Ok(self)
    }

    /// Span derived from the real gcd of the support, if it is a lattice.
    pub fn detect_lattice(&self) -> Option<f64> {
        let scale = self.support.iter().map(|s| s.1.abs()).fold(0.0, f64::max);
        if scale == 0.0 {
            return None;
        }
        let tol = LATTICE_TOL * scale;
        let a = self
            .support
            .iter()
            .map(|s| s.1)
            .filter(|v| v.abs() > tol)
            .fold(0.0, |g, v| {
                if g == 0.0 {
                    v.abs()
                } else {
                    real_gcd(g, v, tol)
                }
            });
        if a <= tol {
            return None;
        }
        let ok = self.support.iter().all(|&(_, v)| {
            let q = v / a;
            (q - q.round()).abs() <= LATTICE_TOL
        });
        ok.then_some(a)
    }

    /// `new` followed by lattice detection.
    pub fn detected(support: Vec<(f64, f64)>) -> Result<Self> {
        let law = StepLaw::new(support)?;
        match law.detect_lattice() {
            Some(a) => law.with_lattice(a),
            None => Ok(law),
        }
    }

    /// Law of `log rho_0` for a finitely supported environment law.
    pub fn from_log_rho(law: &EnvLaw) -> Result<Self> {
        let atoms = law
            .rho_atoms()
            .ok_or_else(|| Error::InvalidStepLaw("log-rho law needs finite support".into()))?;
        StepLaw::detected(atoms.into_iter().map(|(w, r)| (w, r.ln())).collect())
    }

    pub fn mean(&self) -> f64 {
        self.support.iter().map(|&(w, v)| w * v).sum()
    }

    /// `E[exp(u xi)]`.
    pub fn mgf(&self, u: f64) -> f64 {
        self.support.iter().map(|&(w, v)| w * (u * v).exp()).sum()
    }

    fn scale(&self) -> f64 {
        self.lattice.unwrap_or(1.0)
    }

    fn unit_values(&self) -> Vec<f64> {
        match self.lattice {
            Some(a) => self.support.iter().map(|s| (s.1 / a).round()).collect(),
            None => self.support.iter().map(|s| s.1).collect(),
        }
    }

    /// Level `t` in simulation units, rounded to the lattice when `t` is a
    /// multiple of the span and rounded up otherwise.
    fn level_units(&self, t: f64) -> f64 {
        match self.lattice {
            Some(a) => {
                let q = t / a;
                if (q - q.round()).abs() <= LATTICE_TOL {
                    q.round()
                } else {
                    q.ceil()
                }
            }
            None => t,
        }
    }
}

impl fmt::Display for StepLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = if self.lattice.is_some() {
            "lattice"
        } else {
            "real"
        };
        let parts: Vec<String> = self
            .support
            .iter()
            .map(|&(w, v)| format!("{w:?}@{v:?}"))
            .collect();
        write!(f, "{kind}:{}", parts.join(","))
    }
}

fn parse_atoms(rest: &str) -> Result<Vec<(f64, f64)>> {
    rest.split(',')
        .map(|atom| {
            let (w, v) = atom
                .split_once('@')
                .ok_or_else(|| Error::InvalidStepLaw(format!("atom '{atom}' lacks '@'")))?;
            let num = |s: &str| {
                crate::env::parse_real(s)
                    .ok_or_else(|| Error::InvalidStepLaw(format!("not a number: '{s}'")))
            };
            Ok((num(w)?, num(v)?))
        })
        .collect()
}

impl FromStr for StepLaw {
    type Err = Error;

    /// Grammar: `lattice:w@v,...` (span detected, must exist),
    /// `real:w@v,...` (no span), `logrho:<environment law>`.
    fn from_str(s: &str) -> Result<Self> {
        let (kind, rest) = s
            .trim()
            .split_once(':')
            .ok_or_else(|| Error::InvalidStepLaw(format!("missing ':' in '{s}'")))?;
        match kind.trim() {
            "lattice" => {
                let law = StepLaw::detected(parse_atoms(rest)?)?;
                if law.lattice.is_none() {
                    return Err(Error::NotLattice);
                }
                Ok(law)
            }
            "real" => StepLaw::new(parse_atoms(rest)?),
            "logrho" => StepLaw::from_log_rho(
                &rest
                    .parse::<EnvLaw>()
                    .map_err(|e| Error::InvalidStepLaw(format!("bad environment law: {e}")))?,
            ),
            other => Err(Error::InvalidStepLaw(format!(
                "unknown step kind '{other}'"
            ))),
        }
    }
}

impl TryFrom<String> for StepLaw {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<StepLaw> for String {
    fn from(law: StepLaw) -> String {
        law.to_string()
    }
}

/// Increment law reweighted by `exp(gamma xi)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TiltedLaw {
    pub base: StepLaw,
    pub gamma: f64,
    pub q_weights: Vec<f64>,
}

impl TiltedLaw {
    pub fn mean(&self) -> f64 {
        self.q_weights
            .iter()
            .zip(&self.base.support)
            .map(|(q, s)| q * s.1)
            .sum()
    }

    pub fn weight_sum(&self) -> f64 {
        self.q_weights.iter().sum()
    }
}

/// Positive root of `E[exp(gamma xi)] = 1`.
pub fn gamma_root(step: &StepLaw, tol: f64) -> Result<f64> {
    let mean = step.mean();
    if !(mean < 0.0) {
        return Err(Error::NonNegativeStepMean { mean });
    }
    if !step.support.iter().any(|s| s.1 > 0.0) {
        return Err(Error::NoPositiveSupport);
    }
    let gamma = roots::unit_crossing(|u| step.mgf(u), tol, roots::DEFAULT_CAP).ok_or(
        Error::RootBeyondCap {
            cap: roots::DEFAULT_CAP,
        },
    )?;
    let half = step.mgf(gamma / 2.0);
    if !(half < 1.0) {
        return Err(Error::ConvexityCheck { value: half });
    }
    Ok(gamma)
}

/// `q_i = p_i exp(gamma x_i)`.
pub fn tilt(step: &StepLaw, gamma: f64) -> Result<TiltedLaw> {
    let q_weights: Vec<f64> = step
        .support
        .iter()
        .map(|&(w, v)| w * (gamma * v).exp())
        .collect();
    let sum: f64 = q_weights.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::BadTilt { sum });
    }
    Ok(TiltedLaw {
        base: step.clone(),
        gamma,
        q_weights,
    })
}

/// Draws increments (in simulation units) from a weight vector.
#[derive(Debug, Clone)]
struct Sampler {
    cumulative: Vec<f64>,
    values: Vec<f64>,
}

impl Sampler {
    fn new(weights: &[f64], values: Vec<f64>) -> Self {
        let total: f64 = weights.iter().sum();
        let mut acc = 0.0;
        let cumulative = weights
            .iter()
            .map(|w| {
                acc += w / total;
                acc
            })
            .collect();
        Sampler { cumulative, values }
    }

    #[inline]
    fn draw<R: Rng>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.random();
        for (c, v) in self.cumulative.iter().zip(&self.values) {
            if u < *c {
                return *v;
            }
        }
        self.values[self.values.len() - 1]
    }
}

/// Level-crossing estimator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SupMethod {
    /// Simulate under the tilted law until the level is crossed and average
    /// `exp(-gamma S_tau)`.
    Importance,
    /// Simulate under the base law with certified censoring far below 0.
    Naive,
}

/// First crossing of `level` (units) under `sampler`; returns `(S_tau, tau)`.
#[inline]
fn run_to_level<R: Rng>(sampler: &Sampler, level: f64, rng: &mut R) -> (f64, u64) {
    let mut s = 0.0;
    let mut n = 0u64;
    loop {
        s += sampler.draw(rng);
        n += 1;
        if s >= level {
            return (s, n);
        }
    }
}

/// Estimate of `P(sup_{n>=1} S_n >= t)`.
pub fn sup_tail(
    step: &StepLaw,
    t: f64,
    n: usize,
    method: SupMethod,
    seed: u64,
    workers: usize,
) -> Result<Estimate> {
    sup_tail_censored(step, t, n, method, seed, workers, DEFAULT_CENSOR_EPS)
}

/// [`sup_tail`] with an explicit censoring level for the naive method.
///
/// A naive path is abandoned on reaching `-m` with
/// `exp(-gamma (t + m)) < censor_eps`; from there the chance of still
/// crossing `t` is below `censor_eps`, which is reported as `error_budget`.
pub fn sup_tail_censored(
    step: &StepLaw,
    t: f64,
    n: usize,
    method: SupMethod,
    seed: u64,
    workers: usize,
    censor_eps: f64,
) -> Result<Estimate> {
    let gamma = gamma_root(step, 0.0)?;
    let scale = step.scale();
    let level = step.level_units(t);
    let samples: Vec<f64> = match method {
        SupMethod::Importance => {
            let q = tilt(step, gamma)?;
            let sampler = Sampler::new(&q.q_weights, step.unit_values());
            par_map(n, workers, |i| {
                let mut rng = rng::stream(seed, tag::PATH, i as u64);
                let (s, _) = run_to_level(&sampler, level, &mut rng);
                (-gamma * s * scale).exp()
            })
        }
        SupMethod::Naive => {
            let weights: Vec<f64> = step.support.iter().map(|s| s.0).collect();
            let sampler = Sampler::new(&weights, step.unit_values());
            let m = ((1.0 / censor_eps).ln() / gamma - t).max(0.0);
            let floor = -m / scale;
            par_map(n, workers, |i| {
                let mut rng = rng::stream(seed, tag::PATH, i as u64);
                let mut s = 0.0;
                loop {
                    s += sampler.draw(&mut rng);
                    if s >= level {
                        return 1.0;
                    }
                    if s <= floor {
                        return 0.0;
                    }
                }
            })
        }
    };
    let mut est = Estimate::from_samples(&samples, method_name(method), seed);
    if method == SupMethod::Naive {
        est.error_budget = censor_eps;
    }
    Ok(est)
}

fn method_name(m: SupMethod) -> &'static str {
    match m {
        SupMethod::Importance => "importance",
        SupMethod::Naive => "naive",
    }
}

/// Wald identity check under the tilted law at one level:
/// `E_Q[S_tau] = E_Q[xi] E_Q[tau]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaldCheck {
    pub level: f64,
    pub mean_s_tau: Estimate,
    pub mean_tau: Estimate,
    pub q_mean_step: f64,
    /// Mean of `S_tau - E_Q[xi] tau`; zero in expectation.
    pub residual: Estimate,
}

/// Scaled level-crossing probabilities on a lattice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OvershootReport {
    pub gamma: f64,
    pub lattice: f64,
    /// `(k, exp(gamma k a) * P(sup S_n >= k a))`.
    pub rows: Vec<(i64, Estimate)>,
    /// `(overshoot in lattice units, count)` at the largest `k`.
    pub overshoot_hist: Vec<(i64, u64)>,
    pub wald: WaldCheck,
}

/// Importance-sampling estimates of `exp(gamma k a) P(sup S_n >= k a)` for
/// each `k`. Each sample equals `exp(-gamma (S_tau - k a))`, so the rows
/// stabilize at the overshoot constant.
pub fn overshoot_constant(
    step: &StepLaw,
    k_range: RangeInclusive<i64>,
    n: usize,
    seed: u64,
    workers: usize,
) -> Result<OvershootReport> {
    let a = step.lattice.ok_or(Error::NotLattice)?;
    if k_range.is_empty() || *k_range.start() < 0 {
        return Err(Error::InvalidInterval(format!("bad k range {k_range:?}")));
    }
    let gamma = gamma_root(step, 0.0)?;
    let q = tilt(step, gamma)?;
    let sampler = Sampler::new(&q.q_weights, step.unit_values());
    let k_max = *k_range.end();
    let mut rows = Vec::new();
    let mut last: Vec<(f64, u64)> = Vec::new();
    for k in k_range {
        let k_seed = rng::derive_seed(seed, tag::PATH, k as u64);
        let paths = par_map(n, workers, |i| {
            let mut rng = rng::stream(k_seed, tag::PATH, i as u64);
            run_to_level(&sampler, k as f64, &mut rng)
        });
        let samples: Vec<f64> = paths
            .iter()
            .map(|(s, _)| (-gamma * (s - k as f64) * a).exp())
            .collect();
        rows.push((
            k,
            Estimate::from_samples(&samples, "importance-scaled", k_seed),
        ));
        if k == k_max {
            last = paths;
        }
    }

    let mut hist = std::collections::BTreeMap::new();
    for (s, _) in &last {
        *hist.entry((s - k_max as f64) as i64).or_insert(0u64) += 1;
    }
    let q_mean = q.mean();
    let s_vals: Vec<f64> = last.iter().map(|(s, _)| s * a).collect();
    let tau_vals: Vec<f64> = last.iter().map(|(_, t)| *t as f64).collect();
    let resid: Vec<f64> = s_vals
        .iter()
        .zip(&tau_vals)
        .map(|(s, t)| s - q_mean * t)
        .collect();
    let k_seed = rng::derive_seed(seed, tag::PATH, k_max as u64);
    Ok(OvershootReport {
        gamma,
        lattice: a,
        rows,
        overshoot_hist: hist.into_iter().collect(),
        wald: WaldCheck {
            level: k_max as f64 * a,
            mean_s_tau: Estimate::from_samples(&s_vals, "wald-s-tau", k_seed),
            mean_tau: Estimate::from_samples(&tau_vals, "wald-tau", k_seed),
            q_mean_step: q_mean,
            residual: Estimate::from_samples(&resid, "wald-residual", k_seed),
        },
    })
}

/// Estimate of `phi(t) = E[sum_{n=0}^{nu(t)-1} exp(-S_n)]` with
/// `nu(t) = inf{n >= 1 : S_n <= -t}`.
pub fn phi_estimate(
    step: &StepLaw,
    t: f64,
    n: usize,
    seed: u64,
    workers: usize,
) -> Result<Estimate> {
    let mean = step.mean();
    if !(mean < 0.0) {
        return Err(Error::NonNegativeStepMean { mean });
    }
    let weights: Vec<f64> = step.support.iter().map(|s| s.0).collect();
    let sampler = Sampler::new(&weights, step.unit_values());
    let scale = step.scale();
    let samples = par_map(n, workers, |i| {
        let mut rng = rng::stream(seed, tag::PATH, i as u64);
        let mut s = 0.0;
        let mut total = 1.0;
        loop {
            s += sampler.draw(&mut rng);
            if s * scale <= -t {
                return total;
            }
            total += (-s * scale).exp();
        }
    });
    Ok(Estimate::from_samples(&samples, "phi", seed))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn skip_free() -> StepLaw {
        "lattice:0.3@1,0.7@-1".parse().unwrap()
    }

    fn golden_steps() -> StepLaw {
        StepLaw::from_log_rho(&EnvLaw::discrete(vec![(0.5, 0.8), (0.5, 1.0 / 3.0)]).unwrap())
            .unwrap()
    }

    #[test]
    fn lattice_detection() {
        assert_eq!(skip_free().lattice, Some(1.0));
        let f = golden_steps();
        assert!((f.lattice.unwrap() - 2f64.ln()).abs() < 1e-12);
        assert_eq!(f.unit_values(), vec![-2.0, 1.0]);
        let irr = StepLaw::detected(vec![(0.5, 1.0), (0.5, -2f64.sqrt())]).unwrap();
        assert_eq!(irr.lattice, None);
        assert!("lattice:0.5@1,0.5@-1.4142135623730951"
            .parse::<StepLaw>()
            .is_err());
        assert!(StepLaw::new(vec![(0.5, 1.0)]).is_err());
        assert!(skip_free().with_lattice(0.7).is_err());
    }

    #[test]
    fn grammar_round_trip() {
        for law in [skip_free(), golden_steps()] {
            let back: StepLaw = law.to_string().parse().unwrap();
            assert_eq!(back, law);
        }
    }

    #[test]
    fn gamma_examples() {
        let g = gamma_root(&skip_free(), 0.0).unwrap();
        assert!((g - (7.0f64 / 3.0).ln()).abs() < 1e-12);
        let g = gamma_root(&golden_steps(), 0.0).unwrap();
        let golden = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((g - golden.log2()).abs() < 1e-9);
        let down = StepLaw::new(vec![(1.0, -1.0)]).unwrap();
        assert_eq!(gamma_root(&down, 1e-12), Err(Error::NoPositiveSupport));
        let up = StepLaw::new(vec![(0.6, 1.0), (0.4, -1.0)]).unwrap();
        assert!(matches!(
            gamma_root(&up, 1e-12),
            Err(Error::NonNegativeStepMean { .. })
        ));
    }

    #[test]
    fn tilt_examples() {
        let law = skip_free();
        let g = gamma_root(&law, 0.0).unwrap();
        let q = tilt(&law, g).unwrap();
        assert!((q.q_weights[0] - 0.7).abs() < 1e-12);
        assert!((q.weight_sum() - 1.0).abs() < 1e-12);
        assert!((q.mean() - 0.4).abs() < 1e-12);
        let id = tilt(&law, 0.0).unwrap();
        assert_eq!(id.q_weights, vec![0.3, 0.7]);
        assert!(matches!(tilt(&law, 0.5), Err(Error::BadTilt { .. })));
    }

    #[test]
    fn importance_is_exact_for_skip_free() {
        let est = sup_tail(&skip_free(), 10.0, 1000, SupMethod::Importance, 3, 2).unwrap();
        assert!((est.value - (3.0f64 / 7.0).powi(10)).abs() < 1e-16);
        assert!(est.std_error < 1e-18);
    }

    #[test]
    fn sup_tail_monotone_under_common_numbers() {
        let law = golden_steps();
        let mut prev = f64::INFINITY;
        for k in 0..8 {
            let t = k as f64 * 0.5;
            let e = sup_tail(&law, t, 2000, SupMethod::Importance, 11, 2).unwrap();
            assert!(e.value <= prev);
            prev = e.value;
        }
    }

    #[test]
    fn naive_agrees_with_importance_small() {
        let law = skip_free();
        let a = sup_tail(&law, 2.0, 100_000, SupMethod::Naive, 5, 4).unwrap();
        let b = sup_tail(&law, 2.0, 1000, SupMethod::Importance, 5, 4).unwrap();
        assert!(a.agrees_with(&b, 3.0), "{a:?} {b:?}");
        assert_eq!(a.error_budget, DEFAULT_CENSOR_EPS);
    }

    #[test]
    fn overshoot_rejects_non_lattice() {
        let irr = StepLaw::detected(vec![(0.5, 1.0), (0.5, -2f64.sqrt())]).unwrap();
        assert_eq!(
            overshoot_constant(&irr, 1..=2, 10, 0, 1).unwrap_err(),
            Error::NotLattice
        );
    }

    #[test]
    fn overshoot_skip_free_is_one() {
        let r = overshoot_constant(&skip_free(), 1..=5, 500, 0, 2).unwrap();
        for (_, e) in &r.rows {
            assert_eq!(e.value, 1.0);
            assert_eq!(e.std_error, 0.0);
        }
        assert_eq!(r.overshoot_hist, vec![(0, 500)]);
    }

    #[test]
    fn overshoot_with_jumps_stabilizes() {
        // Upward jumps of 1 or 2 units produce a genuine overshoot.
        let law: StepLaw = "lattice:0.2@1,0.15@2,0.65@-1".parse().unwrap();
        let r = overshoot_constant(&law, 8..=12, 20_000, 4, 4).unwrap();
        let vals: Vec<&Estimate> = r.rows.iter().map(|(_, e)| e).collect();
        for e in &vals {
            assert!(e.value < 1.0 && e.value > 0.0);
            assert!(e.agrees_with(vals[0], 4.0));
        }
        assert!(r.overshoot_hist.len() == 2);
        assert!(r.wald.residual.within(0.0, 4.0, 0.0));
    }

    #[test]
    fn phi_is_deterministic_and_at_least_one() {
        let law = skip_free();
        let a = phi_estimate(&law, 0.0, 10_000, 1, 2).unwrap();
        let b = phi_estimate(&law, 0.0, 10_000, 1, 3).unwrap();
        assert_eq!(a, b);
        assert!(a.value >= 1.0);
    }

    #[test]
    fn phi_zero_matches_green_function() {
        // For the +-1 walk, phi(0) = 1 + p * sum_j G(1, j) e^-j where G(1, j)
        // counts visits to j before hitting 0 from 1. G is obtained by
        // pushing mass through a truncated chain.
        let (p, q) = (0.3f64, 0.7f64);
        let top = 200usize;
        let mut visits = vec![0.0; top];
        let mut mass = vec![0.0; top];
        mass[1] = 1.0;
        for _ in 0..5_000 {
            let mut next = vec![0.0; top];
            for j in 1..top {
                visits[j] += mass[j];
                if j + 1 < top {
                    next[j + 1] += p * mass[j];
                }
                if j > 1 {
                    next[j - 1] += q * mass[j];
                }
            }
            mass = next;
        }
        let phi0 = 1.0
            + p * (1..top)
                .map(|j| visits[j] * (-(j as f64)).exp())
                .sum::<f64>();
        let e = phi_estimate(&skip_free(), 0.0, 200_000, 9, 4).unwrap();
        assert!(e.within(phi0, 4.0, 0.0), "{} vs {phi0}", e.value);
    }
}
