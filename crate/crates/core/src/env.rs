//! Environment laws, their moment functionals, regime classification and
//! reproducible environment windows.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Beta as BetaDist, Distribution};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::{digamma, ln_gamma};

use crate::error::{Error, Result};
use crate::rng;
use crate::roots;

/// Tolerance on weight normalization.
pub const WEIGHT_TOL: f64 = 1e-12;
/// Absolute tolerance for detecting `E[rho] = 1` (and `E[log rho] = 0`).
pub const BOUNDARY_TOL: f64 = 1e-12;

/// Odds ratio `(1 - omega) / omega`.
#[inline]
pub fn rho_of(omega: f64) -> f64 {
    (1.0 - omega) / omega
}

/// I.i.d. law of a single site `omega_0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum EnvLaw {
    Constant {
        p: f64,
    },
    /// `(weight, omega)` atoms.
    Discrete {
        atoms: Vec<(f64, f64)>,
    },
    Beta {
        alpha: f64,
        beta: f64,
    },
}

fn check_omega(w: f64) -> Result<()> {
    if w > 0.0 && w < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidLaw(format!("omega {w} not in (0,1)")))
    }
}

impl EnvLaw {
    pub fn constant(p: f64) -> Result<Self> {
        check_omega(p)?;
        Ok(EnvLaw::Constant { p })
    }

    pub fn discrete(atoms: Vec<(f64, f64)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidLaw(
                "discrete law needs at least one atom".into(),
            ));
        }
        for &(w, om) in &atoms {
            if !(w > 0.0) || !w.is_finite() {
                return Err(Error::InvalidLaw(format!("weight {w} must be positive")));
            }
            check_omega(om)?;
        }
        let total: f64 = atoms.iter().map(|a| a.0).sum();
        if (total - 1.0).abs() > WEIGHT_TOL {
            return Err(Error::InvalidLaw(format!("weights sum to {total}, not 1")));
        }
        Ok(EnvLaw::Discrete { atoms })
    }

    pub fn beta(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0 && beta > 0.0) || !alpha.is_finite() || !beta.is_finite() {
            return Err(Error::InvalidLaw(format!(
                "beta parameters must be positive, got ({alpha}, {beta})"
            )));
        }
        Ok(EnvLaw::Beta { alpha, beta })
    }

    /// `(weight, rho)` atoms for finitely supported laws.
    pub fn rho_atoms(&self) -> Option<Vec<(f64, f64)>> {
        match self {
            EnvLaw::Constant { p } => Some(vec![(1.0, rho_of(*p))]),
            EnvLaw::Discrete { atoms } => {
                Some(atoms.iter().map(|&(w, o)| (w, rho_of(o))).collect())
            }
            EnvLaw::Beta { .. } => None,
        }
    }

    /// Law of `1 - omega`, i.e. the environment seen from the other side.
    pub fn mirrored(&self) -> EnvLaw {
        match self {
            EnvLaw::Constant { p } => EnvLaw::Constant { p: 1.0 - p },
            EnvLaw::Discrete { atoms } => EnvLaw::Discrete {
                atoms: atoms.iter().map(|&(w, o)| (w, 1.0 - o)).collect(),
            },
            EnvLaw::Beta { alpha, beta } => EnvLaw::Beta {
                alpha: *beta,
                beta: *alpha,
            },
        }
    }

    /// `E[rho^u]`, `+inf` when the moment diverges.
    pub fn moment_rho(&self, u: f64) -> f64 {
        match self {
            EnvLaw::Constant { p } => rho_of(*p).powf(u),
            EnvLaw::Discrete { atoms } => atoms.iter().map(|&(w, o)| w * rho_of(o).powf(u)).sum(),
            EnvLaw::Beta { alpha, beta } => {
                // rho^u = (1-w)^u w^-u, so E = B(alpha-u, beta+u) / B(alpha, beta).
                if -beta < u && u < *alpha {
                    (ln_gamma(alpha - u) + ln_gamma(beta + u) - ln_gamma(*alpha) - ln_gamma(*beta))
                        .exp()
                } else {
                    f64::INFINITY
                }
            }
        }
    }

    pub fn mean_log_rho(&self) -> f64 {
        match self {
            EnvLaw::Constant { p } => rho_of(*p).ln(),
            EnvLaw::Discrete { atoms } => atoms.iter().map(|&(w, o)| w * rho_of(o).ln()).sum(),
            EnvLaw::Beta { alpha, beta } => digamma(*beta) - digamma(*alpha),
        }
    }

    /// `E[rho log rho]`, `+inf` when infinite.
    pub fn mean_rho_log_rho(&self) -> f64 {
        match self {
            EnvLaw::Constant { p } => {
                let r = rho_of(*p);
                r * r.ln()
            }
            EnvLaw::Discrete { atoms } => atoms
                .iter()
                .map(|&(w, o)| {
                    let r = rho_of(o);
                    w * r * r.ln()
                })
                .sum(),
            EnvLaw::Beta { alpha, beta } => {
                // d/du E[rho^u] at u = 1.
                if *alpha > 1.0 {
                    self.moment_rho(1.0) * (digamma(beta + 1.0) - digamma(alpha - 1.0))
                } else {
                    f64::INFINITY
                }
            }
        }
    }

    /// One draw of `omega_0`.
    pub fn sample_omega<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            EnvLaw::Constant { p } => *p,
            EnvLaw::Discrete { atoms } => {
                let u: f64 = rng.random();
                let mut acc = 0.0;
                for &(w, o) in atoms {
                    acc += w;
                    if u < acc {
                        return o;
                    }
                }
                atoms[atoms.len() - 1].1
            }
            EnvLaw::Beta { alpha, beta } => {
                let d = BetaDist::new(*alpha, *beta).expect("validated beta parameters");
                loop {
                    let w: f64 = d.sample(rng);
                    if w > 0.0 && w < 1.0 {
                        return w;
                    }
                }
            }
        }
    }

    /// `omega_x` of the environment keyed by `seed`.
    #[inline]
    pub fn site_omega(&self, seed: u64, x: i64) -> f64 {
        match self {
            EnvLaw::Constant { p } => *p,
            _ => self.sample_omega(&mut rng::site_rng(seed, x)),
        }
    }

    /// `exp(E[log rho] / 2)`: heuristic decay ratio of `Pi_{i,k}` as `k`
    /// grows, used for series remainder bounds.
    pub fn decay_ratio(&self) -> f64 {
        (self.mean_log_rho() / 2.0).exp()
    }
}

fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

impl fmt::Display for EnvLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EnvLaw::Constant { p } => write!(f, "constant:{}", fmt_f64(*p)),
            EnvLaw::Discrete { atoms } => {
                let parts: Vec<String> = atoms
                    .iter()
                    .map(|&(w, o)| format!("{}@{}", fmt_f64(w), fmt_f64(o)))
                    .collect();
                write!(f, "discrete:{}", parts.join(","))
            }
            EnvLaw::Beta { alpha, beta } => {
                write!(f, "beta:{},{}", fmt_f64(*alpha), fmt_f64(*beta))
            }
        }
    }
}

/// A decimal or a fraction `a/b`, so that values like 1/3 are exact.
pub(crate) fn parse_real(s: &str) -> Option<f64> {
    match s.split_once('/') {
        Some((a, b)) => Some(a.trim().parse::<f64>().ok()? / b.trim().parse::<f64>().ok()?),
        None => s.trim().parse::<f64>().ok(),
    }
}

fn parse_num(s: &str) -> Result<f64> {
    parse_real(s).ok_or_else(|| Error::InvalidLaw(format!("not a number: '{s}'")))
}

impl FromStr for EnvLaw {
    type Err = Error;

    /// Grammar: `constant:p`, `discrete:w1@o1,w2@o2,...`, `beta:a,b`.
    fn from_str(s: &str) -> Result<Self> {
        let (kind, rest) = s
            .trim()
            .split_once(':')
            .ok_or_else(|| Error::InvalidLaw(format!("missing ':' in '{s}'")))?;
        match kind.trim() {
            "constant" => EnvLaw::constant(parse_num(rest)?),
            "discrete" => {
                let atoms = rest
                    .split(',')
                    .map(|atom| {
                        let (w, o) = atom
                            .split_once('@')
                            .ok_or_else(|| Error::InvalidLaw(format!("atom '{atom}' lacks '@'")))?;
                        Ok((parse_num(w)?, parse_num(o)?))
                    })
                    .collect::<Result<Vec<_>>>()?;
                EnvLaw::discrete(atoms)
            }
            "beta" => {
                let (a, b) = rest
                    .split_once(',')
                    .ok_or_else(|| Error::InvalidLaw("beta needs 'alpha,beta'".into()))?;
                EnvLaw::beta(parse_num(a)?, parse_num(b)?)
            }
            other => Err(Error::InvalidLaw(format!("unknown law kind '{other}'"))),
        }
    }
}

impl TryFrom<String> for EnvLaw {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<EnvLaw> for String {
    fn from(law: EnvLaw) -> String {
        law.to_string()
    }
}

/// `E[rho_0^u]`.
pub fn moment_rho(law: &EnvLaw, u: f64) -> f64 {
    law.moment_rho(u)
}

/// `E[log rho_0]`.
pub fn mean_log_rho(law: &EnvLaw) -> f64 {
    law.mean_log_rho()
}

/// Kesten exponent: `kappa > 0` with `E[rho^kappa] = 1`, or `None` when the
/// moment never crosses 1 below the bracket cap.
pub fn kappa_root(law: &EnvLaw, tol: f64) -> Result<Option<f64>> {
    kappa_root_capped(law, tol, roots::DEFAULT_CAP)
}

pub fn kappa_root_capped(law: &EnvLaw, tol: f64, cap: f64) -> Result<Option<f64>> {
    let mlr = law.mean_log_rho();
    if !(mlr < 0.0) {
        return Err(Error::NonNegativeDrift { mean_log_rho: mlr });
    }
    Ok(roots::unit_crossing(|u| law.moment_rho(u), tol, cap))
}

/// Direction of transience.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Right,
    Left,
    Recurrent,
}

/// Strong transience under the averaged law.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AveragedVerdict {
    Yes,
    No,
    /// `E[rho] = 1` with `E[rho log rho] = inf`: no result is known.
    BoundaryUnresolved,
    /// Recurrent walk.
    Inapplicable,
}

/// Regime of a law, computed from its moment functionals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeReport {
    #[serde(with = "ext_real")]
    pub mean_log_rho: f64,
    #[serde(with = "ext_real")]
    pub mean_rho: f64,
    #[serde(with = "ext_real")]
    pub mean_inv_rho: f64,
    pub direction: Direction,
    pub speed: f64,
    pub ballistic: bool,
    /// False only for recurrent laws, where the notion does not apply.
    pub quenched_strongly_transient: bool,
    pub averaged_strongly_transient: AveragedVerdict,
    pub kappa: Option<f64>,
    pub rho_log_rho_finite: Option<bool>,
}

/// Serializes non-finite reals as the strings `"inf"`, `"-inf"`, `"nan"`.
pub mod ext_real {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            s.serialize_f64(*x)
        } else if x.is_nan() {
            s.serialize_str("nan")
        } else if *x > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Str(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(x) => Ok(x),
            Repr::Str(s) => match s.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                _ => Err(serde::de::Error::custom(format!("bad extended real '{s}'"))),
            },
        }
    }
}

#[inline]
fn below_one(m: f64) -> bool {
    m < 1.0 - BOUNDARY_TOL
}

#[inline]
fn at_one(m: f64) -> bool {
    (m - 1.0).abs() <= BOUNDARY_TOL
}

/// Limiting speed from `E[rho]` and `E[1/rho]`.
pub fn speed_from_moments(mean_rho: f64, mean_inv_rho: f64) -> f64 {
    if below_one(mean_rho) {
        (1.0 - mean_rho) / (1.0 + mean_rho)
    } else if below_one(mean_inv_rho) {
        -(1.0 - mean_inv_rho) / (1.0 + mean_inv_rho)
    } else {
        0.0
    }
}

fn averaged_verdict(law_toward: &EnvLaw) -> (AveragedVerdict, Option<bool>) {
    let m = law_toward.moment_rho(1.0);
    if below_one(m) {
        (AveragedVerdict::Yes, None)
    } else if at_one(m) {
        let finite = law_toward.mean_rho_log_rho().is_finite();
        if finite {
            (AveragedVerdict::No, Some(true))
        } else {
            (AveragedVerdict::BoundaryUnresolved, Some(false))
        }
    } else {
        (AveragedVerdict::No, None)
    }
}

/// Classifies a law as recurrent, transient, ballistic, and strongly or
/// weakly transient under the averaged law.
pub fn classify_regime(law: &EnvLaw) -> Result<RegimeReport> {
    let mlr = law.mean_log_rho();
    if !mlr.is_finite() {
        return Err(Error::InvalidLaw(format!(
            "E[log rho] = {mlr} is not finite"
        )));
    }
    let mean_rho = law.moment_rho(1.0);
    let mean_inv_rho = law.moment_rho(-1.0);
    let speed = speed_from_moments(mean_rho, mean_inv_rho);
    let direction = if mlr.abs() <= BOUNDARY_TOL {
        Direction::Recurrent
    } else if mlr < 0.0 {
        Direction::Right
    } else {
        Direction::Left
    };
    let (averaged, boundary, kappa) = match direction {
        Direction::Recurrent => (AveragedVerdict::Inapplicable, None, None),
        Direction::Right => {
            let (v, b) = averaged_verdict(law);
            (v, b, kappa_root(law, 1e-12)?)
        }
        Direction::Left => {
            let mirror = law.mirrored();
            let (v, b) = averaged_verdict(&mirror);
            (v, b, kappa_root(&mirror, 1e-12)?)
        }
    };
    Ok(RegimeReport {
        mean_log_rho: mlr,
        mean_rho,
        mean_inv_rho,
        direction,
        speed,
        ballistic: speed != 0.0,
        quenched_strongly_transient: direction != Direction::Recurrent,
        averaged_strongly_transient: averaged,
        kappa,
        rho_log_rho_finite: boundary,
    })
}

/// Read access to `omega_x`. Returns `None` outside the realized region.
pub trait Environment {
    fn omega(&self, x: i64) -> Option<f64>;

    #[inline]
    fn rho(&self, x: i64) -> Option<f64> {
        self.omega(x).map(rho_of)
    }
}

/// The whole-line environment of `law` keyed by `seed`, realized lazily.
#[derive(Debug, Clone, PartialEq)]
pub struct KeyedEnv<'a> {
    pub law: &'a EnvLaw,
    pub seed: u64,
}

impl<'a> KeyedEnv<'a> {
    pub fn new(law: &'a EnvLaw, seed: u64) -> Self {
        KeyedEnv { law, seed }
    }
}

impl Environment for KeyedEnv<'_> {
    #[inline]
    fn omega(&self, x: i64) -> Option<f64> {
        Some(self.law.site_omega(self.seed, x))
    }
}

/// A realized environment on `[lo, hi]`.
///
/// `law` and `seed` record provenance. Windows produced by the conditioning
/// transform keep the base law although their sites are no longer i.i.d.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvWindow {
    pub lo: i64,
    pub omega: Vec<f64>,
    pub law: EnvLaw,
    pub seed: u64,
}

impl EnvWindow {
    pub fn hi(&self) -> i64 {
        self.lo + self.omega.len() as i64 - 1
    }

    pub fn len(&self) -> usize {
        self.omega.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omega.is_empty()
    }

    pub fn contains(&self, x: i64) -> bool {
        x >= self.lo && x <= self.hi()
    }

    /// `omega_x`, or an error outside the window.
    pub fn at(&self, x: i64) -> Result<f64> {
        self.omega(x).ok_or(Error::OutOfWindow {
            site: x,
            lo: self.lo,
            hi: self.hi(),
        })
    }
}

impl Environment for EnvWindow {
    #[inline]
    fn omega(&self, x: i64) -> Option<f64> {
        if x < self.lo {
            return None;
        }
        self.omega.get((x - self.lo) as usize).copied()
    }
}

/// Realizes `omega_x` for `x` in `[lo, hi]`. Each site is drawn from its own
/// stream keyed by `(seed, x)`, so overlapping windows agree site by site.
pub fn sample_window(law: &EnvLaw, seed: u64, lo: i64, hi: i64) -> Result<EnvWindow> {
    if lo > hi {
        return Err(Error::InvalidInterval(format!("lo {lo} > hi {hi}")));
    }
    let omega = (lo..=hi).map(|x| law.site_omega(seed, x)).collect();
    Ok(EnvWindow {
        lo,
        omega,
        law: law.clone(),
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ballistic() -> EnvLaw {
        EnvLaw::discrete(vec![(0.5, 0.8), (0.5, 0.6)]).unwrap()
    }
    fn sub_ballistic() -> EnvLaw {
        EnvLaw::discrete(vec![(0.5, 0.75), (0.5, 1.0 / 3.0)]).unwrap()
    }
    fn kappa_one() -> EnvLaw {
        EnvLaw::discrete(vec![(0.5, 2.0 / 3.0), (0.5, 0.4)]).unwrap()
    }
    fn golden() -> EnvLaw {
        EnvLaw::discrete(vec![(0.5, 0.8), (0.5, 1.0 / 3.0)]).unwrap()
    }

    #[test]
    fn moment_examples() {
        let c = EnvLaw::constant(0.7).unwrap();
        assert!((c.moment_rho(1.0) - 3.0 / 7.0).abs() < 1e-15);
        assert!((sub_ballistic().moment_rho(1.0) - 7.0 / 6.0).abs() < 1e-15);
        let b = EnvLaw::beta(5.0, 2.0).unwrap();
        assert!((b.moment_rho(1.0) - 0.5).abs() < 1e-13);
        assert_eq!(b.moment_rho(5.0), f64::INFINITY);
        assert_eq!(b.moment_rho(-2.0), f64::INFINITY);
    }

    #[test]
    fn beta_moment_matches_quadrature() {
        // Midpoint rule on E[rho^u] = int (1-w)^u w^-u f(w) dw, Beta(5,2).
        let b = EnvLaw::beta(5.0, 2.0).unwrap();
        for &u in &[0.5, 1.0, 2.5, -1.0] {
            let n = 200_000;
            let norm = 30.0; // 1 / B(5,2)
            let h = 1.0 / n as f64;
            let q: f64 = (0..n)
                .map(|i| {
                    let w = (i as f64 + 0.5) * h;
                    ((1.0 - w) / w).powf(u) * norm * w.powi(4) * (1.0 - w)
                })
                .sum::<f64>()
                * h;
            assert!(
                (b.moment_rho(u) - q).abs() < 1e-6,
                "u={u}: {} vs {q}",
                b.moment_rho(u)
            );
        }
    }

    #[test]
    fn mean_log_rho_examples() {
        assert_eq!(EnvLaw::constant(0.5).unwrap().mean_log_rho(), 0.0);
        assert!((sub_ballistic().mean_log_rho() - 0.5 * (2.0f64 / 3.0).ln()).abs() < 1e-15);
        let b = EnvLaw::beta(5.0, 2.0).unwrap();
        assert!((b.mean_log_rho() + 13.0 / 12.0).abs() < 1e-12);
    }

    #[test]
    fn kappa_examples() {
        // Oracle for sub-ballistic law: plain bisection on (3^-k + 2^k)/2 = 1.
        let (mut lo, mut hi) = (0.1f64, 1.0f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if 0.5 * (3f64.powf(-mid) + 2f64.powf(mid)) > 1.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let k = kappa_root(&sub_ballistic(), 1e-13).unwrap().unwrap();
        assert!((k - lo).abs() < 1e-9);
        assert!((k - 0.524).abs() <= 0.001);

        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let k = kappa_root(&golden(), 1e-13).unwrap().unwrap();
        assert!((k - phi.log2()).abs() < 1e-9);

        let k = kappa_root(&EnvLaw::beta(5.0, 2.0).unwrap(), 1e-13)
            .unwrap()
            .unwrap();
        assert!((k - 3.0).abs() < 1e-9);

        assert_eq!(kappa_root(&ballistic(), 1e-12).unwrap(), None);
        assert!(kappa_root(&EnvLaw::constant(0.5).unwrap(), 1e-12).is_err());
        assert!(kappa_root(&EnvLaw::constant(0.3).unwrap(), 1e-12).is_err());
    }

    #[test]
    fn kappa_for_beta_near_pole() {
        // alpha = 1.5: moment explodes at u = 1.5, root must lie below it.
        let law = EnvLaw::beta(1.5, 0.5).unwrap();
        if law.mean_log_rho() < 0.0 {
            let k = kappa_root(&law, 1e-12).unwrap().unwrap();
            assert!(k < 1.5);
            assert!((law.moment_rho(k) - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn classify_examples() {
        let r = classify_regime(&ballistic()).unwrap();
        assert_eq!(r.direction, Direction::Right);
        assert!((r.speed - 13.0 / 35.0).abs() < 1e-12);
        assert!(r.ballistic);
        assert_eq!(r.averaged_strongly_transient, AveragedVerdict::Yes);
        assert_eq!(r.kappa, None);

        let r = classify_regime(&sub_ballistic()).unwrap();
        assert_eq!(r.direction, Direction::Right);
        assert_eq!(r.speed, 0.0);
        assert!(!r.ballistic);
        assert!(r.quenched_strongly_transient);
        assert_eq!(r.averaged_strongly_transient, AveragedVerdict::No);

        let r = classify_regime(&kappa_one()).unwrap();
        assert!((r.mean_rho - 1.0).abs() <= 1e-12);
        assert_eq!(r.rho_log_rho_finite, Some(true));
        assert_eq!(r.averaged_strongly_transient, AveragedVerdict::No);
        assert!((kappa_one().mean_rho_log_rho() - 0.130_812_035_941_137).abs() < 1e-12);

        let r = classify_regime(&EnvLaw::constant(0.5).unwrap()).unwrap();
        assert_eq!(r.direction, Direction::Recurrent);
        assert_eq!(r.averaged_strongly_transient, AveragedVerdict::Inapplicable);
        assert!(!r.quenched_strongly_transient);

        let r = classify_regime(&EnvLaw::beta(5.0, 2.0).unwrap()).unwrap();
        assert!((r.speed - 1.0 / 3.0).abs() < 1e-12);
        assert!((r.kappa.unwrap() - 3.0).abs() < 1e-9);
    }

    #[test]
    fn left_transient_mirrors_right() {
        let r = classify_regime(&ballistic().mirrored()).unwrap();
        assert_eq!(r.direction, Direction::Left);
        assert!((r.speed + 13.0 / 35.0).abs() < 1e-12);
        assert_eq!(r.averaged_strongly_transient, AveragedVerdict::Yes);
    }

    #[test]
    fn beta_boundary_law_is_weakly_transient() {
        // E[rho] = beta / (alpha - 1) for Beta(alpha, beta), so alpha = beta + 1
        // sits on the boundary with E[rho log rho] finite.
        let law = EnvLaw::beta(2.0, 1.0).unwrap();
        assert!((law.moment_rho(1.0) - 1.0).abs() < 1e-12);
        let r = classify_regime(&law).unwrap();
        assert_eq!(r.direction, Direction::Right);
        assert_eq!(r.speed, 0.0);
        assert_eq!(r.rho_log_rho_finite, Some(true));
        assert_eq!(r.averaged_strongly_transient, AveragedVerdict::No);
    }

    #[test]
    fn grammar_round_trip() {
        for law in [
            sub_ballistic(),
            EnvLaw::constant(0.7).unwrap(),
            EnvLaw::beta(5.0, 2.0).unwrap(),
        ] {
            let s = law.to_string();
            let back: EnvLaw = s.parse().unwrap();
            assert_eq!(back, law);
        }
        let l: EnvLaw = "discrete:0.5@0.75,0.5@0.333333".parse().unwrap();
        assert!(matches!(l, EnvLaw::Discrete { .. }));
        let l: EnvLaw = "discrete:1/2@0.75,1/2@1/3".parse().unwrap();
        assert_eq!(l, sub_ballistic());
        assert!("constant:1/x".parse::<EnvLaw>().is_err());
        assert!("discrete:0.5@0.75,0.4@0.3".parse::<EnvLaw>().is_err());
        assert!("constant:1.0".parse::<EnvLaw>().is_err());
        assert!("beta:0,2".parse::<EnvLaw>().is_err());
        assert!("gauss:1".parse::<EnvLaw>().is_err());
    }

    #[test]
    fn window_examples() {
        let law = sub_ballistic();
        let w = sample_window(&law, 42, -5, 5).unwrap();
        assert_eq!(w.len(), 11);
        assert!(w.omega.iter().all(|&o| o > 0.0 && o < 1.0));
        assert_eq!(w, sample_window(&law, 42, -5, 5).unwrap());
        let v = sample_window(&law, 42, 0, 10).unwrap();
        for x in 0..=5 {
            assert_eq!(w.omega(x).unwrap().to_bits(), v.omega(x).unwrap().to_bits());
        }
        assert!(sample_window(&law, 42, 3, 2).is_err());
        assert!(w.at(6).is_err());
    }

    #[test]
    fn beta_window_in_range() {
        let law = EnvLaw::beta(0.3, 0.3).unwrap();
        let w = sample_window(&law, 1, 0, 10_000).unwrap();
        assert!(w.omega.iter().all(|&o| o > 0.0 && o < 1.0));
    }

    #[test]
    fn empirical_log_rho_mean() {
        for law in [sub_ballistic(), EnvLaw::beta(5.0, 2.0).unwrap()] {
            let w = sample_window(&law, 2024, 0, 999_999).unwrap();
            let logs: Vec<f64> = w.omega.iter().map(|&o| rho_of(o).ln()).collect();
            let m = crate::stats::Moments::from_slice(&logs);
            assert!(
                (m.mean() - law.mean_log_rho()).abs() <= 4.0 * m.std_error(),
                "{} vs {}",
                m.mean(),
                law.mean_log_rho()
            );
        }
    }
}
