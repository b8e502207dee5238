//! Monte Carlo summaries and small statistical helpers.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::series::CompensatedSum;

/// A Monte Carlo result.
///
/// `std_error` is the sample standard deviation over `sqrt(n)`. Any
/// certified censoring bias goes to `error_budget` and is never folded into
/// `std_error`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
    pub n: u64,
    pub method: String,
    pub seed: u64,
    pub error_budget: f64,
}

impl Estimate {
    pub fn from_samples(samples: &[f64], method: &str, seed: u64) -> Self {
        let m = Moments::from_slice(samples);
        Estimate {
            value: m.mean(),
            std_error: m.std_error(),
            n: m.n,
            method: method.to_string(),
            seed,
            error_budget: 0.0,
        }
    }

    pub fn exact(value: f64, method: &str, seed: u64) -> Self {
        Estimate {
            value,
            std_error: 0.0,
            n: 1,
            method: method.to_string(),
            seed,
            error_budget: 0.0,
        }
    }

    /// `|self - other| <= k * sqrt(se1^2 + se2^2)`.
    pub fn agrees_with(&self, other: &Estimate, k: f64) -> bool {
        (self.value - other.value).abs() <= k * self.std_error.hypot(other.std_error)
    }

    /// `|self - target| <= k * se + slack`.
    pub fn within(&self, target: f64, k: f64, slack: f64) -> bool {
        (self.value - target).abs() <= k * self.std_error + slack + self.error_budget
    }
}

/// Count, mean and second central moment (Welford, Chan merge).
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Moments {
    pub n: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    pub fn merge(&self, other: &Moments) -> Moments {
        if self.n == 0 {
            return *other;
        }
        if other.n == 0 {
            return *self;
        }
        let n = self.n + other.n;
        let d = other.mean - self.mean;
        let mean = self.mean + d * other.n as f64 / n as f64;
        let m2 = self.m2 + other.m2 + d * d * (self.n as f64) * (other.n as f64) / n as f64;
        Moments { n, mean, m2 }
    }

    /// Mean via compensated summation, variance via a second pass.
    pub fn from_slice(xs: &[f64]) -> Moments {
        let n = xs.len() as u64;
        if n == 0 {
            return Moments::default();
        }
        let mean = xs.iter().copied().collect::<CompensatedSum>().value() / n as f64;
        let m2 = xs
            .iter()
            .map(|x| (x - mean) * (x - mean))
            .collect::<CompensatedSum>()
            .value();
        Moments { n, mean, m2 }
    }

    pub fn mean(&self) -> f64 {
        if self.n == 0 {
            f64::NAN
        } else {
            self.mean
        }
    }

    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            self.m2 / (self.n - 1) as f64
        }
    }

    pub fn std_error(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            (self.variance() / self.n as f64).sqrt()
        }
    }
}

/// Ratio-of-means estimate `mean(num) / mean(den)` with a delta-method
/// standard error. Numerator and denominator must be paired samples.
pub fn ratio_estimate(num: &[f64], den: &[f64]) -> (f64, f64) {
    assert_eq!(num.len(), den.len());
    let n = num.len();
    let mn = Moments::from_slice(num).mean();
    let md = Moments::from_slice(den).mean();
    let r = mn / md;
    if n < 2 {
        return (r, 0.0);
    }
    let resid: Vec<f64> = num.iter().zip(den).map(|(a, b)| a - r * b).collect();
    let var = Moments::from_slice(&resid).variance();
    (r, (var / n as f64).sqrt() / md.abs())
}

/// Runs `f(i)` for `i in 0..n` on `workers` threads and returns the results
/// in index order. Results depend only on `f`, never on scheduling.
pub fn par_map<T, F>(n: usize, workers: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    if workers <= 1 || n < 2 {
        return (0..n).map(f).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .expect("thread pool");
    pool.install(|| (0..n).into_par_iter().map(&f).collect())
}

/// Default worker count: `RWRE_WORKERS` if set, else available parallelism.
pub fn default_workers() -> usize {
    std::env::var("RWRE_WORKERS")
        .ok()
        .and_then(|s| s.parse().ok())
        .filter(|&w: &usize| w > 0)
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        })
}

/// Two-sample Kolmogorov-Smirnov statistic. Ties are handled by comparing
/// the empirical CDFs after each distinct value.
pub fn ks_statistic(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Asymptotic two-sample KS critical value at significance `alpha`.
pub fn ks_critical(n: usize, m: usize, alpha: f64) -> f64 {
    let c = (-(alpha / 2.0).ln() / 2.0).sqrt();
    let (n, m) = (n as f64, m as f64);
    c * ((n + m) / (n * m)).sqrt()
}

/// Hill tail-index estimate from the `k` largest of `samples`:
/// `k / sum_{i<k} ln(X_(i) / X_(k))` with order statistics descending.
/// No bias correction.
pub fn hill_index(samples: &[f64], k: usize) -> f64 {
    let mut xs: Vec<f64> = samples.iter().copied().filter(|x| *x > 0.0).collect();
    if k == 0 || k >= xs.len() {
        return f64::NAN;
    }
    xs.sort_by(|a, b| b.total_cmp(a));
    let threshold = xs[k];
    let s: f64 = xs[..k].iter().map(|x| (x / threshold).ln()).sum();
    if s <= 0.0 {
        f64::INFINITY
    } else {
        k as f64 / s
    }
}

/// Least-squares slope and intercept of `y` on `x`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}
