//! Truncated series with non-negative terms.

use serde::{Deserialize, Serialize};

/// Value of a truncated non-negative series.
///
/// When `converged` is true the full series is believed to lie in
/// `[value, value + remainder_bound]`. The bound is a geometric
/// extrapolation from the last term and is heuristic: the decay rate comes
/// from the law of large numbers, not from a certified constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesValue {
    pub value: f64,
    pub remainder_bound: f64,
    pub terms_used: usize,
    pub converged: bool,
}

impl SeriesValue {
    /// Marker for a series known to diverge.
    pub fn divergent() -> Self {
        SeriesValue {
            value: f64::INFINITY,
            remainder_bound: f64::INFINITY,
            terms_used: 0,
            converged: false,
        }
    }

    /// `offset + scale * self`, used for `1 + 2 * sum` style formulas.
    pub fn affine(self, offset: f64, scale: f64) -> Self {
        SeriesValue {
            value: offset + scale * self.value,
            remainder_bound: scale * self.remainder_bound,
            ..self
        }
    }
}

/// Stopping policy shared by every series in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesPolicy {
    /// Relative term threshold.
    pub tol: f64,
    /// Number of consecutive sub-threshold terms required to stop.
    pub quiet_run: usize,
    /// Term budget.
    pub max_terms: usize,
    /// Assumed geometric decay ratio of the terms, in (0, 1).
    pub decay: f64,
}

impl SeriesPolicy {
    pub const DEFAULT_QUIET_RUN: usize = 32;
    pub const DEFAULT_MAX_TERMS: usize = 1 << 20;

    pub fn new(tol: f64, decay: f64) -> Self {
        SeriesPolicy {
            tol,
            quiet_run: Self::DEFAULT_QUIET_RUN,
            max_terms: Self::DEFAULT_MAX_TERMS,
            decay,
        }
    }

    pub fn with_max_terms(mut self, max_terms: usize) -> Self {
        self.max_terms = max_terms;
        self
    }

    pub fn with_quiet_run(mut self, quiet_run: usize) -> Self {
        self.quiet_run = quiet_run;
        self
    }

    pub fn accumulator(&self) -> SeriesAccumulator {
        SeriesAccumulator {
            policy: *self,
            sum: CompensatedSum::default(),
            last: f64::NAN,
            quiet: 0,
            terms: 0,
            stopped: false,
        }
    }
}

/// Running state of a series under a [`SeriesPolicy`].
#[derive(Debug, Clone)]
pub struct SeriesAccumulator {
    policy: SeriesPolicy,
    sum: CompensatedSum,
    last: f64,
    quiet: usize,
    terms: usize,
    stopped: bool,
}

impl SeriesAccumulator {
    /// Adds a term; returns true once the series should stop, either because
    /// the quiet run completed or because the budget is spent.
    pub fn push(&mut self, term: f64) -> bool {
        debug_assert!(term >= 0.0 || term.is_nan());
        self.sum.add(term);
        self.last = term;
        self.terms += 1;
        if term <= self.policy.tol * self.sum.value() {
            self.quiet += 1;
        } else {
            self.quiet = 0;
        }
        if self.quiet >= self.policy.quiet_run {
            self.stopped = true;
        }
        self.stopped || self.terms >= self.policy.max_terms
    }

    pub fn terms(&self) -> usize {
        self.terms
    }

    pub fn sum(&self) -> f64 {
        self.sum.value()
    }

    /// Closes the series. `converged` is false unless the quiet run completed.
    pub fn finish(self) -> SeriesValue {
        let value = self.sum.value();
        if !value.is_finite() {
            return SeriesValue {
                value,
                remainder_bound: f64::INFINITY,
                terms_used: self.terms,
                converged: false,
            };
        }
        let r = self.policy.decay;
        let remainder_bound = if self.terms == 0 {
            0.0
        } else if r > 0.0 && r < 1.0 {
            self.last * r / (1.0 - r)
        } else {
            f64::INFINITY
        };
        SeriesValue {
            value,
            remainder_bound,
            terms_used: self.terms,
            converged: self.stopped,
        }
    }
}

/// Neumaier compensated summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = CompensatedSum::default();
        for x in iter {
            s.add(x);
        }
        s
    }
}
