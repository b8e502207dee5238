//! Exact quenched formulas, conditioned samplers and rare-event estimators
//! for nearest-neighbor random walks in i.i.d. random environments on Z.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod env;
pub mod error;
pub mod exact;
pub mod ladder;
pub mod mc;
pub mod rng;
pub mod roots;
pub mod series;
pub mod stats;

pub use error::{Error, Result};
