//! Stochastic approximation for convex programs with almost-sure constraints.

// Negated float comparisons reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baselines;
pub mod cli;
pub mod error;
pub mod io;
pub mod linalg;
pub mod problem;
pub mod problems;
pub mod prox;
pub mod sasc;
pub mod smoothing;
pub mod trace;

pub use error::{Result, SascError};
