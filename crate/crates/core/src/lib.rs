//! Cross-world causal models and the gap between demographic parity and
//! counterfactual fairness.
//!
//! The crate is organised by capability:
//!
//! - [`graphs`]: acyclic directed mixed graphs and d-separation.
//! - [`causal_models`]: bivariate-Gaussian potential outcomes, Gaussian-process
//!   errors over a treatment grid, and a small additive SCM.
//! - [`predictors`]: standardized, linear-cancellation, Rosenblatt,
//!   potential-outcome, coin-flip and path-specific scores.
//! - [`fairness`]: demographic-parity and counterfactual-fairness gaps plus the
//!   adversarial search over the unidentified cross-world correlation.
//! - [`repair`]: quantile-mapping post-processing that enforces demographic
//!   parity while keeping the within-group order.
//! - [`experiments`]: the law-school rank experiment (OLS, repair, Spearman,
//!   rank plot) with a synthetic fallback dataset.
//! - [`cli`]: the `cfdp` command-line front end.
//!
//! Runnable walkthroughs live in the crate's `examples/` directory.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod causal_models;
pub mod cli;
pub mod config;
pub mod error;
pub mod experiments;
pub mod fairness;
pub mod graphs;
pub mod predictors;
pub mod repair;
pub mod rng;
pub mod stats;

pub use error::{Error, Result};
