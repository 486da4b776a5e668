//! Peaks-over-threshold extreme value analysis.
//!
//! The library models the tail of a loss distribution by fitting a
//! generalized Pareto distribution to the excesses over a threshold and
//! derives Value-at-Risk and Expected-Shortfall estimates from the fitted
//! tail, alongside baseline Normal/LogNormal body models, order-statistic
//! empirical estimators, and threshold-selection diagnostics.
//!
//! Modules:
//! - [`ingest`]: CSV loading and normalization into a [`ingest::LossSeries`].
//! - [`dist`]: Normal, LogNormal, and GPD kernels (pdf/cdf/quantile).
//! - [`fit`]: maximum-likelihood estimation with convergence reporting.
//! - [`pot`]: the tail estimator, VaR/ES (closed-form and empirical), and
//!   the EL/UL/WC region decomposition.
//! - [`diagnostics`]: mean-excess and parameter-stability curves, plus the
//!   borderline-item sensitivity analysis.
//! - [`par`]: deterministic data-parallel helpers (rayon behind the
//!   `parallel` feature, with a bit-identical sequential fallback).
//!
//! Every operation is a pure function of its inputs; fits are deterministic
//! and invariant under permutation of the input array.

// Negated float comparisons (`!(x > 0.0)`) reject NaN; the `<=` forms
// clippy suggests accept it.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diagnostics;
pub mod dist;
mod error;
pub mod fit;
pub mod ingest;
pub mod par;
pub mod pot;
mod simplex;

pub use error::{Error, Result};
