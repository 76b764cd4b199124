//! Spectral regularization algorithms for kernel regression.
//!
//! The crate covers the filter-function view of kernel regression (kernel
//! ridge regression, gradient flow and spectral cut-off as instances of one
//! estimator), explicit Mercer systems on the interval, torus and sphere,
//! misspecified series targets that are unbounded but square integrable,
//! closed-form spectral diagnostics, and an experiment pipeline that
//! measures the empirical `L²` convergence rate against the predicted
//! `n^{-sβ/(sβ+1)}`.
//!
//! ```
//! use std::sync::Arc;
//! use specreg::estimator::{fit, Sample};
//! use specreg::filters::krr_filter;
//! use specreg::mercer::min_kernel;
//!
//! let samples = [Sample::scalar(1.0, 2.0)];
//! let est = fit(Arc::new(min_kernel()), &krr_filter(), &samples, 1.0).unwrap();
//! assert!((est.predict_one(&[0.5]) - 0.5).abs() < 1e-12);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diagnostics;
pub mod error;
pub mod estimator;
pub mod filters;
pub mod harness;
pub mod mercer;
pub mod numeric;
pub mod targets;

pub use error::{Error, Result};
