//! # pathorder
//!
//! Path ensembles of chaotic maps and the thermodynamics of their path
//! distributions.
//!
//! | Module | Contents |
//! |--------|----------|
//! | [`dynamics`] | cat, doubling and standard maps; cell partitions; time and space averages |
//! | [`ensemble`] | replica simulation between two cells, path signatures, `p_k = L_k / L`, path actions |
//! | [`entropy`] | macroscopic entropy balance, `-k_B Σ p ln p`, its gradient, inverse and variation |
//! | [`maxent`] | maximum-entropy path distribution under a mean-action constraint |
//! | [`stochorder`] | path order, usual stochastic order, quantile coupling, convolution and mixture |
//! | [`cli`] | config-driven runs producing JSON/CSV/SVG reports |
//!
//! ```
//! use pathorder::ensemble::PathDistribution;
//! use pathorder::entropy::entropy_generation_statistical;
//! use pathorder::maxent::partition_identity_check;
//!
//! let d = PathDistribution::from_probabilities(vec![0.5, 0.25, 0.25]).unwrap();
//! let s = entropy_generation_statistical(&d, 1.0).unwrap();
//! assert!((s - 1.5 * 2f64.ln()).abs() < 1e-12);
//! let q = partition_identity_check(&d, 1.0).unwrap();
//! assert!((q - std::f64::consts::E).abs() < 1e-12);
//! ```

// `!(x > 0.0)` style checks are used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod dynamics;
pub mod ensemble;
pub mod entropy;
pub mod error;
pub mod maxent;
pub mod stochorder;

pub use error::{Error, Result};
