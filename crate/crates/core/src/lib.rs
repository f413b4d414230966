//! Numerical toolkit for secrecy rates of complex vector wiretap channels
//! under proper and improper (general) Gaussian signaling.
//!
//! The crate covers:
//! - a validated complex-matrix substrate ([`matrix`]): Hermitian/PSD
//!   predicates, log-determinants, principal submatrices, block permutations;
//! - second-order signal representations ([`signal`]): augmented covariance
//!   feasibility, channel augmentation, the real-composite transform, and a
//!   seeded Gaussian sampler;
//! - rate functionals and theorem-level checkers ([`rates`]): proper and
//!   general secrecy rates, degradedness, the four-block determinant
//!   inequality, and the min-max objective over correlated joint noise;
//! - optimizers ([`solver`]): projected gradient ascent and a
//!   difference-of-convex iteration for both signaling classes, plus the
//!   min-max saddle solver;
//! - randomized property sweeps ([`properties`]), data-parallel by default
//!   via the `parallel` feature with a sequential fallback.
//!
//! All rate computation is carried out in nats; conversion to bits happens at
//! the reporting layer through [`rates::RateValue`].

pub mod error;
pub mod exec;
pub mod instances;
pub mod matrix;
pub mod properties;
pub mod rates;
pub mod signal;
pub mod solver;

pub use error::{Error, Result};
