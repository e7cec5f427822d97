//! Integral mass spectra of tree-level two-body processes.
//!
//! The crate evaluates spin-averaged squared amplitudes for
//! `e⁺e⁻ → γ → l⁺l⁻` and `e⁺e⁻ → Z⁰ → μ⁺μ⁻`, integrates them over incoming
//! mass shells and outgoing directions in a dynamically chosen
//! center-of-momentum frame, and reads candidate particle masses off the
//! peaks of the resulting density. A covariance suite checks the spinor
//! and gamma-matrix identities the amplitudes rely on.

// `!(x > 0.0)` is used on purpose so NaN is rejected; tensor loops index several arrays at once.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod amplitudes;
pub mod cli;
pub mod clifford;
pub mod cmframe;
pub mod config;
pub mod covariance;
pub mod error;
pub mod minkowski;
pub mod report;
pub mod spectrum;

pub use error::{Error, Result};
