//! Numerical laboratory for a heavy classical tracer particle coupled to a
//! non-interacting Bose field in rescaled units (2m = 1, Ŵ(0) = 1).
//!
//! The crate has three legs: exact-to-quadrature radial/spectral calculus
//! (inverse Laplacian, Born resolvents, spherical Bessel transforms), the
//! scalar memory kernels of the effective momentum equation (G, f, K and
//! their decay laws), and a split-step box simulator for the full coupled
//! particle–field system with an absorbing layer.

pub mod constants;
pub mod dispersive;
pub mod kernels;
pub mod model;
pub mod numerics;
pub mod parallel;
pub mod radial;
pub mod report;
pub mod sector;
pub mod sim;

use thiserror::Error;

/// Shared error type for every module in the crate.
#[derive(Debug, Error)]
pub enum LabError {
    #[error("invalid parameter `{name}`: {reason}")]
    Parameter { name: &'static str, reason: String },

    #[error("data error: {0}")]
    Data(String),

    #[error("accuracy target missed in {what}: achieved {achieved:.3e}, required {required:.3e}")]
    Accuracy {
        what: &'static str,
        achieved: f64,
        required: f64,
    },

    #[error("iteration diverged in {what} after {iterations} iterations (last update {last_update:.3e})")]
    Divergence {
        what: &'static str,
        iterations: usize,
        last_update: f64,
    },

    #[error("instability detected in {what} at t = {t}: {detail}")]
    Instability {
        what: &'static str,
        t: f64,
        detail: String,
    },

    #[error("grid error: {0}")]
    Grid(String),

    #[error("argument {value} outside supported range [{min}, {max}] for {what}")]
    Range {
        what: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },

    #[error("io error for {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, LabError>;
