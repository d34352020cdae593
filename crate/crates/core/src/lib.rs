//! Axisymmetric shallow water moment equations and their hyperbolic
//! regularization: model assembly, spectral analysis and a first-order
//! finite-volume solver.

pub mod basis;
pub mod error;
pub mod model;
pub mod scenarios;
pub mod solver;
pub mod spectral;
pub mod variant;

pub use error::{Error, Result};
pub use model::{Model, ModelConfig, MomentState, Orders, Primitives, Variant};

/// Fixed-width real formatting used by every text export: 17 significant
/// digits in scientific notation.
pub fn format_real(x: f64) -> String {
    format!("{x:.16e}")
}
