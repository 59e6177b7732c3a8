//! Pseudospectral solvers for the periodic inviscid Burgers and critical
//! focusing NLS equations, the t-model reduced closure, and an adaptive
//! driver that doubles the spectral band whenever the closure's energy-flux
//! rate crosses a threshold.

// Negated comparisons are how NaN gets rejected in validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod diagnostics;
pub mod dynamics;
pub mod error;
pub mod harness;
pub mod integrator;
pub mod oracle;
pub mod par;
pub mod refinement;
pub mod sample;
pub mod spectral;
pub mod transform;
pub mod validation;

pub use error::{Error, Result};
