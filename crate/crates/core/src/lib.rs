//! Continuous-variable entangled light from a laser-pumped condensate in a
//! two-mode cavity.
//!
//! The crate is split along the physics:
//!
//! - [`params`] maps raw cavity/atom quantities onto the effective couplings
//!   `g_j`, `ω′`, `χ_j`, `χ` and checks the regime assumptions behind them.
//! - [`fockdyn`] evolves the intracavity state in truncated Fock space, both
//!   through the SU(1,1) disentangled closed form and by direct numerical
//!   exponentiation, plus the three-mode model that still carries the
//!   collective atomic mode.
//! - [`spectra`] solves the linear Langevin equations in frequency space and
//!   builds the homodyne squeezing spectrum of the output fields.
//! - [`sweeps`] locates spectral minima and scans them over `κ` and `N`.
//!
//! Grid and sweep evaluation goes through [`exec`], which uses rayon when the
//! `parallel` feature is enabled and a plain loop otherwise.

// `!(x > 0.0)` is how NaN gets rejected
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod exec;
pub mod fockdyn;
pub mod linalg;
pub mod params;
pub mod spectra;
pub mod sweeps;

pub use error::{Error, Result};
pub use exec::Execution;
pub use params::{EffectiveParams, PhysicalParams, RegimeReport};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
