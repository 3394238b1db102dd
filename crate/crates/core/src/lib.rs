//! Photon scattering off a charged harmonic oscillator in the electric dipole
//! approximation, with a UV frequency cutoff.
//!
//! The model is quadratic and exactly soluble. This crate evaluates its
//! renormalized propagator for sharp and smooth cutoffs, the spectral density
//! and photon cross section, the cutoff artifacts (a peak just below ω_H and a
//! bound-state pole just above it), the tachyon that appears when the cutoff
//! is pushed past its maximum, and the sum rules tying these together.

pub mod cli;
pub mod continuum;
pub mod error;
pub mod grid;
pub mod numerics;
pub mod observables;
pub mod params;
pub mod sharp;
pub mod smooth;

pub use error::{Error, Result};
pub use params::{make_params, BareParams, ModelParams};
