//! Semiclassical quantization of rational polygon billiards.
//!
//! The crate unfolds a billiard into its elementary polygon pattern, reads off
//! the period lattice, quantizes plane waves on aperiodic and periodic
//! skeletons, and evaluates the resulting wavefunctions and superscar states.

pub mod cli;
pub mod error;
pub mod exact;
pub mod geometry;
pub mod quantization;
pub mod skeleton;
pub mod wavefunction;

pub use error::{PolyscarError, Result};
