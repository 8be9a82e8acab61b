//! Kerr-state engineering for a single trapped ion.
//!
//! - [`fock`]: truncated Fock-space states, Kerr phases, displacement.
//! - [`wigner`]: Wigner functions and the truncation criteria built on them.
//! - [`pulse`]: carrier / red-sideband sequences and their synthesis.
//! - [`one_pulse`]: Kerr phases from one long carrier pulse.
//! - [`metrology`]: cat-state weak-force readout.

pub mod error;
pub mod fock;
pub mod metrology;
pub mod one_pulse;
pub mod pulse;
pub mod wigner;

pub use error::{KerrError, Result};
pub use fock::{FockVector, KerrParams};
pub use num_complex::Complex64 as C64;
