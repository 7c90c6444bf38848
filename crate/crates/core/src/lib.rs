//! Gauge capacitance matrices for one-dimensional non-Hermitian
//! subwavelength resonator chains: finite, interface and quasiperiodic
//! matrices, their spectra, Toeplitz closed forms, pseudospectra, band
//! functions and generalised Brillouin zones.

pub mod bands;
pub mod capmat;
pub mod cli;
pub mod error;
pub mod gbz;
pub mod geometry;
pub mod linalg;
pub mod output;
pub mod spectral;
pub mod toeplitz;

pub use error::{Error, Result};
pub use linalg::C64;
