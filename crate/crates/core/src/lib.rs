//! Decoherence of photon polarization states in birefringent phase-damping
//! channels, as a function of crystal length and frequency-spectrum envelope.

pub mod correlation;
pub mod error;
pub mod io_cli;
pub mod linalg;
pub mod measures;
pub mod quadrature;
pub mod spectra;
pub mod states;
pub mod sweep;

pub use error::{Error, Result};
