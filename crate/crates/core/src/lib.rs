//! Energy-restricted prepare-and-measure models, with and without shared
//! entanglement.
//!
//! The crate is layered bottom-up:
//!
//! * [`linalg`]: dense complex matrices, spectral decomposition, partial
//!   traces and the real kernels behind the SDP solver.
//! * [`quantum`]: states, channels, POVMs, the vacuum-weight energy
//!   constraint, Helstrom discrimination and entanglement witnesses.
//! * [`classical`]: the no-signalling bound for entanglement-assisted
//!   classical communication and the strategies that saturate it.
//! * [`schemes`]: closed-form entanglement-assisted encodings and the
//!   prepare-and-measure correlator region.
//! * [`optim`]: interior-point SDP solver and the seesaw searches.
//! * [`attacks`]: side-information attacks on randomness certification.

pub mod attacks;
pub mod classical;
pub mod error;
pub mod linalg;
pub mod optim;
pub mod quantum;
pub mod schemes;

pub use error::{Error, Result};
