//! Deterministic generation of a two-atom Bell state by a single photon in a
//! leaky cavity.
//!
//! * [`cavity`]: mirror model, mode functions and quasi-modes.
//! * [`spectra`]: single-photon spectral functions.
//! * [`analytic`]: resolvent solution, scattering amplitudes and probabilities.
//! * [`oracle`]: brute-force time-domain simulation on a discretized continuum.
//! * [`harness`]: sweeps, optimization, figure data and the CLI.
//!
//! The `parallel` feature (on by default) runs independent work items on a
//! rayon pool; see [`par::Execution`].

pub mod analytic;
pub mod cavity;
pub mod error;
pub mod harness;
pub mod model;
pub mod oracle;
pub mod par;
pub mod quad;
pub mod spectra;

pub use error::{Error, Result};
pub use model::{Method, PhysicalParams, ProbabilityResult};
