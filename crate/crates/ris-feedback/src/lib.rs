//! Simulation library for feedback-bit budgeting in RIS-aided uplinks.
//!
//! A base station that has computed the preferred phase-shift configuration
//! for a reconfigurable intelligent surface (RIS) must push that
//! configuration to the surface over a narrow wireless control channel. This
//! crate quantifies how the size of that feedback message, in bits, shapes
//! the uplink SNR:
//!
//! - [`channel`] generates array responses and random channel realizations
//!   (LoS cascade, Rician UE-RIS link, Rayleigh static path) and evaluates
//!   the end-to-end channel gain.
//! - [`codebook`] builds the LoS angle-sum codebook, quantizes
//!   configurations element-wise or through the codebook, and packs the
//!   result into a bit-exact feedback message.
//! - [`analysis`] holds the closed-form array-gain and expected-gain
//!   formulas used both as fast evaluators and as oracles for the Monte
//!   Carlo engine.
//! - [`montecarlo`] is the seeded, parallel experiment engine behind the
//!   `fig2`/`fig3` presets of the `risfb` binary.
//! - [`config`], [`presets`], and [`report`] support the CLI: scenario
//!   files, bundled experiments, and deterministic CSV output.

pub mod analysis;
pub mod channel;
pub mod codebook;
pub mod config;
pub mod montecarlo;
pub mod presets;
pub mod report;

/// Errors produced by the library operations.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("malformed message: {0}")]
    MalformedMessage(String),
}

pub type Result<T> = std::result::Result<T, Error>;
