//! Joint multifractal analysis of paired time series with wavelet leaders.
//!
//! The pipeline runs signal ingestion ([`signal_io`]), a Haar transform
//! ([`dwt`]), wavelet leaders ([`leaders`]) and the joint partition function
//! with its scaling exponents and singularity spectra ([`analysis`]).
//! [`synth`] provides benchmarks with closed-form answers.

pub mod analysis;
pub mod dwt;
pub mod error;
pub mod leaders;
pub mod signal_io;
pub mod synth;

pub use error::{Error, Result};
pub mod pipeline;
pub mod manifest;
pub mod report;
pub mod validate;
