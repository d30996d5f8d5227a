//! Forensics toolkit for influence-campaign accounts in social-media dumps.
//!
//! The pipeline runs ingest → network construction → degree statistics and
//! stance classification → community structure → lagged causal networks →
//! reports. Each stage lives in its own module and can be driven directly
//! or through [`pipeline::run_pipeline`].

pub mod causal;
pub mod community;
pub mod degstats;
pub mod error;
pub mod ingest;
pub mod netbuild;
pub mod pipeline;
pub mod report;
pub mod rng;
pub mod stance;
pub mod synth;

pub use error::{Error, Result};
