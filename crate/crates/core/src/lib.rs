//! Multiple-access channels generated by a single classical or quantum particle.
//!
//! The crate builds one-particle states and number-preserving encodings,
//! turns them into classical MACs through a POVM, and evaluates rate sums,
//! rate regions, accessible and Holevo information, plus a model of the
//! optical two-sender experiment.

pub mod analytic;
pub mod capacity;
pub mod error;
pub mod experiment;
pub mod info;
pub mod mac;
pub mod quantum;
pub mod report;
pub mod reproduce;

pub use error::{Error, Result};

/// Schema tag written into every JSON artifact.
pub const SCHEMA: &str = "spmac/1";
