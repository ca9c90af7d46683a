//! Separate the publications of authors who share a name.
//!
//! Records exported from a bibliographic database are compared field by
//! field; the probability that two random documents would coincide as much
//! as a given pair does becomes a log-scale distance. Records at zero
//! distance (after shortest-path closure) form clusters that a reviewer then
//! accepts or rejects as a whole.

pub mod analysis;
pub mod cluster;
pub mod coincidence;
pub mod config;
pub mod dialog;
pub mod distance;
pub mod error;
pub mod field;
pub mod ingest;
pub mod service;
pub mod session;
pub mod synth;

pub use analysis::Analysis;
pub use config::{Config, Settings};
pub use error::{Error, Result};
