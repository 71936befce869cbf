//! Position estimation in compound graphs as a weighted mixture of
//! single-series percepts: stimulus designs, a simulated observer, synthetic
//! mixture distributions, a KDE likelihood, and the repeat fit protocol.

pub mod commands;
pub mod config;
pub mod empirical;
pub mod error;
pub mod estimation;
pub mod kde;
pub mod observer;
pub mod optimize;
pub mod report;
pub mod seed;
pub mod stats;
pub mod stimulus;
pub mod svg;
pub mod trials_csv;

pub use error::{Error, Result};
