//! File formats and the experiment driver behind the `fairim` binary.

pub mod config;
pub mod error;
pub mod experiment;
pub mod io;

pub use error::{Error, Result};
