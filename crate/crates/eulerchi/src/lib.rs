//! File formats, reports, randomized cross-validation and command dispatch
//! for the `eulerchi` tool.

#![forbid(unsafe_code)]

pub mod cli;
pub mod error;
pub mod format;
pub mod report;
pub mod verify;

pub use error::{CliError, Result};
pub use report::Report;
