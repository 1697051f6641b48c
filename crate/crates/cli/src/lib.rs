//! Command-line front end: mechanism configs, grid specs, reports and the
//! golden scenario runner.

pub mod app;
pub mod config;
pub mod error;
pub mod repro;
pub mod report;

pub use app::{main_with, EXIT_CLEAN, EXIT_ERROR, EXIT_VIOLATIONS};
pub use error::{CliError, CliResult};
pub use report::Report;
