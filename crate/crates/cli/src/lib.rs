//! Command-line driver for the `ghp` library and the acceptance suites.

pub mod cli;
pub mod config;
pub mod gen;
pub mod suites;

pub use config::RunConfig;
pub use suites::{run_criterion, run_suite, Criterion, SuiteReport, SUITES};
