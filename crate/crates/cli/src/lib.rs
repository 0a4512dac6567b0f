//! Command-line front end: boundary and unrestricted-range export, sampling
//! audits and figure presets.
//!
//! Every numeric result goes to standard output as a `key=value` line.
//! Rejected input exits with status 2, failed audits and runtime failures
//! with status 1.

// negated comparisons reject NaN inputs
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod svg;
pub mod table;

pub use commands::{cmd_boundary, cmd_figure, cmd_unrestricted, cmd_verify, run, Output};
pub use config::{Cli, Command, OutputArgs, OutputFormat, Preset, RunArgs, RunConfig};
pub use error::CliError;
