//! Command-line front end for `esr-core`: configuration, parameter sweeps,
//! figure presets, a parallel Monte Carlo driver and CSV output.

pub mod cli;
pub mod config;
pub mod error;
pub mod experiment;
pub mod output;
pub mod runner;
pub mod validate;

pub use error::CliError;
