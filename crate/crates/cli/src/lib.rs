//! Command-line front end for perron-core. Every subcommand prints one JSON
//! document (or CSV where noted); identical arguments give identical bytes.

pub mod args;
pub mod config;
pub mod run;

pub use run::{run, CliError};
