//! Command-line front end: shape and function DSLs, run configuration,
//! subcommands and report encoding.

pub mod commands;
pub mod config;
pub mod dsl;
pub mod report;
