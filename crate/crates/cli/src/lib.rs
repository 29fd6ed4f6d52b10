//! Command-line driver for `paradot`: deterministic parallel sweeps and the
//! verification subcommands.

pub mod commands;
pub mod config;
pub mod emit;
pub mod sweep;
