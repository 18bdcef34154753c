//! Configuration files, output formats, parallel campaigns and subcommands
//! for the `spiral-erw` command-line tool.

pub mod commands;
pub mod config;
pub mod exec;
pub mod output;

pub use config::{Config, ConfigError};
pub use exec::Rayon;
