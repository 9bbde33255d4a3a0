//! Library side of the `antx` command-line tool.

pub mod commands;
pub mod config;
