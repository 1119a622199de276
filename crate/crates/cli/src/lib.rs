//! Command-line front end: argument parsing, dispatch and payload formatting.

pub mod args;
pub mod commands;
pub mod error;
pub mod output;
