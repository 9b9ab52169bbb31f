//! Command-line surface of the support library: file formats, subcommands
//! and the sweep driver. The binary in `main.rs` only parses arguments and
//! maps failures to exit codes.

pub mod commands;
pub mod io;
pub mod sweep;
