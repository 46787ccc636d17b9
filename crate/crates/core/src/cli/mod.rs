//! The `twogrid` command-line front end.

pub mod args;
pub mod commands;

pub use args::{Cli, Command, CommandKind, Format, RunArgs, RunConfig};
pub use commands::{cmd_analyze, cmd_generate, cmd_verify, render_report, run, summary_path};
