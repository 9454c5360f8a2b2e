//! Instance files, reports and subcommands for the `setfix` binary.
//!
//! Every subcommand is an ordinary function returning an [`commands::Outcome`],
//! so tests drive them without spawning a process.

pub mod commands;
pub mod document;
pub mod report;

pub use commands::{cmd_check, cmd_oracle, cmd_solve, cmd_validate, Outcome};
pub use document::InstanceDocument;
pub use report::Format;
