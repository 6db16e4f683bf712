//! Command-line front end: problem documents, subcommands and reports.

pub mod commands;
pub mod document;
pub mod error;
pub mod infix;

pub use commands::{run, Cli, Settings};
pub use document::ProblemDocument;
pub use error::CliError;
