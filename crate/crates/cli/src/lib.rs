//! Command-line front end for `stratify-core`.

pub mod args;
pub mod commands;
pub mod error;
pub mod manifest;
pub mod svg;

pub use args::{Cli, Command};
pub use commands::run;
pub use error::{CliError, CliResult};
pub use manifest::RunManifest;
