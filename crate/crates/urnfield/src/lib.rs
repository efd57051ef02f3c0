//! Command-line driver, file formats and run manifests for `urnfield-core`.

pub mod cli;
pub mod error;
pub mod io;
pub mod manifest;
pub mod spec;

pub use error::CliError;
