//! JSON-in, JSON-out front end over the `drinfeld` library.

pub mod config;
pub mod error;
pub mod report;
pub mod run;

pub use config::{JobConfig, ModuleDescriptor};
pub use error::{CliError, Result};
pub use report::Report;
pub use run::{run, COMMANDS};
