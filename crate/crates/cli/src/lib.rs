//! Command-line front end for `fractb`: scenario files, command dispatch and
//! CSV/JSON output.

pub mod commands;
mod error;
pub mod output;
pub mod scenario;

pub use commands::{dispatch, run, Command, Outcome};
pub use error::{CliError, CliResult};
pub use scenario::{load_scenario, parse_override, parse_scenario, Scenario};
