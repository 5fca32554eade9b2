//! Library surface of the `simulate` command-line front end: configuration
//! parsing, initial-ensemble construction, run orchestration, and the
//! output-file writers.

pub mod config;
pub mod execute;
pub mod init;
pub mod output;

pub use config::{parse_config, resolve_process, InitialConditionSpec, ProcessSpec, RunConfig};
pub use execute::execute;
pub use init::build_initial_ensemble;
