//! Config-driven sweeps, CSV/SVG output and the validation gate behind the `ftr-noma` binary.

pub mod config;
pub mod error;
pub mod output;
pub mod plot;
pub mod run;
pub mod table;
pub mod validate;

pub use config::{load_config, parse_config, AnalysisKind, ConfigError, Overrides, RunConfig};
pub use error::CliError;
pub use table::{Row, Table};
