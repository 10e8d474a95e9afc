//! Command-line experiments: profile evaluation, optimization runs, angular
//! sweeps, coefficient scans and table regeneration.

pub mod app;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use app::run;
pub use config::RunConfig;
pub use error::CliError;
