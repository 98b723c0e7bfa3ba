//! Command-line front end for the waveleton phase-space laboratory.
//!
//! A run is described by a TOML [`config::RunConfig`], executed by [`run::execute`] into a
//! staging directory and published together with a [`run::RunManifest`].

pub mod config;
pub mod error;
pub mod presets;
pub mod run;

pub use config::{load_config, RunConfig, ScenarioKind};
pub use error::{CliError, CliResult};
pub use run::{execute, output_dir, RunManifest};
