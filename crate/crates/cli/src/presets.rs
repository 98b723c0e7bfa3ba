//! Built-in demo configs, embedded at compile time.

use crate::config::RunConfig;
use crate::error::CliError;

/// `(name, toml)`; every number in the files is commented where it is chosen.
pub const PRESETS: &[(&str, &str)] = &[
    ("harmonic-stationary", include_str!("../presets/harmonic-stationary.toml")),
    ("uniform-512-depth4", include_str!("../presets/uniform-512-depth4.toml")),
    ("uniform-512-depth6", include_str!("../presets/uniform-512-depth6.toml")),
    ("waveleton-band", include_str!("../presets/waveleton-band.toml")),
    ("fock-atom", include_str!("../presets/fock-atom.toml")),
    ("lindblad-decoherence", include_str!("../presets/lindblad-decoherence.toml")),
    ("galerkin-harmonic", include_str!("../presets/galerkin-harmonic.toml")),
];

pub const ALIASES: &[(&str, &str)] = &[("uniform-512", "uniform-512-depth4"), ("waveleton", "waveleton-band")];

pub fn canonical(name: &str) -> Option<&'static str> {
    let name = ALIASES.iter().find(|(a, _)| *a == name).map_or(name, |(_, t)| t);
    PRESETS.iter().find(|(n, _)| *n == name).map(|(n, _)| *n)
}

pub fn preset_text(name: &str) -> Result<&'static str, CliError> {
    let name = canonical(name).ok_or_else(|| CliError::UnknownDemo(name.to_string()))?;
    Ok(PRESETS.iter().find(|(n, _)| *n == name).expect("canonical").1)
}

/// The unvalidated preset config.
pub fn preset(name: &str) -> Result<RunConfig, CliError> {
    RunConfig::parse(preset_text(name)?)
}

pub fn names() -> impl Iterator<Item = &'static str> {
    PRESETS.iter().map(|(n, _)| *n)
}
