//! CLI error taxonomy with stable exit codes and a JSON rendering for stderr.

use std::path::Path;

use serde_json::json;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// TOML syntax or schema violation; `line` is 1-based, 0 when unknown.
    #[error("config parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid config value `{key}`: {reason}")]
    Validation { key: String, reason: String },
    #[error("unknown demo `{0}`")]
    UnknownDemo(String),
    #[error("io error on {path}: {message}")]
    Io { path: String, message: String },
    #[error("output directory {0} exists and is not a previous run")]
    OutputExists(String),
    #[error(transparent)]
    Core(#[from] waveleton::Error),
}

impl CliError {
    pub fn io(path: &Path, e: std::io::Error) -> Self {
        CliError::Io { path: path.display().to_string(), message: e.to_string() }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Parse { .. } => "parse",
            CliError::Validation { .. } => "validation",
            CliError::UnknownDemo(_) => "unknown_demo",
            CliError::Io { .. } => "io",
            CliError::OutputExists(_) => "output_exists",
            CliError::Core(_) => "core",
        }
    }

    /// Process exit code: 2 is left to clap's usage errors, core failures start at 20.
    pub fn exit_code(&self) -> i32 {
        use waveleton::Error as E;
        match self {
            CliError::Parse { .. } => 3,
            CliError::Validation { .. } => 4,
            CliError::UnknownDemo(_) => 5,
            CliError::Io { .. } => 6,
            CliError::OutputExists(_) => 7,
            CliError::Core(e) => match e {
                E::UnsupportedOrder { .. } => 20,
                E::InsufficientSmoothness { .. } => 21,
                E::NonDyadicLength(_) => 22,
                E::NonDyadicShape(..) => 23,
                E::NonDyadicSize(_) => 24,
                E::TooManyLevels { .. } => 25,
                E::MalformedCoefficients(_) => 26,
                E::UnknownLevel(_) => 27,
                E::ShapeMismatch(_) => 28,
                E::LengthMismatch { .. } => 29,
                E::GridMismatch(_) => 30,
                E::InvalidGrid(_) => 31,
                E::StepTooLarge { .. } => 32,
                E::UnstableStep { .. } => 33,
                E::InconsistentHbar { .. } => 34,
                E::NonDyadicPGrid(_) => 35,
                E::NotNormalized(_) => 36,
                E::WeightsNotNormalized(_) => 37,
                E::QuadratureUnderResolved { .. } => 38,
                E::UnsupportedNonlinearity(_) => 39,
                E::UnsupportedTerm(_) => 40,
                E::PoleInDenominator(_) => 41,
                E::SingularSystem(_) => 42,
                E::NewtonDiverged { .. } => 43,
                E::EmptyField => 44,
                E::InvalidArgument(_) => 45,
                E::Format(_) => 46,
                E::Io(_) => 47,
            },
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut v = json!({ "error": self.kind(), "message": self.to_string(), "exit_code": self.exit_code() });
        match self {
            CliError::Parse { line, .. } => v["line"] = json!(line),
            CliError::Validation { key, reason } => {
                v["key"] = json!(key);
                v["reason"] = json!(reason);
            }
            CliError::Core(e) => v["variant"] = json!(format!("{e:?}").split(['(', ' ', '{']).next().unwrap_or("")),
            _ => {}
        }
        v
    }
}

pub type CliResult<T> = Result<T, CliError>;
