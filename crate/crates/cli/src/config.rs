use ecdim::{FSource, LogBase};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format `{other}` (expected csv or json)")),
        }
    }
}

/// Options shared by every subcommand.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub base: LogBase,
    pub f_source: FSource,
    /// Upper limit for dimension searches; `None` keeps the evaluator default.
    pub cap: Option<u64>,
    /// Relative tolerance for comparisons against the published tables.
    pub tol: f64,
    pub format: Format,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            base: LogBase::Natural,
            f_source: FSource::Exact,
            cap: None,
            tol: 0.05,
            format: Format::Csv,
            seed: 7,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(CliError::Usage(format!("--tol must be positive, got {}", self.tol)));
        }
        if self.cap == Some(0) {
            return Err(CliError::Usage("--cap must be at least 1".into()));
        }
        Ok(())
    }
}
