use thiserror::Error;

/// Process exit statuses. Distinct failure classes get distinct codes so that
/// scripts can tell a tolerance miss from a bad argument.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum ExitCode {
    Ok = 0,
    TableMismatch = 1,
    Usage = 2,
    Domain = 3,
    NonConvergence = 4,
    CapExceeded = 5,
    Violations = 6,
    Io = 7,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("table {table}: largest relative error {max_rel_err:.4} exceeds tolerance {tol}")]
    TableMismatch { table: u8, max_rel_err: f64, tol: f64 },

    #[error("{failed} of {total} checks reported violations")]
    Violations { failed: usize, total: usize },

    #[error(transparent)]
    Bound(#[from] ecdim::Error),

    #[error(transparent)]
    Verify(ecdim_verify::VerifyError),

    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },

    #[error("{path}: {source}")]
    Parse { path: String, source: serde_json::Error },

    #[error("writing output: {0}")]
    Output(#[from] std::io::Error),
}

impl From<ecdim_verify::VerifyError> for CliError {
    fn from(e: ecdim_verify::VerifyError) -> Self {
        match e {
            ecdim_verify::VerifyError::Bound(inner) => CliError::Bound(inner),
            other => CliError::Verify(other),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        use ecdim::Error as E;
        match self {
            CliError::Usage(_) => ExitCode::Usage,
            CliError::TableMismatch { .. } => ExitCode::TableMismatch,
            CliError::Violations { .. } => ExitCode::Violations,
            CliError::Bound(E::NonConvergence(_)) => ExitCode::NonConvergence,
            CliError::Bound(E::SearchCapExceeded { .. } | E::EnumerationCap { .. }) => ExitCode::CapExceeded,
            CliError::Bound(_) => ExitCode::Domain,
            CliError::Verify(ecdim_verify::VerifyError::Eigen) => ExitCode::NonConvergence,
            CliError::Verify(_) => ExitCode::Domain,
            CliError::Io { .. } | CliError::Parse { .. } | CliError::Output(_) => ExitCode::Io,
        }
    }
}
