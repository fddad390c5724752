use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{what}: argument {value} outside the domain")]
    Domain { what: &'static str, value: f64 },

    #[error("invalid spectrum: {0}")]
    InvalidSpectrum(String),

    #[error("eigenvalue index {index} out of range for a spectrum with {len} levels")]
    IndexOutOfRange { index: u64, len: usize },

    #[error("eigenvalue index {index} exceeds the multi-mode enumeration cap {cap}")]
    EnumerationCap { index: u64, cap: u64 },

    #[error("energy {energy} is below the ground energy {ground}")]
    BelowGround { energy: f64, ground: f64 },

    #[error("eigenvalue E_{m} coincides with the ground energy; the grounded gap is zero")]
    DegenerateGap { m: u64 },

    #[error("{0} did not converge")]
    NonConvergence(&'static str),

    #[error("no admissible m up to the search cap {cap} (best value {incumbent_value} at m = {incumbent_m})")]
    SearchCapExceeded {
        cap: u64,
        incumbent_m: u64,
        incumbent_value: f64,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),
}

impl Error {
    pub(crate) fn domain<T: crate::Real>(what: &'static str, value: T) -> Self {
        Error::Domain {
            what,
            value: value.as_f64(),
        }
    }
}
