use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    Grid(String),
    #[error("non-finite value in {what} at index {index}")]
    NonFinite { what: &'static str, index: usize },
    #[error("field length {got} does not match grid size {expected}")]
    Length { expected: usize, got: usize },
    #[error("invalid kernel: {0}")]
    Kernel(String),
    #[error("repulsive kernel: second moment {m2:.6e} is not negative")]
    RepulsiveKernel { m2: f64 },
    #[error("kernel tail mass {tail:.3e} outside the half domain exceeds 1e-12")]
    KernelTail { tail: f64 },
    #[error("invalid parameter {name}: {reason}")]
    Param { name: String, reason: String },
    #[error("insufficient history: {0}")]
    History(String),
    #[error("density below floor: {0}")]
    Vacuum(String),
    #[error("integration aborted at t = {time:.6}: {reason}")]
    Unstable { time: f64, reason: String },
    #[error("primitive recovery failed at grid point {index}: residual {residual:.3e}")]
    Recovery { index: usize, residual: f64 },
    #[error("config: {0}")]
    Config(String),
    #[error("unknown scenario '{0}'")]
    UnknownScenario(String),
    #[error("validation failed for: {}", .0.join(", "))]
    Validation(Vec<String>),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn param(name: &str, reason: impl Into<String>) -> Self {
        Error::Param { name: name.to_string(), reason: reason.into() }
    }

    /// True for failures raised while integrating, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Unstable { .. } | Error::Recovery { .. } | Error::NonFinite { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
