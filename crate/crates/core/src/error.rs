use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("wavefunction not normalized (norm² = {norm2})")]
    NotNormalized { norm2: f64 },

    #[error("position {x} outside grid domain [{x_min}, {x_max}]")]
    OutOfDomain { x: f64, x_min: f64, x_max: f64 },

    #[error("wavepacket leaks off the grid edges (edge amplitude {amplitude:e})")]
    Leakage { amplitude: f64 },

    #[error("edge probability {probability:e} exceeds {limit:e} at step {step}")]
    EdgeLeakage { step: usize, probability: f64, limit: f64 },

    #[error("time lattice is empty")]
    EmptyTimes,

    #[error("amplitude has zero total weight")]
    ZeroWeight,

    #[error("samples do not decay at the window edges (relative edge magnitude {relative:e})")]
    NotDecayed { relative: f64 },

    #[error("boundary condition violated: {0}")]
    Boundary(String),

    #[error("energy lattice too coarse: norm deficit {deficit:e}")]
    LatticeTooCoarse { deficit: f64 },

    #[error("no convergence: {0}")]
    NonConvergence(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// True for failures of an iterative numerical procedure, as opposed to
    /// rejected input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonConvergence(_) | Error::EdgeLeakage { .. } | Error::LatticeTooCoarse { .. }
        )
    }
}
