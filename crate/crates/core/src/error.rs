use thiserror::Error;

/// Errors raised by the tomography pipeline.
///
/// Variants carry enough context to name the failing module and quantity so
/// that front ends can report them without further wrapping.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("matrix is not Hermitian (max deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("generator {index} is not unitary (deviation {deviation:.3e})")]
    NotUnitary { index: usize, deviation: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("insufficient quorum: pool reaches rank {achieved} of {required} (deficit {})", required - achieved)]
    InsufficientQuorum { achieved: usize, required: usize },

    #[error("under-determined system: design matrix rank {rank} < {required}")]
    UnderDetermined { rank: usize, required: usize },

    #[error("infeasible constraints: worst violation {violation:.3e} at measurement {index}")]
    Infeasible { index: usize, violation: f64 },

    #[error("solver did not converge after {iterations} iterations (gap {gap:.3e})")]
    NotConverged { iterations: usize, gap: f64 },

    #[error("unknown symmetry '{name}'; available: {available}")]
    UnknownSymmetry { name: String, available: String },

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for failures of the numerics on valid input (as opposed to bad
    /// configuration or malformed data).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Self::Numerical(_)
                | Self::UnderDetermined { .. }
                | Self::Infeasible { .. }
                | Self::NotConverged { .. }
        )
    }
}
