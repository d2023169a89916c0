use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian (max |H - H^dagger| = {deviation:.3e})")]
    NonHermitian { deviation: f64 },

    #[error("dimension mismatch: {0}")]
    DimMismatch(String),

    #[error("Kraus operators violate completeness (max deviation {deviation:.3e})")]
    IncompleteChannel { deviation: f64 },

    #[error("invalid quantum state: {0}")]
    InvalidState(String),

    #[error("invalid measurement: {0}")]
    InvalidPovm(String),

    #[error("energy bound {omega} is outside the admissible range: {reason}")]
    InvalidEnergy { omega: f64, reason: String },

    #[error("energy {omega} exceeds d^-m = {limit}")]
    EnergyTooHigh { omega: f64, limit: f64 },

    #[error("invalid scheme parameters: {0}")]
    InvalidParams(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("problem is infeasible: {0}")]
    Infeasible(String),

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("rejection sampling exhausted after {proposals} proposals")]
    SamplingExhausted { proposals: usize },

    #[error("observation is not reachable by the attack family: {0}")]
    InfeasibleObservation(String),

    #[error("optimization failed: {0}")]
    OptimizationFailure(String),
}

impl Error {
    /// Short variant name, used by the CLI when reporting failures.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NonSquare { .. } => "NonSquare",
            Error::NonHermitian { .. } => "NonHermitian",
            Error::DimMismatch(_) => "DimMismatch",
            Error::IncompleteChannel { .. } => "IncompleteChannel",
            Error::InvalidState(_) => "InvalidState",
            Error::InvalidPovm(_) => "InvalidPovm",
            Error::InvalidEnergy { .. } => "InvalidEnergy",
            Error::EnergyTooHigh { .. } => "EnergyTooHigh",
            Error::InvalidParams(_) => "InvalidParams",
            Error::InvalidInput(_) => "InvalidInput",
            Error::ShapeMismatch(_) => "ShapeMismatch",
            Error::Infeasible(_) => "Infeasible",
            Error::NumericalFailure(_) => "NumericalFailure",
            Error::SamplingExhausted { .. } => "SamplingExhausted",
            Error::InfeasibleObservation(_) => "InfeasibleObservation",
            Error::OptimizationFailure(_) => "OptimizationFailure",
        }
    }

    /// True for failures that originate in a numerical solver.
    pub fn is_solver_failure(&self) -> bool {
        matches!(
            self,
            Error::Infeasible(_)
                | Error::NumericalFailure(_)
                | Error::SamplingExhausted { .. }
                | Error::OptimizationFailure(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
