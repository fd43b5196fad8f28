use thiserror::Error;

/// Failures raised by the operator algebra, the engines and the path tools.
///
/// Every message starts with the variant name so front ends can surface a
/// stable one-word diagnostic.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(
        "NonHermitianInput: asymmetry {asymmetry:.3e} exceeds symmetrization bound {bound:.3e}"
    )]
    NonHermitianInput { asymmetry: f64, bound: f64 },

    #[error("NonFiniteEntry: entry ({row}, {col}) is not finite")]
    NonFiniteEntry { row: usize, col: usize },

    #[error("DimensionMismatch: expected dimension {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("QuadratureFailure: tolerance {tol:.3e} not reached on [{lo}, {hi}] within {evaluations} evaluations")]
    QuadratureFailure {
        tol: f64,
        lo: f64,
        hi: f64,
        evaluations: usize,
    },

    #[error("GuardViolation: lambda {lambda} lies within {guard:.3e} of eigenvalue {eigenvalue}")]
    GuardViolation {
        lambda: f64,
        eigenvalue: f64,
        guard: f64,
    },

    #[error("BranchAmbiguity: argument increment bound unattainable near lambda {lambda} at epsilon {epsilon:.3e}")]
    BranchAmbiguity { lambda: f64, epsilon: f64 },

    #[error("KreinNotConverged: estimate at lambda {lambda} still moving by {change:.3e} at epsilon_min {epsilon_min:.3e}")]
    KreinNotConverged {
        lambda: f64,
        change: f64,
        epsilon_min: f64,
    },

    #[error("LabelStructureViolation: {0}")]
    LabelStructureViolation(String),

    #[error("EndpointDegeneracy: lambda {lambda} lies within {guard:.3e} of endpoint eigenvalue {eigenvalue}")]
    EndpointDegeneracy {
        lambda: f64,
        eigenvalue: f64,
        guard: f64,
    },

    #[error("TangentialCrossing: crossing direction unresolved near r = {r}")]
    TangentialCrossing { r: f64 },

    #[error("InvalidArgument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
