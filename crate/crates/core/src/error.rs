use thiserror::Error;

/// Failure modes across the crate. Each variant is named after the invariant
/// it reports so callers surfacing errors to users can show which contract a
/// bad input violated.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("DimensionMismatch: expected dimension {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("NotHermitian: matrix deviates from its adjoint by {deviation:.3e}")]
    NotHermitian { deviation: f64 },

    #[error("NotFinite: entry at ({row}, {col}) is not a finite number")]
    NotFinite { row: usize, col: usize },

    #[error("DidNotConverge: eigensolver exceeded {sweeps} sweeps")]
    DidNotConverge { sweeps: usize },

    #[error("NotPSD: smallest eigenvalue {min_eigenvalue:.3e} is below tolerance")]
    NotPSD { min_eigenvalue: f64 },

    #[error("NotEffect: eigenvalue {eigenvalue:.6e} lies outside [0, 1]")]
    NotEffect { eigenvalue: f64 },

    #[error("NotPartialState: trace {trace:.6e} exceeds 1")]
    NotPartialState { trace: f64 },

    #[error("NotState: trace {trace:.6e} is not 1")]
    NotState { trace: f64 },

    #[error("NotUnitVector: norm {norm:.6e} is not 1")]
    NotUnitVector { norm: f64 },

    #[error("ZeroVector: cannot normalize a vector of norm {norm:.3e}")]
    ZeroVector { norm: f64 },

    #[error("ConditionOnNull: conditioning event has probability {probability:.3e}")]
    ConditionOnNull { probability: f64 },

    #[error("NotResolution: effects sum to a matrix {deviation:.3e} away from the identity")]
    NotResolution { deviation: f64 },

    #[error("DuplicateLabel: outcome label {label:?} appears more than once")]
    DuplicateLabel { label: String },

    #[error("EmptyOutcomeSet: an observable needs at least one outcome")]
    EmptyOutcomeSet,

    #[error("MissingOutcomeValues: outcome {label:?} carries no numeric value")]
    MissingOutcomeValues { label: String },

    #[error("WeightError: {reason}")]
    WeightError { reason: String },

    #[error("OutcomeMismatch: {reason}")]
    OutcomeMismatch { reason: String },

    #[error("ShapeMismatch: {reason}")]
    ShapeMismatch { reason: String },

    #[error("NotStochastic: row {row} sums to {sum:.6e}")]
    NotStochastic { row: usize, sum: f64 },

    #[error("ProbabilityRange: channel entry ({row}, {col}) = {value:.6e} lies outside [0, 1]")]
    ProbabilityRange { row: usize, col: usize, value: f64 },

    #[error("FunctionDomainError: no table entry for outcome {label:?}")]
    FunctionDomainError { label: String },

    #[error("TooFewOutcomes: complement needs at least 2 outcomes, got {got}")]
    TooFewOutcomes { got: usize },

    #[error("ZeroEffect: outcome {label:?} has a numerically zero effect")]
    ZeroEffect { label: String },

    #[error("DegenerateComplement: complement of outcome {label:?} is the zero effect")]
    DegenerateComplement { label: String },

    #[error("UnknownTheorem: no registered check named {id:?}")]
    UnknownTheorem { id: String },

    #[error("EmptyRange: {what} range has no elements")]
    EmptyRange { what: String },

    #[error("InvalidTolerance: {reason}")]
    InvalidTolerance { reason: String },

    #[error("ToleranceAlreadyInstalled: the tolerance policy was already fixed for this process")]
    ToleranceAlreadyInstalled,
}

pub type Result<T> = std::result::Result<T, Error>;
