use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix has zero dimension")]
    EmptyMatrix,
    #[error("matrix contains non-finite entries")]
    NonFinite,
    #[error("matrix is not Hermitian (scaled deviation {deviation:e})")]
    NotHermitian { deviation: f64 },
    #[error("state trace {trace:e} differs from 1")]
    TraceMismatch { trace: f64 },
    #[error("state is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPositive { min_eigenvalue: f64 },
    #[error("Kraus operators are incomplete (residual {residual:e})")]
    IncompleteChannel { residual: f64 },
    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("observable has no terms")]
    EmptyObservable,
    #[error("polynomial degree {degree} exceeds the maximum of {max}")]
    PolynomialDegree { degree: usize, max: usize },
    #[error("degenerate spectrum (eigenvalue gap {gap:e})")]
    DegenerateSpectrum { gap: f64 },
    #[error("eigenvector pairing is ambiguous (overlaps {best:.6} and {runner_up:.6})")]
    AmbiguousPairing { best: f64, runner_up: f64 },
    #[error("positivity lost at t = {t}: min eigenvalue {min_eigenvalue:e}")]
    PositivityViolation { t: f64, min_eigenvalue: f64 },
    #[error("state check failed at t = {t}: {source}")]
    StateAt {
        t: f64,
        #[source]
        source: Box<Error>,
    },
    #[error("grid index {index} has no two-sided neighbours (grid length {len})")]
    GridBoundary { index: usize, len: usize },
    #[error("time {t} is not on the trajectory grid")]
    NotOnGrid { t: f64 },
    #[error("time grid is invalid: {0}")]
    InvalidGrid(&'static str),
    #[error("trajectory has no generating model; analytic state derivative unavailable")]
    NoGenerator,
    #[error("model has jump operators; a closed system is required")]
    JumpOperatorsPresent,
    #[error("generator is time dependent; exact exponential requires a constant generator")]
    TimeDependentGenerator,
    #[error("state derivative is not traceless (trace {trace:e})")]
    NotTraceless { trace: f64 },
}
