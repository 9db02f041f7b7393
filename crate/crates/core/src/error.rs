use thiserror::Error;

/// Failure modes of the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("need at least {needed} points along the axis, got {got}")]
    TooFewPoints { needed: usize, got: usize },

    #[error("composite Simpson needs an odd number of points (>= 3), got {0}")]
    EvenPointCount(usize),

    #[error("interpolation data must be strictly increasing ({0})")]
    NonMonotoneData(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("operation needs a {expected} grid, got a {got} grid")]
    FrameMismatch {
        expected: &'static str,
        got: &'static str,
    },

    #[error("matrix at node ({i}, {j}) is not invertible (det = {det:e})")]
    SingularMatrix { i: usize, j: usize, det: f64 },

    #[error("invalid matrix entries: {0}")]
    InvalidMatrix(String),

    #[error("exponent {0:.3} is outside the representable range; shrink the window")]
    Overflow(f64),

    #[error("spectral parameter {0} sits on a pole (|lambda^2 - 1| < 1e-12)")]
    SpectralPole(f64),

    #[error("invalid soliton {index}: {reason}")]
    InvalidPole { index: usize, reason: String },

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("two-soliton form needs distinct poles (mu1 = mu2 = {0})")]
    DegeneratePair(f64),

    #[error("assembled entry has imaginary part {imag:e} (config not closed under conjugation?)")]
    NonRealOutput { imag: f64 },

    #[error("linear system is singular at pivot {0}")]
    SingularSystem(usize),

    #[error("no crest found in any time slice")]
    NoCrest,

    #[error(
        "degenerate field: {0}; the off-diagonal A12 must stay away from zero (for A12 = 0 the \
         field is diagonal and obeys the linear theory instead)"
    )]
    DegenerateField(String),

    #[error("unit constraint violated at node ({i}, {j}): |dLambda| = {value:.12}")]
    ConstraintViolation { i: usize, j: usize, value: f64 },

    #[error("Lambda = {value:e} <= {delta:e} at node ({i}, {j}); choose a window away from g = identity")]
    SingularLambda {
        i: usize,
        j: usize,
        value: f64,
        delta: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
