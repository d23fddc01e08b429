use thiserror::Error;

/// Errors raised by the numerical kernels.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// The truncated basis holds too much probability near its upper edge.
    #[error("truncation too small: tail mass {tail_mass:.3e} exceeds {limit:.1e} at dimension {dim}")]
    TruncationTooSmall { dim: usize, tail_mass: f64, limit: f64 },

    /// The requested state has zero norm (e.g. an odd cat at zero amplitude).
    #[error("degenerate input: {0}")]
    DegenerateInput(&'static str),

    /// The heralding event has (numerically) zero probability for these parameters.
    #[error("heralding impossible: output norm {norm:.3e} below threshold")]
    HeraldImpossible { norm: f64 },

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("unsupported herald order n = {0} (only 1, 2, 3 are tabulated)")]
    UnsupportedOrder(usize),

    /// The squeezed core of a GP state is undefined when |xi| >= 1.
    #[error("squeezed core undefined: |xi| = {0} >= 1")]
    CoreUndefined(f64),

    #[error("polynomial needs {needed} extra levels of headroom, only {available} available")]
    Headroom { needed: usize, available: usize },

    #[error("state is not a valid density operator: {0}")]
    InvalidState(String),

    #[error("unknown reference formula `{0}`")]
    UnknownKind(String),

    #[error("formula `{kind}` expects {expected} arguments, got {got}")]
    Arity { kind: String, expected: usize, got: usize },

    #[error("expansion outside its validity domain: {0}")]
    OutsideValidity(String),

    #[error("optimizer failed: {0}")]
    Optimizer(String),

    #[error("infeasible: constraint value {0:.3e} at the returned point")]
    Infeasible(f64),

    #[error("distribution is flat at the origin (|p''(0)| = {0:.3e})")]
    FlatAtOrigin(f64),

    #[error("distribution not normalized: integral = {0}")]
    NotNormalized(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
