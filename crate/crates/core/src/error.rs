use thiserror::Error;

/// Errors surfaced by the solver and its support layers.
#[derive(Debug, Error)]
pub enum Error {
    /// A configuration value is out of range or inconsistent.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// Two fields (or a field and a solver) were built on different tori.
    #[error("configuration mismatch: {0}")]
    ConfigMismatch(String),

    /// A mode index falls outside the retained wavevector ball.
    #[error("mode k = ({0}, {1}, {2}) is outside the retained lattice")]
    ModeOutsideLattice(i32, i32, i32),

    /// The k = 0 (mean) component is not representable; retained fields have
    /// zero spatial mean by construction.
    #[error("a k = 0 coefficient was supplied; fields carry no mean component")]
    ZeroMode,

    /// The physical grid cannot hold the requested spectral band.
    #[error("grid of {grid_n} points per axis is too small for truncation radius {trunc_n}")]
    GridTooSmall { grid_n: usize, trunc_n: u32 },

    /// A parameter combination violates the hypothesis required by the
    /// requested diagnostic and no override was requested.
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    /// A step produced NaN or infinity.
    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),

    /// A field container did not parse.
    #[error("malformed snapshot: {0}")]
    Snapshot(String),
}

pub type Result<T> = std::result::Result<T, Error>;
