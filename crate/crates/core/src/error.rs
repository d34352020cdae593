use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("basis argument ζ = {0} lies outside [0, 1]")]
    ZetaOutOfRange(f64),

    #[error("water height must be positive, got h = {0}")]
    NonPositiveHeight(f64),

    #[error("radius must be positive, got r = {0}")]
    NonPositiveRadius(f64),

    #[error("slip length must be positive, got λ = {0}")]
    NonPositiveSlip(f64),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("state has {got} components, orders ({nr}, {nt}) need {expected}")]
    DimensionMismatch {
        nr: usize,
        nt: usize,
        expected: usize,
        got: usize,
    },

    #[error("no closed form for orders ({nr}, {nt}); use generic assembly")]
    NoClosedForm { nr: usize, nt: usize },

    #[error(
        "eigenvalue iteration did not converge for a {dim}x{dim} matrix after {iterations} sweeps"
    )]
    EigenNoConvergence { dim: usize, iterations: usize },

    #[error("non-finite matrix entry at ({row}, {col})")]
    NonFiniteMatrix { row: usize, col: usize },

    #[error("solver breakdown in cell {cell} at t = {time}: {reason}")]
    SolverBreakdown {
        cell: usize,
        time: f64,
        reason: String,
    },

    #[error("snapshots live on different grids ({left} vs {right} cells)")]
    GridMismatch { left: usize, right: usize },

    #[error("reference field `{0}` has zero L1 norm")]
    ZeroReferenceNorm(&'static str),

    #[error("unknown {kind} `{name}` (known: {known})")]
    UnknownName {
        kind: &'static str,
        name: String,
        known: String,
    },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
