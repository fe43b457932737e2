use std::fmt;

/// Errors raised anywhere in the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid shape: {0}")]
    InvalidShape(String),

    #[error("resolution too coarse: no active cell at h = {h}")]
    ResolutionTooCoarse { h: f64 },

    #[error("empty mask")]
    EmptyMask,

    #[error("polarizer is not grid compatible with spacing h = {h}")]
    NotGridCompatible { h: f64 },

    #[error("function takes negative values (min {min}); a non-negative function is required")]
    NegativeValues { min: f64 },

    #[error("pole of {name} at t = {t}")]
    Pole { name: &'static str, t: f64 },

    #[error("overflow evaluating {name} at t = {t}")]
    Overflow { name: &'static str, t: f64 },

    #[error("no negative eigenvalue for R = {radius}: operator positive, the infimum is 0 and not an eigenvalue")]
    NoNegativeEigenvalue { radius: f64 },

    #[error("point ({x}, {y}) lies outside the disc of radius {radius}")]
    OutsideDomain { x: f64, y: f64, radius: f64 },

    #[error("mask has {cells} active cells, above the cap of {cap}; try h >= {suggested_h:.4}")]
    CapExceeded {
        cells: usize,
        cap: usize,
        suggested_h: f64,
    },

    #[error("{what} did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence {
        what: String,
        iterations: usize,
        residual: f64,
    },

    #[error("inapplicable: {0}")]
    Inapplicable(String),

    #[error("mask format: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Coarse classification used for CLI exit codes and the C ABI.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorKind {
    Validation,
    Numerical,
    Io,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::NonConvergence { .. } | Error::Overflow { .. } | Error::Pole { .. } => {
                ErrorKind::Numerical
            }
            Error::Io(_) => ErrorKind::Io,
            _ => ErrorKind::Validation,
        }
    }

    /// Short stable identifier, used in machine-readable error output.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "invalid_input",
            Error::InvalidShape(_) => "invalid_shape",
            Error::ResolutionTooCoarse { .. } => "resolution_too_coarse",
            Error::EmptyMask => "empty_mask",
            Error::NotGridCompatible { .. } => "not_grid_compatible",
            Error::NegativeValues { .. } => "negative_values",
            Error::Pole { .. } => "pole",
            Error::Overflow { .. } => "overflow",
            Error::NoNegativeEigenvalue { .. } => "no_negative_eigenvalue",
            Error::OutsideDomain { .. } => "outside_domain",
            Error::CapExceeded { .. } => "cap_exceeded",
            Error::NonConvergence { .. } => "non_convergence",
            Error::Inapplicable(_) => "inapplicable",
            Error::Format(_) => "format",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }
}

impl fmt::Display for ErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ErrorKind::Validation => "validation",
            ErrorKind::Numerical => "numerical",
            ErrorKind::Io => "io",
        };
        f.write_str(s)
    }
}
