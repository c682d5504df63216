use thiserror::Error;

/// Errors raised by the ranking, fitting and diagnostics routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("power iteration did not converge after {iterations} iterations (last residual {residual:e})")]
    Convergence { iterations: usize, residual: f64 },

    #[error("column for `{label}` sums to zero; undamped chain has a dangling node")]
    DanglingNode { label: String },

    #[error("count matrix is reducible; unreachable from `{label}`")]
    Reducible { label: String },

    #[error("comparison graph is disconnected; components: {}", format_components(.components))]
    Disconnected { components: Vec<Vec<String>> },

    #[error("maximum likelihood estimate does not exist: {0}")]
    Separation(String),

    #[error("matrix is not quasi-symmetric: residual {residual:e} at ({row}, {col})")]
    NotQuasiSymmetric { residual: f64, row: String, col: String },

    #[error("vector is not stationary for the transition matrix (residual {residual:e})")]
    Consistency { residual: f64 },

    #[error("{rejections} of {attempts} simulated tournaments were degenerate; increase games per pair")]
    Degenerate { rejections: usize, attempts: usize },

    #[error("singular value decomposition failed to converge after {sweeps} sweeps")]
    Decomposition { sweeps: usize },

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

fn format_components(components: &[Vec<String>]) -> String {
    components
        .iter()
        .map(|c| format!("{{{}}}", c.join(", ")))
        .collect::<Vec<_>>()
        .join(" ")
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
