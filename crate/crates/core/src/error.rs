use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed input: {0}")]
    Parse(String),

    #[error("invalid mesh: {0}")]
    Mesh(String),

    #[error("invalid partition: {0}")]
    Partition(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("degenerate triangle {triangle} (area {area:e})")]
    DegenerateTriangle { triangle: usize, area: f64 },

    #[error("matrix is numerically singular at pivot {column} (|pivot| = {pivot:e}, max |a| = {max_entry:e})")]
    Singular {
        column: usize,
        pivot: f64,
        max_entry: f64,
    },

    #[error("pcg did not converge in {iterations} iterations (relative residual {residual:e})")]
    PcgNotConverged { iterations: usize, residual: f64 },

    #[error("pcg detected a non-positive curvature: {0}")]
    Indefinite(String),

    #[error("gmres stagnated after {iterations} iterations (relative residual {residual:e})")]
    Stagnation { iterations: usize, residual: f64 },

    #[error("operation not supported: {0}")]
    Unsupported(String),

    #[error("problem too large for dense computation: {size} > {cap}")]
    TooLarge { size: usize, cap: usize },
}

impl Error {
    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}
