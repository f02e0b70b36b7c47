use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid FKM pair (m = {m}, k = {k}): l - m - 1 = {m_minus} must be positive")]
    InvalidFkmPair { m: usize, k: usize, m_minus: i64 },

    #[error("focal degeneracy: 1 - F^2 = {gap:e} is below the regularity threshold")]
    FocalDegeneracy { gap: f64 },

    #[error("point is not on {variety}: membership residual {residual:e}")]
    WrongVariety { variety: String, residual: f64 },

    #[error(
        "rank deficiency on {variety}: expected {expected} independent directions, found {found}"
    )]
    RankDeficiency {
        variety: String,
        expected: usize,
        found: usize,
    },

    #[error("Newton projection did not converge after {restarts} restarts")]
    NewtonDivergence { restarts: usize },

    #[error("degenerate start: {0}")]
    DegenerateStart(String),

    #[error("expected {expected} critical points of {function}, found {found}")]
    WrongCount {
        function: String,
        expected: usize,
        found: usize,
    },

    #[error("degenerate parameter: {0}")]
    DegenerateParameter(String),

    #[error("ambiguous eigenvalue clustering, raw spectrum {spectrum:?}")]
    ClusteringAmbiguity { spectrum: Vec<f64> },

    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
