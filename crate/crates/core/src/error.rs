use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("encoding error: {0}")]
    Encoding(String),

    #[error("unused color code `11` in bitstring {0:?}")]
    UnusedColorCode(String),

    #[error("site {site} out of bounds [{min}, {max}]")]
    SiteOutOfBounds { site: i64, min: i64, max: i64 },

    #[error("width mismatch: expected {expected}, found {found}")]
    WidthMismatch { expected: usize, found: usize },

    #[error("length {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("singular zero-momentum mode: gluon mass is zero but the k=0 charge mode is {0:e}")]
    SingularMode(f64),

    #[error("lattice mismatch: {0}")]
    LatticeMismatch(String),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("invalid gate: {0}")]
    InvalidGate(String),

    #[error("projection impossible: success probability {0:e}")]
    ProjectionImpossible(f64),

    #[error("term index {index} out of range (L = {len})")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("negative LCU weight {0:e}; absorb the sign into the unitary first")]
    NegativeWeight(f64),

    #[error("operator is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("step grids differ: {0}")]
    GridMismatch(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Toml(#[from] toml::de::Error),
}
