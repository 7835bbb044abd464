use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("zero vector cannot represent a projective point")]
    ZeroVector,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("chart {chart} undefined here (coordinate modulus {modulus:e})")]
    ChartUndefined { chart: usize, modulus: f64 },
    #[error("affine points live in different charts: {0} vs {1}")]
    ChartMismatch(usize, usize),
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("measure has no atoms")]
    EmptyMeasure,
    #[error("operation needs at least two atoms")]
    SingleAtom,
    #[error("measures share an atom (sine distance below merge tolerance)")]
    SharedAtoms,
    #[error("radius grid is not strictly increasing")]
    UnsortedGrid,
    #[error("evaluation point coincides with an atom")]
    AtomCoincidence,
    #[error("need at least two points")]
    TooFewPoints,
    #[error("sampler exhausted: {0}")]
    SamplerExhausted(String),
    #[error("coincident samples in matrix assembly")]
    CoincidentSamples,
    #[error("degenerate Robin estimate {0}")]
    DegenerateGamma(f64),
    #[error("grid point closer than {0} to the target set")]
    GridTooClose(f64),
    #[error("target set snapshot is empty")]
    EmptySet,
    #[error("level {level} unreachable, best achieved bound {best}")]
    LevelUnreachable { level: u32, best: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),
    #[error("non-finite input: {0}")]
    NonFinite(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("malformed input file: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
