use std::path::PathBuf;

/// Errors produced anywhere in the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),
    #[error("schedule time column is not strictly increasing at row {row}")]
    NonMonotonicTime { row: usize },
    #[error("malformed schedule row {row}: {reason}")]
    MalformedRow { row: usize, reason: String },
    #[error("schedule needs at least 2 knots, found {0}")]
    TooFewKnots(usize),
    #[error("time {t} lies outside the schedule domain [0, {tau}]")]
    OutOfDomain { t: f64, tau: f64 },

    #[error("quadrature did not converge after {refinements} refinements (last change {last_change:e})")]
    QuadratureDiverged { refinements: u32, last_change: f64 },
    #[error("no annealing time in [{lo}, {hi}] reaches beta = {target}")]
    NoSolution { target: f64, lo: f64, hi: f64 },

    #[error("invalid Ising problem: {0}")]
    InvalidProblem(String),
    #[error("{what}: {size} exceeds the size cap of {cap}")]
    SizeCap { what: &'static str, size: usize, cap: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("integration unstable: norm deviation {deviation:e} at t = {t}; reduce the step size")]
    Unstable { deviation: f64, t: f64 },
    #[error("excited-state population vanished; beta is unbounded")]
    VanishingPopulation,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("an outcome was never observed (counts {ground}, {excited}); beta is unbounded")]
    ZeroCount { ground: u64, excited: u64 },
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),
    #[error("reference beta must be positive, got {0}")]
    NonPositiveReference(f64),
    #[error("alpha must be positive, got {0}")]
    NonPositiveAlpha(f64),

    #[error("backend '{backend}' cannot sample {target}")]
    UnsupportedTarget { backend: &'static str, target: &'static str },
    #[error("remote endpoint unreachable: {0}")]
    Unreachable(String),
    #[error("malformed response: {0}")]
    MalformedResponse(String),
    #[error("remote rejected the request with status {status}: {message}")]
    RemoteRejected { status: u16, message: String },

    #[error("empty batch: {0}")]
    EmptyBatch(&'static str),
    #[error("non-finite gradient at epoch {epoch}; the learning rate is probably too large")]
    NonFiniteGradient { epoch: usize },
    #[error("checkpoint version {found} is not supported (expected {expected})")]
    VersionMismatch { found: u64, expected: u64 },
    #[error("corrupt checkpoint: {0}")]
    CorruptCheckpoint(String),

    #[error("dataset is empty")]
    EmptyDataset,
    #[error("malformed PBM image {path:?}: {reason}")]
    MalformedPbm { path: PathBuf, reason: String },

    #[error("I/O error on {path:?}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
