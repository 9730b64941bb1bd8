use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("Fock cutoff must be at least 1, got {0}")]
    InvalidCutoff(usize),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },

    #[error(
        "cutoff guard violated: amplitude {amplitude:.6} requires N_max >= {required}, \
         but the cutoff is {cutoff}"
    )]
    CutoffGuard {
        amplitude: f64,
        required: usize,
        cutoff: usize,
    },

    #[error("operator is not Hermitian (max |H - H†| = {0:e})")]
    NotHermitian(f64),

    #[error("operator is not unitary (max |U†U - I| = {0:e})")]
    NotUnitary(f64),

    #[error("state vector has zero norm")]
    ZeroNorm,

    #[error("light-mode frequency is zero; use the coupling-only propagator instead")]
    ZeroFrequency,

    #[error("invalid time grid: {0}")]
    InvalidGrid(String),

    #[error("trajectory does not store states")]
    MissingStates,

    #[error("drive signal has {found} samples, grid has {expected}")]
    SignalMismatch { expected: usize, found: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("cannot parse initial state `{spec}`: {reason}")]
    InitialState { spec: String, reason: String },

    #[error("unknown model kind `{0}`")]
    UnknownKind(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
