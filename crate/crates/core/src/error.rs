use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("angle {angle} rad is outside the sensor range {range}")]
    AngleOutOfRange { angle: f64, range: &'static str },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("row {row}: {message}")]
    Row { row: u64, message: String },

    #[error("schema error: {0}")]
    Schema(String),

    #[error("wiper {wiper} has no usable calibration samples")]
    InsufficientCoverage { wiper: usize },

    #[error("need at least {required} samples to fit a cubic, got {got}")]
    TooFewSamples { required: usize, got: usize },

    #[error("calibration sweep spans {span:.1} counts, less than the required {required:.1}")]
    InsufficientSpan { span: f64, required: f64 },

    #[error("rank-deficient design: only {distinct} distinct voltages")]
    RankDeficient { distinct: usize },

    #[error("cubic is not monotone on its voltage window [{lo}, {hi}]")]
    NonMonotone { lo: f64, hi: f64 },

    #[error("target angle {target} rad is outside the model range [{lo}, {hi}]")]
    OutOfModelRange { target: f64, lo: f64, hi: f64 },

    #[error("cannot initialize filter: {0}")]
    Initialization(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    /// Process exit code for the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::AngleOutOfRange { .. }
            | Error::Config(_)
            | Error::Row { .. }
            | Error::Schema(_)
            | Error::Json(_)
            | Error::Csv(_) => 2,
            Error::InsufficientCoverage { .. }
            | Error::TooFewSamples { .. }
            | Error::InsufficientSpan { .. }
            | Error::RankDeficient { .. }
            | Error::NonMonotone { .. }
            | Error::OutOfModelRange { .. }
            | Error::Initialization(_)
            | Error::Numerical(_) => 3,
            Error::Io(_) => 4,
        }
    }
}
