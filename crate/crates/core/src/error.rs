use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid array configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid user position (r = {distance}, theta = {angle})")]
    InvalidUser { distance: f64, angle: f64 },

    #[error("element index {0} is not on the array grid")]
    IndexOffGrid(f64),

    #[error("channel set is rank deficient (user {user})")]
    RankDeficient { user: usize },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("gain {gain} at position {index} is not strictly positive")]
    NonPositiveGain { index: usize, gain: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("exhaustive search over {users} users exceeds the cap of {cap}")]
    EnumerationCap { users: usize, cap: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("element spacing d/lambda = {0} is not supported by the partition bound (needs 1/2)")]
    UnsupportedSpacing(f64),

    #[error("trial {trial} (M = {num_antennas}, snr = {snr_db} dB): {source}")]
    Trial {
        trial: u64,
        num_antennas: usize,
        snr_db: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("config line {line}: {msg}")]
    ConfigParse { line: usize, msg: String },

    #[error("csv parse error at line {line}: {msg}")]
    CsvParse { line: usize, msg: String },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
