use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("grid: {0}")]
    Grid(String),

    #[error("data spec: {0}")]
    Data(String),

    #[error("solver: non-finite {field} at node {index} (t = {t})")]
    NonFinite {
        field: &'static str,
        index: usize,
        t: f64,
    },

    #[error("solver: blow-up guard tripped, sup|{field}| = {value:e} at t = {t}")]
    BlowUp {
        field: &'static str,
        value: f64,
        t: f64,
    },

    #[error("solver: final time {t_final} is not a multiple of dt = {dt}")]
    Incommensurate { t_final: f64, dt: f64 },

    #[error("solver: {0}")]
    Solver(String),

    #[error("picard: divergence at iterate {iterate} (contraction factor {factor:.3e})")]
    Divergence { iterate: usize, factor: f64 },

    #[error("spaces: {0}")]
    Spaces(String),

    #[error("probe: {0}")]
    Probe(String),

    #[error("config line {line}: key `{key}`: {message}")]
    Config {
        line: usize,
        key: String,
        message: String,
    },

    #[error("config: {0}")]
    Scenario(String),

    #[error("io: {path}: {source}")]
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
