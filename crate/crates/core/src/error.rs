use std::path::PathBuf;

use crate::coincidence::CoincidenceError;
use crate::distance::DistanceError;
use crate::ingest::ParseError;
use crate::session::SessionError;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Model(#[from] CoincidenceError),
    #[error(transparent)]
    Distance(#[from] DistanceError),
    #[error(transparent)]
    Session(#[from] SessionError),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
