use std::path::PathBuf;

use weakbeam_core::WeakBeamError;

use crate::config::ConfigInvalid;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigInvalid),
    #[error("scenario {scenario} failed at {at}: {source}")]
    Numeric {
        scenario: &'static str,
        at: String,
        #[source]
        source: WeakBeamError,
    },
    #[error("scenario {scenario} has no {plane} plane; only detector profiles exist")]
    PlaneUnavailable {
        scenario: &'static str,
        plane: &'static str,
    },
    #[error("config declares no sweep section")]
    NoSweep,
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}
