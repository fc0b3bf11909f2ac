use std::path::Path;

use shortdesc::agreement::AgreementError;
use shortdesc::corpus::CorpusError;
use shortdesc::metrics::MetricsError;
use shortdesc::ranker::RankerError;
use shortdesc::sentiment::SentimentError;
use shortdesc::wikiclient::FetchError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error("{0}")]
    Transport(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Data(_) => 3,
            CliError::Transport(_) => 4,
        }
    }

    pub fn io(path: &Path, err: std::io::Error) -> Self {
        CliError::Data(format!("{}: {err}", path.display()))
    }

    /// Prefixes a data error with the file it came from.
    pub fn in_file(self, path: &Path) -> Self {
        match self {
            CliError::Data(msg) => CliError::Data(format!("{}: {msg}", path.display())),
            other => other,
        }
    }
}

impl From<FetchError> for CliError {
    fn from(e: FetchError) -> Self {
        match e {
            FetchError::Transport(_) => CliError::Transport(e.to_string()),
            _ => CliError::Data(e.to_string()),
        }
    }
}

impl From<CorpusError> for CliError {
    fn from(e: CorpusError) -> Self {
        match e {
            CorpusError::Fetch(inner) => inner.into(),
            CorpusError::BadRatios(_) | CorpusError::BadPrefixLengths => {
                CliError::Usage(e.to_string())
            }
            _ => CliError::Data(e.to_string()),
        }
    }
}

impl From<SentimentError> for CliError {
    fn from(e: SentimentError) -> Self {
        match e {
            SentimentError::BadAlpha(_) | SentimentError::UnknownPolarity(_) => {
                CliError::Usage(e.to_string())
            }
            _ => CliError::Data(e.to_string()),
        }
    }
}

macro_rules! data_error {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Data(e.to_string())
            }
        }
    )*};
}

data_error!(RankerError, AgreementError, MetricsError, serde_json::Error);
