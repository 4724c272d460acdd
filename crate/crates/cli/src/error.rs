use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    /// A library failure, tagged with the computation that raised it.
    #[error("{stage}: {source}")]
    Stage {
        stage: String,
        #[source]
        source: drinfeld::Error,
    },
    #[error("unknown command `{0}`")]
    UnknownCommand(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn stage(stage: &str, source: drinfeld::Error) -> CliError {
        CliError::Stage { stage: stage.into(), source }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
