use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("development failed: {0}")]
    Development(String),

    #[error("genome parse error: {0}")]
    GenomeParse(String),

    #[error("genome record {index} (id {id}): {message}")]
    GeneRecord {
        index: usize,
        id: String,
        message: String,
    },

    #[error("blueprint parse error at line {line}, column {column}: {message}")]
    Blueprint {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid blueprint: {0}")]
    InvalidBlueprint(String),

    #[error("scenario error: {0}")]
    Scenario(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("analysis error: {0}")]
    Analysis(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
