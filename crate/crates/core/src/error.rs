use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parse error: {0}")]
    Parse(String),

    /// The weight family lies in the wrong branch of the dichotomy for the
    /// requested operation.
    #[error("classification precondition: {0}")]
    Precondition(String),

    #[error("infeasible: block length d_{k} would exceed cap {cap}")]
    Infeasible { k: usize, cap: u64 },

    #[error("resource cap exceeded: {0}")]
    Resource(String),

    #[error("size limit exceeded: {0}")]
    Size(String),

    #[error("certification failure: {condition} violated, residual {residual}")]
    Certification { condition: String, residual: String },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code used by the command-line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidInput(_)
            | Error::Parse(_)
            | Error::Precondition(_)
            | Error::Io(_)
            | Error::Json(_) => 2,
            Error::Certification { .. } => 3,
            Error::Infeasible { .. } | Error::Resource(_) | Error::Size(_) => 4,
        }
    }
}
