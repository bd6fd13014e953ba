use std::fmt::Display;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("cannot access {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("config parse error: {0}")]
    Parse(serde_json::Error),
    #[error("invalid config field `{field}`: {message}")]
    Validation { field: String, message: String },
}

impl CliError {
    pub fn validation(field: &str, message: impl Display) -> Self {
        CliError::Validation { field: field.to_string(), message: message.to_string() }
    }
}
