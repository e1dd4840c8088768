use thiserror::Error;

/// Usage and configuration failures; every variant exits with code 3.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("config: {0}")]
    Config(String),

    #[error("{field}: {message}")]
    Field { field: String, message: String },

    #[error(transparent)]
    Core(#[from] traceineq::Error),
}

impl CliError {
    pub fn field(field: impl Into<String>, message: impl ToString) -> Self {
        CliError::Field {
            field: field.into(),
            message: message.to_string(),
        }
    }
}
