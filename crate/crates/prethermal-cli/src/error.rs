use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Library(#[from] prethermal::Error),
    #[error("criterion {id} ({name}) failed: {detail}")]
    Criterion { id: u8, name: &'static str, detail: String },
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Usage(..) => "usage",
            CliError::Io { .. } => "io",
            CliError::Library(e) => e.kind(),
            CliError::Criterion { .. } => "criterion",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Criterion { .. } => 1,
            _ => 2,
        }
    }

    /// Single-line `error kind=… message="…"` record for stderr.
    pub fn machine_line(&self) -> String {
        let msg = self.to_string().replace('\\', "\\\\").replace('"', "\\\"").replace('\n', " ");
        format!("error kind={} message=\"{msg}\"", self.kind())
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub fn config_err<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Config(msg.into()))
}
