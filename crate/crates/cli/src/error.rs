use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("{module}: {source}")]
    Core {
        module: &'static str,
        #[source]
        source: symtomo::Error,
    },
}

impl CliError {
    /// 2 for configuration and input problems, 3 for numerical failures.
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Core { source, .. } if source.is_numerical() => 3,
            _ => 2,
        }
    }
}

/// Tags a core error with the module that raised it.
pub(crate) fn tag(module: &'static str) -> impl Fn(symtomo::Error) -> CliError {
    move |source| CliError::Core { module, source }
}
