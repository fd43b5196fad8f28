use std::path::Path;

use thiserror::Error;

/// Front-end failures. All of them exit with status 2.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("io: {input}: {msg}")]
    Io { input: String, msg: String },
    #[error("parse: {input}: {msg}")]
    Parse { input: String, msg: String },
    #[error("{op}: {source} (input: {input})")]
    Module {
        op: &'static str,
        input: String,
        source: specshift::Error,
    },
}

impl CliError {
    pub fn module(op: &'static str, input: impl AsRef<Path>, source: specshift::Error) -> Self {
        CliError::Module {
            op,
            input: input.as_ref().display().to_string(),
            source,
        }
    }
}
