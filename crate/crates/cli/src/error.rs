use thiserror::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error("model: {0}")]
    Model(#[from] bec_squeeze::Error),
    #[error("output: {0}")]
    Output(String),
}

impl CliError {
    /// Every error that reaches the top level is a usage or input problem;
    /// validation failures are reported through the command outcome.
    pub fn exit_code(&self) -> i32 {
        EXIT_USAGE
    }
}
