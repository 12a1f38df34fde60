use thiserror::Error;

/// Process exit codes. Every failure class maps to its own code.
pub mod exit {
    pub const OK: i32 = 0;
    pub const VERIFICATION_FAILED: i32 = 1;
    pub const USAGE: i32 = 2;
    pub const INVALID_INPUT: i32 = 3;
    pub const RESOURCE: i32 = 4;
    pub const ETA_INFINITE: i32 = 5;
    pub const IO: i32 = 6;
    pub const INSUFFICIENT_DATA: i32 = 7;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] takagi::Error),

    #[error("config: {0}")]
    Config(String),

    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),

    #[error("{0} check(s) failed")]
    VerificationFailed(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use takagi::Error as E;
        match self {
            CliError::Core(E::Domain(_) | E::Parse(_)) | CliError::Config(_) => exit::INVALID_INPUT,
            CliError::Core(E::Resource { .. }) => exit::RESOURCE,
            CliError::Core(E::EtaInfinite(_)) => exit::ETA_INFINITE,
            CliError::Core(E::Precondition(_) | E::InsufficientData(_)) => exit::INSUFFICIENT_DATA,
            CliError::Io(_) => exit::IO,
            CliError::VerificationFailed(_) => exit::VERIFICATION_FAILED,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
