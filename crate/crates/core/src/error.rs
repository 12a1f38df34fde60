use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("resource limit exceeded: {what} needs {needed} but the cap is {cap}")]
    Resource {
        what: &'static str,
        needed: u128,
        cap: u64,
    },

    #[error(
        "eta is infinite for this sequence (sup b^k|c_k| diverges); {0} requires a finite eta"
    )]
    EtaInfinite(&'static str),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("parse error: {0}")]
    Parse(String),
}
