use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("lexicon error: {0}")]
    Lexicon(String),
    #[error("arity error: {0}")]
    Arity(String),
    #[error("color mismatch: leaf expects {expected}, operand root is {found}")]
    ColorMismatch { expected: String, found: String },
    #[error("guard exceeded: more than {0} items")]
    Guard(usize),
    #[error("invalid operand selector: {0}")]
    Selector(String),
    #[error("rejected: {0}")]
    Rejected(String),
}

impl Error {
    pub fn parse(pos: usize, msg: impl Into<String>) -> Self {
        Error::Parse { pos, msg: msg.into() }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
