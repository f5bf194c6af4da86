use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KlrwError {
    #[error("ambiguous order between {0} and {1}: refine symbol shadows")]
    AmbiguousOrder(String, String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("quiver has an edge loop at {0}")]
    EdgeLoop(String),
    #[error("weight {0} is not dominant")]
    NotDominant(String),
    #[error("weight {0} is not below the highest weight")]
    NotBelow(String),
    #[error("non-integral input: {0}")]
    NonIntegralInput(String),
    #[error("flavour is not trivializable on edge {0}")]
    NonTrivializable(String),
    #[error("longitude {0} does not lie on a cover vertex")]
    CoverMismatch(String),
    #[error("covering graph has an edge loop at {0}")]
    EdgeLoopInCover(String),
    #[error("no matching between bottom and top: {0}")]
    NoMatching(String),
    #[error("sequence tags do not match: {0}")]
    TagMismatch(String),
    #[error("mismatch: {0}")]
    Mismatch(String),
    #[error("H = {0} is too small, need H > {1}")]
    HTooSmall(i64, String),
    #[error("component {0} carries framing")]
    FramedComponent(String),
    #[error("bad cocharacter: {0}")]
    BadCocharacter(String),
    #[error("matter is not invariant: {0}")]
    MatterNotInvariant(String),
    #[error("unknown symbol {0}")]
    UnknownSymbol(String),
}

impl KlrwError {
    pub fn parse(msg: impl Into<String>) -> Self {
        KlrwError::Parse { line: 0, msg: msg.into() }
    }

    pub fn at_line(self, line: usize) -> Self {
        match self {
            KlrwError::Parse { msg, .. } => KlrwError::Parse { line, msg },
            e => e,
        }
    }
}

pub type Result<T> = std::result::Result<T, KlrwError>;
