use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("event or subalgebra belongs to a different algebra")]
    ForeignEvent,
    #[error("tuple must contain at least one event")]
    EmptyTuple,
    #[error("events do not form a partition of 1: {0}")]
    NotAPartition(String),
    #[error("length {0} is not a power of two")]
    BadLength(usize),
    #[error("value {0} is outside [0,1]")]
    ValueOutOfRange(String),
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("algebra has {atoms} atoms, above the cap of {cap}")]
    AtomCapExceeded { atoms: usize, cap: usize },
    #[error("unsupported connective: {0}")]
    UnsupportedConnective(String),
    #[error("first subalgebra is not coarser than the second")]
    NotCoarsening,
    #[error("invalid type descriptor: {0}")]
    InvalidDescriptor(String),
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("partition length {0} is odd")]
    OddLength(usize),
    #[error("invalid algebra: {0}")]
    InvalidAlgebra(String),
    #[error("search space too large: {0}")]
    SearchTooLarge(String),
    #[error("invalid structure document: {0}")]
    Document(String),
}

impl Error {
    /// True for errors raised while reading text (formulas, rationals).
    pub fn is_parse_error(&self) -> bool {
        matches!(self, Error::Syntax { .. } | Error::UnknownSymbol(_))
    }
}
