use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid group: {0}")]
    InvalidGroup(String),

    #[error("{what} = {value} out of range (expected {range})")]
    OutOfRange {
        what: &'static str,
        value: usize,
        range: String,
    },

    #[error("operands belong to different groups")]
    SpecMismatch,

    #[error("length {got} does not match group order {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("weights {name} have Q_{n} = 0")]
    DegenerateWeights { name: String, n: usize },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("degenerate atom: {0}")]
    DegenerateAtom(String),

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("invalid atom: {0}")]
    InvalidAtom(String),

    #[error("empty index range")]
    EmptyRange,
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn out_of_range(what: &'static str, value: usize, range: impl Into<String>) -> Error {
    Error::OutOfRange {
        what,
        value,
        range: range.into(),
    }
}
