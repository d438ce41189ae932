use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid rank {0}: must be between 1 and 26")]
    InvalidRank(usize),

    #[error("letter '{letter}' at offset {offset} is outside rank {rank}")]
    LetterOutOfRank {
        letter: char,
        offset: usize,
        rank: usize,
    },

    #[error("invalid character '{ch}' at offset {offset} in word literal")]
    InvalidCharacter { ch: char, offset: usize },

    #[error("word literal '{0}' is not reduced")]
    NotReduced(String),

    #[error("the pattern word must not be the identity")]
    IdentityPattern,

    #[error("scheme configuration error: {0}")]
    Config(String),

    #[error("malformed descriptor '{descriptor}': {reason}")]
    Descriptor { descriptor: String, reason: String },

    #[error("'{0}' is not a piece of the scheme")]
    NotAPiece(String),

    #[error("degree mismatch: expected {expected}, got {got}")]
    Degree { expected: usize, got: usize },

    #[error("cochain domain mismatch: {0}")]
    Domain(String),

    #[error("tuple is not aligned: {0}")]
    NotAligned(String),

    #[error("unsupported quasimorphism: {0}")]
    Unsupported(String),

    #[error("internal consistency error: {0}")]
    Consistency(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
