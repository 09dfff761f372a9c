use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RingError {
    #[error("unknown color letter '{0}'")]
    UnknownColor(char),
    #[error("ring size {n} is smaller than the {listed} listed nodes")]
    TooManyEntries { n: usize, listed: usize },
    #[error("ring size {0} is below the minimum of 3")]
    RingTooSmall(usize),
    #[error("configuration has no robots")]
    NoRobots,
    #[error("malformed entry '{0}'")]
    BadEntry(String),
    #[error("invalid palette: {0}")]
    BadPalette(String),
    #[error("color permutation is not a permutation of the palette")]
    BadPermutation,
    #[error("no robot of color {color} at node {node}")]
    NoSuchRobot { node: usize, color: char },
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
}

pub type RingResult<T> = Result<T, RingError>;
