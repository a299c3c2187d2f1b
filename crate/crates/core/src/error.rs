use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("marking {index} out of range 1..={n}")]
    MarkingOutOfRange { n: usize, index: usize },
    #[error("unsupported number of markings n={0}")]
    UnsupportedN(usize),
    #[error("parity violation: p + e must be even (e={e}, p={p})")]
    Parity { e: usize, p: i64 },
    #[error("operation requires even n, got n={0}")]
    NeedsEvenN(usize),
    #[error("operation requires odd n, got n={0}")]
    NeedsOddN(usize),
    #[error("subset of size {got} where size {want} is required")]
    BadSubsetSize { got: usize, want: usize },
    #[error("symbol {0} is not valid for n={1}")]
    InvalidSymbol(String, usize),
    #[error("marking count mismatch: {0} vs {1}")]
    NMismatch(usize, usize),
    #[error("bundle does not descend to the quotient: {0}")]
    NoDescent(String),
    #[error("absorption bound violated: coefficient {coeff} outside [-(n-2), n-2] for n={n}")]
    AbsorptionBound { coeff: i64, n: usize },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("no generation route: {0}")]
    Generation(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
