use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("alphabet size {0} out of range 1..=36")]
    InvalidAlphabet(usize),
    #[error("symbol {symbol} not in alphabet of size {size}")]
    SymbolOutOfRange { symbol: usize, size: usize },
    #[error("window with left offset {left} and length {len} does not contain the origin")]
    OriginOutsideWindow { left: i64, len: usize },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("substitution image for symbol {0} is empty")]
    EmptyImage(usize),
    #[error("substitution is not of constant length")]
    NotConstantLength,
    #[error("substitution is not primitive")]
    NotPrimitive,
    #[error("substitution does not grow (every image has length 1)")]
    NotGrowing,
    #[error("cut {cut} out of range 0..{bound}")]
    CutOutOfRange { cut: u64, bound: u64 },
    #[error("exact pipeline hypotheses unmet: {0}")]
    Hypotheses(String),
    #[error("window too small: need radius {need}, have {have}")]
    WindowTooSmall { need: u64, have: u64 },
    #[error("inadmissible word {0}")]
    Inadmissible(String),
    #[error("invalid budget: {0}")]
    Budget(String),
    #[error("invalid Toeplitz skeleton: {0}")]
    Skeleton(String),
    #[error("local rule is not defined on source word {0}")]
    PartialRule(String),
    #[error("unknown system {0:?}")]
    UnknownSystem(String),
    #[error("{0}")]
    Nonconstructive(String),
    #[error("extension inequality needs a proximal factor map")]
    NotProximal,
    #[error("certificate rejected: {0}")]
    Certificate(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}
