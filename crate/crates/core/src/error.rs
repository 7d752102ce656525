use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("alphabet must have at least 2 symbols, got {0}")]
    AlphabetTooSmall(usize),

    #[error("alphabet sizes differ: {0} vs {1}")]
    AlphabetMismatch(usize, usize),

    #[error("probabilities sum to {0}, expected 1 within 1e-12")]
    NotNormalized(f64),

    #[error("entry {index} is {value}, expected a finite non-negative probability")]
    InvalidProbability { index: usize, value: f64 },

    #[error("entry {0} is zero but a full-support distribution is required")]
    NotFullSupport(usize),

    #[error("{name} = {value} is outside [{lower}, {upper}]")]
    OutOfRange {
        name: &'static str,
        value: f64,
        lower: f64,
        upper: f64,
    },

    /// The requested radius lies outside the regime where the exponent is
    /// positive (the excluded zero-exponent edge).
    #[error("{name} = {value} is outside the non-degenerate regime (0, {bound}]")]
    OutOfRegime {
        name: &'static str,
        value: f64,
        bound: f64,
    },

    #[error("type enumeration needs {required} types, budget is {budget}")]
    BudgetExceeded { required: u128, budget: u128 },

    #[error("decision balls overlap: D-radii {l10} around P0 and {l01} around P1 intersect")]
    OverlappingBalls { l10: f64, l01: f64 },

    #[error("type class must contain at least one sample")]
    EmptyType,

    #[error("symbol {symbol} is outside an alphabet of size {alphabet}")]
    SymbolOutOfRange { symbol: usize, alphabet: usize },

    #[error("{0}")]
    NotApplicable(&'static str),

    #[error("need at least {need} points, got {got}")]
    TooFewPoints { need: usize, got: usize },
}

pub type Result<T> = core::result::Result<T, Error>;
