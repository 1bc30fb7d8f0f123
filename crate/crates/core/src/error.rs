use thiserror::Error;

/// Errors raised by the cohomology workbench.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// `d_out · d_in` is not the zero matrix.
    #[error("composition of consecutive differentials is nonzero")]
    CompositionNonzero,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("modulus {0} is too small (need q >= 2)")]
    ModulusTooSmall(u64),
    #[error("matrix is not in Gamma(2)")]
    NotInGamma2,
    #[error("level m = {m} is too small (need m >= {min})")]
    MTooSmall { m: u64, min: u64 },
    #[error("unknown symbol {0}")]
    UnknownSymbol(String),
    #[error("coefficient degree n = {0} is not allowed here (need n >= 1)")]
    BadDegree(usize),
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error("relator {index} does not evaluate to the identity")]
    RelatorNotTrivial { index: usize },
    #[error("duplicate generator {0}")]
    DuplicateGenerator(String),
    #[error("central value does not commute with generator {0}")]
    NotCentral(usize),
    /// Two independent computations of the same group disagree.
    #[error("mismatch in {what}: {left} vs {right}")]
    Mismatch {
        what: String,
        left: String,
        right: String,
    },
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
