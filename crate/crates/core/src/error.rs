use thiserror::Error;

/// Library-wide error type.
///
/// Variants are grouped by how callers are expected to react: `Parse`,
/// `Domain`, and the structural errors are usage mistakes; `RationalAlpha`,
/// `PrecisionExhausted`, and `Overflow` mean the exact-arithmetic layer
/// refused to guess rather than return a possibly-wrong integer.
#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot parse {what}: {detail}")]
    Parse { what: &'static str, detail: String },

    #[error("alpha is rational ({detail}); an irrational value is required here")]
    RationalAlpha { detail: String },

    #[error("requested range of {len} values exceeds the block budget of {budget}")]
    RangeTooLarge { len: u64, budget: u64 },

    #[error("decimal precision exhausted: alpha*{n} is within the certified radius of an integer")]
    PrecisionExhausted { n: u64 },

    #[error("integer overflow while computing {what}")]
    Overflow { what: &'static str },

    #[error("{0}")]
    Domain(String),

    #[error("polynomials {0} and {1} share a common factor")]
    NonCoprimePolynomials(String, String),

    #[error("shift list contains duplicates")]
    DuplicateShifts,

    #[error("theta assignment has no value for prime {prime}")]
    ThetaUndefined { prime: u64 },

    #[error("distribution has {have} dimension(s) but the query has {want}")]
    DimensionMismatch { have: usize, want: usize },

    #[error("adaptive quadrature did not reach tolerance {tol} within depth {depth}")]
    QuadratureDepth { tol: f64, depth: u32 },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
