use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// The operator is undefined at q = 1: D_q f(x) = (f(x) - f(qx)) / ((1 - q) x).
    #[error("q = 1 is not allowed: D_q f(x) = (f(x) - f(qx))/((1-q)x) requires q != 1")]
    QIsOne,

    #[error("argument {argument} lies outside the domain |x| < {radius}")]
    OutsideDomain { argument: f64, radius: f64 },

    #[error("derivative oracle required: {0}")]
    NoJetOracle(&'static str),

    #[error("jets have mismatched center or order")]
    JetMismatch,

    #[error("division by a jet with zero constant term")]
    JetDivisionByZero,

    #[error("requested order {requested} exceeds available order {available}")]
    OrderExceeded { requested: usize, available: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("syntax error at position {position}: expected {expected}, found {found}")]
    Syntax {
        position: usize,
        expected: String,
        found: String,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
