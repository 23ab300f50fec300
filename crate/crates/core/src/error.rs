use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("minimal polynomial is not monic")]
    NonMonic,
    #[error("minimal polynomial is not irreducible: {0}")]
    Reducible(String),
    #[error("basis does not span a ring: {0}")]
    NonRingBasis(String),
    #[error("basis matrix is singular")]
    SingularBasis,
    #[error("root isolation failed at the requested precision: {0}")]
    PrecisionFailure(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("generators do not span a full-rank lattice")]
    RankDeficient,
    #[error("prime {0} divides the index [O_K : Z[theta]]")]
    IndexDivisor(u64),
    #[error("element is not integral")]
    NonIntegral,
    #[error("form coefficients are not integral at the requested prime or modulus")]
    NonIntegralForm,
    #[error("invalid form system: {0}")]
    InvalidForm(String),
    #[error("budget exceeded: {needed} units requested, budget {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },
    #[error("arc search budget exceeded: {needed} candidates, budget {budget}")]
    SearchBudgetExceeded { needed: u128, budget: u128 },
    #[error("operation requires a class-number-one field (set class_number_one = true)")]
    UnsupportedField,
    #[error("degenerate data: {0}")]
    DegenerateData(String),
    #[error("resource limit exceeded: result would have about {digits} decimal digits")]
    ResourceExceeded { digits: f64 },
    #[error("integer overflow in {0}")]
    Overflow(&'static str),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("configuration error: {0}")]
    Config(String),
}

impl Error {
    pub fn is_budget(&self) -> bool {
        matches!(
            self,
            Error::BudgetExceeded { .. } | Error::SearchBudgetExceeded { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
