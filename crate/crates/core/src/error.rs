use thiserror::Error;

use crate::field::FieldSpec;

/// Errors raised anywhere in the toolkit.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("field mismatch: {0} vs {1}")]
    FieldMismatch(FieldSpec, FieldSpec),
    #[error("division by zero")]
    DivisionByZero,
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("prime modulus {0} exceeds 2^31")]
    ModulusTooLarge(u64),
    #[error("cannot parse {what} from {input:?}")]
    Parse { what: &'static str, input: String },
    #[error("polynomial has degree zero")]
    DegreeZero,
    #[error("enumeration bound exceeded: {0}")]
    BoundExceeded(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("linear system has no solution")]
    NoSolution,
    #[error("vector must be nonzero")]
    ZeroVector,
    #[error("budget exceeded: {needed} > {budget}")]
    BudgetExceeded { needed: u128, budget: u64 },
    #[error("subspace is not a maximal singular subspace: {0}")]
    NotMaximalSingular(String),
    #[error("input matrix must be invertible")]
    SingularInput,
    #[error("basis of left multiplications is linearly dependent")]
    DependentBasis,
    #[error("polynomial is not irreducible")]
    NotIrreducible,
    #[error("irreducibility of the polynomial could not be decided")]
    IrreducibilityUnknown,
    #[error("-1 is a square in {0}")]
    MinusOneIsSquare(FieldSpec),
    #[error("unsupported field: {0}")]
    UnsupportedField(String),
    #[error("unknown preset {0:?}")]
    UnknownPreset(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// A result contradicting the classification theorems; never swallowed.
    #[error("anomaly: {0}")]
    Anomaly(String),
    #[error("undecided: {0}")]
    Undecided(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("invalid document: {0}")]
    Document(String),
}

impl Error {
    /// Short machine-readable tag used by `--json-errors`.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::FieldMismatch(..) => "FieldMismatch",
            Error::DivisionByZero => "DivisionByZero",
            Error::NotPrime(_) => "NotPrime",
            Error::ModulusTooLarge(_) => "ModulusTooLarge",
            Error::Parse { .. } => "Parse",
            Error::DegreeZero => "DegreeZero",
            Error::BoundExceeded(_) => "BoundExceeded",
            Error::DimensionMismatch(_) => "DimensionMismatch",
            Error::NotSquare { .. } => "NotSquare",
            Error::SingularMatrix => "SingularMatrix",
            Error::NoSolution => "NoSolution",
            Error::ZeroVector => "ZeroVector",
            Error::BudgetExceeded { .. } => "BudgetExceeded",
            Error::NotMaximalSingular(_) => "NotMaximalSingular",
            Error::SingularInput => "SingularInput",
            Error::DependentBasis => "DependentBasis",
            Error::NotIrreducible => "NotIrreducible",
            Error::IrreducibilityUnknown => "IrreducibilityUnknown",
            Error::MinusOneIsSquare(_) => "MinusOneIsSquare",
            Error::UnsupportedField(_) => "UnsupportedField",
            Error::UnknownPreset(_) => "UnknownPreset",
            Error::Precondition(_) => "Precondition",
            Error::Anomaly(_) => "Anomaly",
            Error::Undecided(_) => "Undecided",
            Error::Io(_) => "Io",
            Error::Document(_) => "Document",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn dim_mismatch(msg: impl Into<String>) -> Error {
    Error::DimensionMismatch(msg.into())
}
