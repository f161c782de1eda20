use thiserror::Error;

/// Everything that can go wrong across the crate.
///
/// The variant name doubles as the machine-readable reason printed by the CLI,
/// see [`Error::kind`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("malformed matrix: {0}")]
    MalformedMatrix(String),
    #[error("parameter vector is not unit norm: {0}")]
    NonUnitParameters(String),
    #[error("expected a {expected} matrix, got a {found} matrix")]
    ModeMismatch {
        expected: &'static str,
        found: &'static str,
    },
    #[error("invalid division: {0}")]
    InvalidDivision(String),
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("not a scattered matrix: {0}")]
    NotScattered(String),
    #[error("operator kind mismatch: cannot mix signed and semi operators")]
    KindMismatch,
    #[error("malformed GF(2) system: {0}")]
    MalformedSystem(String),
    #[error("matrix is not semi-orthogonal: {0}")]
    NotSemiOrthogonal(String),
    #[error("column {column} does not negate exactly one row of couple <{lo},{hi}>")]
    InconsistentSigns { column: usize, lo: usize, hi: usize },
    #[error("path starting at row {start} does not close for operators {a} and {b}")]
    BrokenPath { a: usize, b: usize, start: usize },
    #[error("assigned signs do not yield a special orthogonal matrix")]
    SolutionMismatch,
    #[error("operators {0} and {1} are not semi-cooperative")]
    NotCooperative(usize, usize),
    #[error("operator {0} lies in the subgroup generated by the preceding operators")]
    NotGeneratorSet(usize),
    #[error("{variables} variables exceed the exhaustive-search limit of {limit}")]
    TooLarge { variables: usize, limit: usize },
    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Stable name of the variant, used as the `reason=` field in CLI output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::MalformedMatrix(_) => "MalformedMatrix",
            Error::NonUnitParameters(_) => "NonUnitParameters",
            Error::ModeMismatch { .. } => "ModeMismatch",
            Error::InvalidDivision(_) => "InvalidDivision",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::NotScattered(_) => "NotScattered",
            Error::KindMismatch => "KindMismatch",
            Error::MalformedSystem(_) => "MalformedSystem",
            Error::NotSemiOrthogonal(_) => "NotSemiOrthogonal",
            Error::InconsistentSigns { .. } => "InconsistentSigns",
            Error::BrokenPath { .. } => "BrokenPath",
            Error::SolutionMismatch => "SolutionMismatch",
            Error::NotCooperative(..) => "NotCooperative",
            Error::NotGeneratorSet(_) => "NotGeneratorSet",
            Error::TooLarge { .. } => "TooLarge",
            Error::InvalidMatrix(_) => "InvalidMatrix",
            Error::Parse(_) => "Parse",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
