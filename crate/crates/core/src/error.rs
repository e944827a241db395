use thiserror::Error;

use crate::numberfield::FieldId;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands belong to different fields ({0} and {1})")]
    FieldMismatch(FieldId, FieldId),
    #[error("both operands are zero")]
    BothZero,
    #[error("not divisible in the ring of integers")]
    NotDivisible,
    #[error("certificate failure for {field}: {what}")]
    CertificateFailure { field: FieldId, what: String },
    #[error("no base of simple roots matches the E8 Cartan matrix")]
    BaseNotFound,
    #[error("verification failed for {field}: {what}")]
    VerificationFailed { field: FieldId, what: String },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("empty measurement: {0}")]
    EmptyMeasurement(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Stable machine-readable name, used by the CLI.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::SingularMatrix => "SingularMatrix",
            Error::DivisionByZero => "DivisionByZero",
            Error::FieldMismatch(..) => "FieldMismatch",
            Error::BothZero => "BothZero",
            Error::NotDivisible => "NotDivisible",
            Error::CertificateFailure { .. } => "CertificateFailure",
            Error::BaseNotFound => "BaseNotFound",
            Error::VerificationFailed { .. } => "VerificationFailed",
            Error::Parse(_) => "ParseError",
            Error::EmptyMeasurement(_) => "EmptyMeasurement",
            Error::Io(_) => "IoError",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
