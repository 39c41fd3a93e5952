use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("forms live on different frames ({left} vs {right})")]
    FrameMismatch { left: String, right: String },

    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),

    #[error("duplicate generator label `{0}`")]
    DuplicateLabel(String),

    #[error("frame has {0} generators, at most 64 are supported")]
    TooManyGenerators(usize),

    #[error("frame change is not invertible over polynomials")]
    NotPolynomiallyInvertible,

    #[error("frame expansion for `{0}` is not a 1-form")]
    ExpansionNotOneForm(String),

    #[error("exponential needs a form with only even components of positive degree")]
    NotNilpotent,

    #[error("frame is not closed under complex conjugation")]
    NotConjugationClosed,

    #[error("frames `{0}` and `{1}` share no common coordinate frame")]
    NoCommonFrame(String, String),

    #[error("generator `{label}` has no counterpart in the target frame")]
    MissingGenerator { label: String },

    #[error("wrong frame: {0}")]
    WrongFrame(String),

    #[error("coefficient depends on fiber coordinate `{0}`")]
    FiberDependent(String),

    #[error("degenerate structure: {0}")]
    Degenerate(String),

    #[error("a polarization is required for this check")]
    MissingPolarization,

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("limit exceeded: {0}")]
    LimitExceeded(String),

    #[error("not supported: {0}")]
    NotSupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
