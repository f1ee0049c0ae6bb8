use thiserror::Error;

/// Errors raised by the algebra and verification layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid modulus {0}: {1}")]
    InvalidModulus(u64, &'static str),
    #[error("division by zero")]
    DivisionByZero,
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("variable lists differ")]
    VariableMismatch,
    #[error("too many variables ({0}); at most {1} supported")]
    TooManyVariables(usize, usize),
    #[error("degree {0} exceeds the supported maximum {1}")]
    DegreeOverflow(u32, u32),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("operation requires a prime field")]
    NotPrimeField,
    #[error("characteristic 2 is not supported")]
    CharacteristicTwo,
    #[error("polynomial is not homogeneous of degree {0}")]
    NotHomogeneous(u32),
    #[error("constant term is not a unit")]
    NonUnitConstant,
    #[error("point does not lie on the hypersurface")]
    PointNotOnHypersurface,
    #[error("degenerate frame: {0}")]
    DegenerateFrame(String),
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("sampling failed: {0}")]
    Sampling(String),
}

pub type Result<T> = std::result::Result<T, Error>;
