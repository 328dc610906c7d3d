use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SymError {
    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("unknown identifier `{name}` at position {position}")]
    UnknownIdentifier { name: String, position: usize },
    #[error("symbol `{0}` registered twice")]
    DuplicateSymbol(String),
    #[error("`{0}` is not a valid identifier")]
    InvalidName(String),
    #[error("velocity `{0}` must pair with exactly one unpaired coordinate")]
    VelocityPairing(String),
    #[error("phase-space pairs must be disjoint and complete")]
    OverlappingPhaseSpace,
    #[error("invalid alias `{name}`: {reason}")]
    InvalidAlias { name: String, reason: String },
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("substitution for `{0}` refers to a symbol that is itself being substituted")]
    RecursiveBinding(String),
    #[error("expressions belong to different symbol tables")]
    TableMismatch,
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("matrix dimensions do not match")]
    DimensionMismatch,
}
