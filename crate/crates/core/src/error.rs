use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("field mismatch: {0}")]
    FieldMismatch(String),
    #[error("shape error: {0}")]
    ShapeError(String),
    #[error("pencil is not regular")]
    IrregularPencil,
    #[error("unknown vertex: {0}")]
    VertexError(String),
    #[error("total dimension is zero")]
    ZeroDim,
    #[error("path error: {0}")]
    PathError(String),
    #[error("no structural criterion for this quiver over a non-prime field")]
    NeedsFiniteField,
    #[error("enumeration budget exceeded: {0}")]
    TooLarge(String),
    #[error("group element is singular")]
    SingularGroupElement,
    #[error("datum is not in the variety: {0}")]
    NotInVariety(String),
    #[error("invalid invariants: {0}")]
    InvalidInvariants(String),
    #[error("matrix M is singular")]
    NotInChart,
    #[error("malformed group element: {0}")]
    GroupShapeError(String),
    #[error("invariants violate 0 <= a <= r-1: {0}")]
    NormalizationError(String),
    #[error("point is not in P_k: {0}")]
    NotInPk(String),
    #[error("flag is empty (a = 0)")]
    EmptyFlag,
    #[error("not a representation: {0}")]
    NotARepresentation(String),
    #[error("representation is unstable: {0}")]
    Unstable(String),
    #[error("framing dimension vector is zero")]
    WZero,
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
