use thiserror::Error;

/// Errors raised by the algebraic engines and the file/CLI layer.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("division by zero in subexpression `{0}`")]
    DivisionByZero(String),
    #[error("exact expansion exceeded the term budget ({terms} > {budget})")]
    ExpansionTooLarge { terms: usize, budget: usize },
    #[error("point has {got} coordinates, expected {expected}")]
    PointDimension { expected: usize, got: usize },
    #[error("unknown name `{0}`")]
    UnknownName(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("decomposition is degenerate everywhere (det a(λ) ≡ 0)")]
    DegenerateEverywhere,
    #[error("complement of dimension {0} is too large for the symbolic inverse")]
    ComplementTooLarge(usize),
    #[error("non-degeneracy is only defined here for r-matrices produced by the constructor")]
    NondegeneracyUndefined,
    #[error("word leaves the base subalgebra (generator index {0})")]
    NotInBaseSubalgebra(usize),
    #[error("bidifferential interpolation failed verification at order {order}")]
    InterpolationInconsistent { order: usize },
    #[error("tensor is not unital: order-0 part differs from the identity")]
    NotUnital,
    #[error("slot {slot} out of range for arity {arity}")]
    SlotOutOfRange { slot: usize, arity: usize },
    #[error("slot {0} is not free")]
    SlotNotFree(usize),
    #[error("arity mismatch: {0} vs {1}")]
    ArityMismatch(usize, usize),
    #[error("word degree {degree} exceeds the budget {budget}")]
    DegreeBudgetExceeded { degree: usize, budget: usize },
    #[error("no combination of the ansatz solves order {order}")]
    Infeasible { order: usize },
    #[error("syntax error at column {column}: {message}")]
    Syntax { column: usize, message: String },
    #[error("{0}")]
    Format(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
