use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PolyError {
    #[error("parameter {name} = {value} must be finite and > -1")]
    Domain { name: &'static str, value: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: expected {}, found {found}", expected.join(" | "))]
    Syntax {
        offset: usize,
        expected: Vec<&'static str>,
        found: String,
    },
    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("negative base {base} raised to fractional power {exponent}")]
    NegativeBaseFractionalPower { base: f64, exponent: f64 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("non-finite result {value}")]
    NonFinite { value: f64 },
}

/// Errors raised by the design pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("weight evaluation failed at x = {x}: {source}")]
    Evaluation { x: f64, source: EvalError },
    #[error("degenerate inner product: {0}")]
    Degenerate(String),
    #[error("structure error: {0}")]
    Structure(String),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("singular matrix: {0}")]
    Singular(String),
    #[error("Fisher information matrix is singular (λ_min = {e_value:e})")]
    SingularFisher { e_value: f64 },
    #[error(transparent)]
    Poly(#[from] PolyError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
