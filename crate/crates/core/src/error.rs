use thiserror::Error;

use crate::poly::Var;

#[derive(Error, Debug, Clone)]
pub enum Error {
    #[error("division by zero polynomial")]
    DivisionByZero,
    #[error("zero polynomial input to {0}")]
    ZeroInput(&'static str),
    #[error("expected a univariate polynomial in {0:?}, found symbolic coefficients")]
    SymbolicCoefficients(Var),
    #[error("pole on evaluation path: denominator `{den}` vanishes at ({var:?}={at})")]
    PoleOnPath { den: String, var: Var, at: String },
    #[error("unknown builtin sequence `{0}`")]
    UnknownBuiltin(String),
    #[error("trailing recurrence coefficient r_1 vanishes identically; sequence order is degenerate")]
    DegenerateRecurrence,
    #[error("no telescoper up to order {0}")]
    NoTelescoper(usize),
    #[error("order cap {0} exceeded")]
    OrderCapExceeded(usize),
    #[error("Gosper's algorithm found no hypergeometric antidifference")]
    GosperFails,
    #[error("certificate pole inside summation range: {0}")]
    PoleInRange(String),
    #[error("nested-sum recursion depth limit exceeded")]
    DepthExceeded,
    #[error("mixed inhomogeneity is only handled by the recursive driver")]
    MixedNotSupported,
    #[error("unsupported basis symbol: {0}")]
    UnsupportedBasisSymbol(String),
    #[error("internal invariant failure: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
