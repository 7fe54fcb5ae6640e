//! Exact symbolic summation engine.
//!
//! Implements Gosper's algorithm for indefinite hypergeometric summation,
//! Abramov's algorithm for rational solutions of linear difference equations,
//! Zeilberger's creative telescoping, and an Abel-summation-by-parts driver
//! that finds recurrences for sums of hypergeometric terms against holonomic
//! auxiliary sequences (harmonic numbers, Fibonacci numbers, derangements,
//! partial binomial sums). A prover layer checks discovered recurrences
//! against closed forms over a transcendental basis.

pub mod abel;
pub mod abel_gosper;
pub mod abramov;
pub mod closed;
pub mod error;
pub mod gosper;
pub mod hyper;
pub mod linalg;
pub mod sequences;
pub mod zeilberger;
pub mod poly;
pub mod ratfun;
pub mod roots;

pub use error::{Error, Result};
pub use poly::{Int, Poly, Rat, Var};
pub use ratfun::RatFun;
