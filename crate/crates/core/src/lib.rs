//! Perfect zero-knowledge PCP for #SAT over prime fields.
//!
//! The crate is layered bottom-up:
//!
//! * [`field`], [`linalg`], [`value`]: exact arithmetic, elimination, uniform
//!   solving (concrete or symbolic).
//! * [`point`], [`poly`]: points of `F^{≤m}`, product sets, multivariate
//!   polynomials with individual degree bounds.
//! * [`rm`], [`locator`]: Reed–Muller constraint detection and the
//!   constraint locator for random low-degree extensions.
//! * [`sigma_rm`], [`antisym`]: locators for subcube sums and for sums of
//!   antisymmetric masks.
//! * [`encoding`]: local simulation from a locator, composition, and the
//!   composed encoding used by the proof system.
//! * [`pcp`]: arithmetization, prover, verifier, simulator, proof format.
//! * [`audit`], [`script`], [`dimacs`]: exact law comparison and the file
//!   formats used by the command-line tool.

pub mod antisym;
pub mod audit;
pub mod dimacs;
pub mod encoding;
pub mod field;
pub mod linalg;
pub mod locator;
pub mod pcp;
pub mod point;
pub mod poly;
pub mod rm;
pub mod script;
pub mod sigma_rm;
pub mod value;

pub use field::{Elem, Field};
pub use linalg::Matrix;
pub use point::{Point, ProductSet};
pub use poly::MultiPoly;

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("modulus {0} is not a prime below 2^32")]
    BadModulus(u64),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error("arity mismatch: expected {expected} coordinates, found {found}")]
    Arity { expected: usize, found: usize },
    #[error("point {0} is not in the product set")]
    NotInSet(String),
    #[error("degree bound violated: {0}")]
    Degree(String),
    #[error("invalid product set: {0}")]
    ProductSet(String),
    #[error("product set is not reversal-symmetric")]
    NotSymmetric,
    #[error("inconsistent query-answer set at {0}")]
    Inconsistent(String),
    #[error("invalid parameters: {0}")]
    Params(String),
    #[error("table of {0} entries exceeds the size cap {1}")]
    Cap(u128, u128),
    #[error("malformed input: {0}")]
    Parse(String),
    #[error("statement is false: claimed sum {claimed}, actual {actual}")]
    FalseStatement { claimed: u64, actual: u64 },
}

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/fields.md")]
    mod fields {}
    #[doc = include_str!("../../../book/src/polynomials.md")]
    mod polynomials {}
    #[doc = include_str!("../../../book/src/reed_muller.md")]
    mod reed_muller {}
    #[doc = include_str!("../../../book/src/sum_codes.md")]
    mod sum_codes {}
    #[doc = include_str!("../../../book/src/antisym.md")]
    mod antisym {}
    #[doc = include_str!("../../../book/src/simulation.md")]
    mod simulation {}
    #[doc = include_str!("../../../book/src/pcp.md")]
    mod pcp {}
}
