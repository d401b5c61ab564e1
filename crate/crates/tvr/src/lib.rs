//! Solver toolkit for two-counter vector addition systems with states
//! whose first counter can be tested for zero (and for the one-counter
//! and weighted one-counter automata underneath them).
//!
//! The crate decides reachability, boundedness and termination with
//! three-valued, certificate-carrying verdicts; produces and checks
//! linear-path-scheme certificates; translates schemes into integer
//! inequality systems and searches those for small nonnegative
//! solutions; and implements the run-factorization and short-run
//! machinery for weighted one-counter automata.
//!
//! Core types are generic over an integer [`scalar::Scalar`]. The
//! aliases below pin arbitrary precision, which the bound formulas
//! require; narrow scalars such as `i64` work for small fixed instances.

pub mod certfile;
pub mod decide;
pub mod gen;
pub mod lps;
pub mod model;
pub mod modelfile;
pub mod scalar;
pub mod smallsol;
pub mod woca;

#[cfg(test)]
pub(crate) mod testutil;

pub use scalar::Scalar;

/// Default exact integer scalar.
pub type Int = num_bigint::BigInt;

pub type Tvass = model::Tvass<Int>;
pub type Configuration = model::Configuration<Int>;
pub type Run = model::Run<Int>;
pub type Woca = woca::Woca<Int>;
pub type IneqSystem = lps::IneqSystem<Int>;
pub type HomSystem = smallsol::HomSystem<Int>;
pub type InhomSystem = smallsol::InhomSystem<Int>;
