//! Exact and numerical tools for matrix models built on combinatorial maps:
//! partitions and characters, Schur functions, Hurwitz numbers, closed-form
//! Gaussian and unitary expectations, tau functions and a Monte Carlo checker.

pub mod characters;
pub mod dessin;
pub mod error;
pub mod expectation;
pub mod hurwitz;
pub mod mc;
pub mod partitions;
pub mod ratfunc;
pub mod scalar;
pub mod symfunc;
pub mod tau;

pub use characters::{character, phi, CharacterTable};
pub use dessin::{CyclicWord, DessinModel, SignedLetter, SourceAssignment};
pub use error::{Error, Result};
pub use expectation::{ClosedFormResult, EdgeKind, EnsembleSpec, Formula, Side};
pub use mc::{Check, McConfig, McEstimate, Observable};
pub use partitions::Partition;
pub use ratfunc::RatFunc;
pub use scalar::{Field, Rational};
pub use symfunc::{PowerSumPoint, SymPolynomial};
