//! Real and complex eigenvalues of polynomial multiple-well oscillators.
//!
//! Series coefficients of the regularized logarithmic derivative of the
//! wavefunction are generated by recursion; eigenvalues are located as
//! converging root sequences of Hankel determinants built from those
//! coefficients, at user-selected precision up to hundreds of digits.

pub mod apnum;
pub mod error;
pub mod hankel;
pub mod oracle;
pub mod problem;
pub mod reference;
pub mod series;
pub mod solver;

pub use apnum::{APComplex, PrecisionContext};
pub use error::{Error, Result};
pub use problem::{Preset, ProblemSpec};
pub use solver::{SequenceReport, SolveConfig, Verdict};
