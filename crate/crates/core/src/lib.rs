//! Rigorous numerics for Takagi-class functions `f(x) = Σ c_k φ(b^k x)`.
//!
//! The crate evaluates such functions with certified error radii, builds
//! their partial sums as exact piecewise-linear functions, counts mesh cells
//! against certified enclosures of the graph, and turns those counts into
//! box-counting and Assouad-type dimension estimates.

pub mod coefficients;
pub mod counting;
pub mod dimension;
pub mod error;
pub mod oracle;
pub mod rational;
pub mod report;
pub mod series;

pub use coefficients::{CoefficientSequence, Eta, SequenceKind, SignRule};
pub use error::{Error, Result};
pub use rational::Rational;
pub use series::{CertifiedValue, Limits, PartialSums, PiecewiseLinearFunction};
