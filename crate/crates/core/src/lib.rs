//! Linear-programming measures of how far the causal assumptions behind
//! Bell-type experiments must be relaxed for a classical hidden-variable
//! model to reproduce observed correlations.
//!
//! The crate is organised bottom-up:
//!
//! * [`scenario`] defines scenarios, causal-model variants, deterministic
//!   strategies and response matrices.
//! * [`lp`] holds the standard-form LP, the exact and float simplex and the
//!   builders for the four program shapes.
//! * [`polytope`] enumerates vertices of dual feasible regions and evaluates
//!   the resulting closed-form maxima.
//! * [`functionals`] and [`measures`] assemble the concrete relaxation
//!   measures.
//! * [`bilocality`] scans the parameterised bilocal programs.
//! * [`quantum`] generates reference quantum distributions.

pub mod error;
pub mod matrix;
pub mod num;
pub mod scenario;
pub mod lp;
pub mod polytope;
pub mod format;
pub mod functionals;
pub mod quantum;
pub mod measures;
pub mod sampling;
pub mod bilocality;

pub use error::{Error, Result};
pub use num::{Mode, Rational, Scalar};
