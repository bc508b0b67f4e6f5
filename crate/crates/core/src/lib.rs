//! MAP parameter learning for discrete Bayesian networks from incomplete data.
//!
//! Three learners share one exact-inference engine:
//!
//! * EM, the classical expected-count update under Dirichlet priors;
//! * EDML, which turns each example into soft evidence on every parameter set and
//!   then solves one small strictly concave problem (a "parameter island") per set
//!   with a monotone fixed-point iteration;
//! * a hybrid that computes both updates from the same inference pass and keeps the
//!   one with the higher posterior, so it never does worse than EM per iteration.
//!
//! The [`bench`] module reproduces the learner races used to compare them: synthetic
//! datasets, hidden variables, error-to-best-posterior curves and win-share tables.

pub mod bench;
pub mod data;
mod error;
pub mod infer;
pub mod learn;
pub mod model;

pub use error::{Error, Result};
