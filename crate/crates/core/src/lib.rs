//! Numerical models for collective water-dipole dynamics, barrier tunnelling
//! rates, vibrationally assisted tunnelling in two dimensions and stochastic
//! vesicle release.

// `!(x > 0.0)` style guards reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod constants;
pub mod dicke;
pub mod error;
pub mod exocytosis;
pub mod fit;
pub mod mixed;
pub mod tunneling;
pub mod units;

pub use error::{Error, Result};
