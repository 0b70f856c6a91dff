//! Static equilibrium of elastic strings (mooring lines) by single shooting.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod catenary;
pub mod cli;
pub mod error;
pub mod integrate;
pub mod model;
pub mod shoot;
pub mod verify;

pub use error::{Error, Result};
