//! Quasi-Banach sequence spaces, Schauder bases, the DKK construction and
//! numerical measurement of greedy-approximation parameters.

// NaN must fail these checks, so `!(x > 0.0)` is intended.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bases;
pub mod dkk;
pub mod error;
pub mod params;
pub mod spaces;
pub mod suites;
pub mod tga;

pub use error::{Error, Result};
