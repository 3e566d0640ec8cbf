// NaN-rejecting guards are written as `!(x > 0.0)` on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod config;
pub mod error;
pub mod grid;
pub mod kernel;
pub mod operator;
pub mod params;
pub mod pipeline;
pub mod quadrature;
pub mod solver;
pub mod special;
pub mod verify;

pub use error::{Error, Result};
pub use params::ProblemParams;
