// Negated float comparisons are deliberate: they reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod contraction;
pub mod error;
pub mod nms;
pub mod norms;
pub mod quasimetric;
pub mod solver;
pub mod space;

pub use error::{Error, Result};
