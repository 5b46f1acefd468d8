#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > a)` also rejects NaN

pub mod chain;
pub mod error;
pub mod experiment;
pub mod format;
pub mod metrics;
pub mod moments;
pub mod number_theory;
pub mod summation;
pub mod zeta;

pub use error::{Error, Result};
