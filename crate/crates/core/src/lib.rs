#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod birman_schwinger;
pub mod contact_gap;
pub mod error;
pub mod finite_range;
pub mod numerics;
pub mod potentials;
pub mod study;

pub use error::{Error, Result};
