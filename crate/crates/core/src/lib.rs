#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod error;
pub mod harness;
pub mod mission;
pub mod mpc;
pub mod netsim;
pub mod plant;

pub use error::{Error, Result};
