//! Electric vs diesel semi-truck techno-economic simulation.
//!
//! The pipeline runs bottom-up: [`drivecycle`] builds speed traces,
//! [`powertrain`] turns them into battery power and energy per mile,
//! [`battery`] sizes the pack and tracks capacity fade over mileage,
//! [`economics`] samples cost scenarios and levelizes cost per mile, and
//! [`payback`] computes break-even times and one-at-a-time sensitivities.
//! [`cli`] wires everything to the `etruck` binary.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod battery;
pub mod cli;
pub mod drivecycle;
pub mod economics;
pub mod error;
pub mod payback;
pub mod powertrain;
pub mod stats;
pub mod units;

pub use error::{Error, Result};
