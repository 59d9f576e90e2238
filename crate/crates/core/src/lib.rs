//! Verification of register protocols: identical finite-state processes
//! sharing one finite-domain register under a uniform random scheduler.
//!
//! For a fixed number of processes, [`concrete`] decides whether a target
//! location is reached with probability one. Independently of the number of
//! processes, [`coverability`] and [`symbolic`] decide whether the answer is
//! eventually always positive or always negative, and bound the size from
//! which it stabilizes. [`simulator`] cross-checks the exact analyses.

pub mod concrete;
pub mod coverability;
pub mod dsl;
mod error;
pub mod exec;
pub mod graph;
pub mod limits;
pub mod model;
pub mod report;
pub mod simulator;
pub mod symbolic;
pub mod tight;

pub use error::Error;
pub use exec::Execution;
pub use limits::{Limits, ResourceLimit};
