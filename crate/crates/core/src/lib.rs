//! Zero-sum spanning forests in ±1 edge-labeled complete graphs.

pub mod cli;
pub mod conjlab;
pub mod embed;
pub mod error;
pub mod factorsolve;
pub mod graphcore;
pub mod quadmin;
pub mod rng;
pub mod starsolve;
pub mod swapwalk;

pub use error::{Error, Result};
