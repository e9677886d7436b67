//! Rumor percolation: fireworks and reverse fireworks processes on the half-line, cone and
//! disk percolation on trees, coverage processes and random-station environments.
//!
//! Each model has an analytic side (survival series, fixed points, symbolic criteria) and a
//! Monte Carlo side built on keyed, order-independent random streams.

pub mod coverage;
pub mod dist;
pub mod env;
pub mod line;
pub mod report;
pub mod rootfind;
pub mod sim;
pub mod tree;
mod error;

pub use error::{Error, Result};
