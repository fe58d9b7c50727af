//! Lipschitz-continuous randomized algorithms for minimum spanning tree,
//! shortest path and maximum weight matching, with exact oracles and a
//! coupled Monte Carlo harness for measuring approximation ratios,
//! Lipschitz constants and contraction sensitivity.

pub mod bmatch;
pub mod coupling;
pub mod error;
pub mod graph;
pub mod harness;
pub mod lipsp;
pub mod metrics;
pub mod mst;
pub mod mwm;
pub mod par;
pub mod rng;
pub mod sp;

pub use error::{Error, Result};
