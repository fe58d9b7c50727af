//! Output-space metrics and distances between output distributions.

pub mod distance;
pub mod edgeset;
pub mod transport;

pub use distance::{d_u, d_w, tv_empirical};
pub use edgeset::{EdgeMultiset, EdgeSetDistribution};
pub use transport::{emd_empirical, emd_plan, solve_transport, TransportPlan};
