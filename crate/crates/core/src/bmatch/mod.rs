//! Maximum weight bipartite matching via an entropy-regularised LP and
//! two-stage randomized rounding.

pub mod lp;
pub mod plip;
pub mod poisson;
pub mod rounding;

pub use lp::{dual_value, solve_lp_ent, EntMatchingLP};
pub use plip::{lp_stability_check, plip_mwbm, plip_mwbm_coupled, CoupledMwbm, PlipMwbmOutcome};
pub use poisson::{poisson_binomial_pmf, y_functional};
pub use rounding::{round_matching, RoundingTranscript};
