//! Exact offline optima and exhaustive ground-truth checks.

mod feasibility;
mod lp;
mod oswm;
pub mod simplex;

pub use feasibility::{brute_force_feasibility, FeasibilityCheck, FEASIBILITY_MAX_N};
pub use lp::{
    lp_opt_fractional, lp_opt_fractional_with, ActiveConstraint, Constraint, LpBackend, LpSolution,
    LP_AUTO_EXHAUSTIVE_MAX_N, LP_EXHAUSTIVE_MAX_N, SEPARATION_SLACK,
};
pub use oswm::{oswm_opt, OSWM_NODE_BUDGET};
