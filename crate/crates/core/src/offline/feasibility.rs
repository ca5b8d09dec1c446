use serde::Serialize;

use crate::error::{Error, Result};
use crate::set::ElementSet;
use crate::submodular::SetFunction;
use crate::tol::tight_slack;

pub const FEASIBILITY_MAX_N: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeasibilityCheck {
    pub feasible: bool,
    /// Most violated set, when infeasible.
    pub witness: Option<Vec<usize>>,
    /// `max_S load(S) − f(S)`.
    pub max_excess: f64,
}

/// Checks `load(S) ≤ f(S)` for every `S`.
pub fn brute_force_feasibility(f: &dyn SetFunction, load: &[f64]) -> Result<FeasibilityCheck> {
    let n = f.ground_size();
    if load.len() != n {
        return Err(Error::input("load does not match the ground set"));
    }
    if n > FEASIBILITY_MAX_N {
        return Err(Error::capability(format!("exhaustive feasibility needs at most {FEASIBILITY_MAX_N} elements")));
    }
    let mut sums = vec![0.0; 1 << n];
    let mut best = (0.0f64, 0u64);
    let mut feasible = true;
    for mask in 1..(1u64 << n) {
        let low = mask.trailing_zeros() as usize;
        sums[mask as usize] = sums[(mask & (mask - 1)) as usize] + load[low];
        let fv = f.eval(&ElementSet::from_mask(n, mask));
        let excess = sums[mask as usize] - fv;
        if excess > tight_slack(fv) {
            feasible = false;
        }
        if excess > best.0 {
            best = (excess, mask);
        }
    }
    let witness = (!feasible).then(|| ElementSet::from_mask(n, best.1).to_vec());
    Ok(FeasibilityCheck { feasible, witness, max_excess: best.0 })
}
