//! Unit values and costs: fill the element of lowest water level.

use super::fractional::{run, Dispatch};
use super::{SapInstance, SolveOptions, SolveOutput};
use crate::error::{Error, Result};

pub fn solve_matroid_intersection(inst: &SapInstance, step: f64) -> Result<SolveOutput> {
    solve_matroid_intersection_with(inst, SolveOptions::with_step(step))
}

/// With `b = v = 1` the price of `e` is `g(w_e)`, so the element of least
/// water level is the one of greatest utility and free disposal never
/// applies; the duals reduce to `γ = G(w)` and `dβ_j = (1 − g(w_e)) dx_e`.
pub fn solve_matroid_intersection_with(inst: &SapInstance, opts: SolveOptions) -> Result<SolveOutput> {
    if !inst.is_unit() {
        return Err(Error::input("matroid-intersection mode needs unit values and costs"));
    }
    run(inst, opts, Dispatch::MinLevel)
}
