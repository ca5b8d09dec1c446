//! Smallest tight set through an element.

use super::validate_load;
use crate::error::{Error, Result};
use crate::set::ElementSet;
use crate::submodular::sfm::{sfm_min_containing, Backend, ShiftedProblem};
use crate::submodular::{component_index, SetFunction};
use crate::tol::tight_slack;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TightSet {
    /// The intersection of all tight sets containing the element, sorted.
    Tight(Vec<usize>),
    /// No set containing the element is tight.
    Unconstrained,
}

/// Minimal minimizer of `f(S) − load(S)` over `S ∋ e` inside the component of
/// `e`; tight sets through `e` are exactly the minimizers when the minimum is
/// (numerically) zero.
pub fn minimal_tight_set(f: &dyn SetFunction, load: &[f64], e: usize) -> Result<TightSet> {
    validate_load(f, load)?;
    if e >= f.ground_size() {
        return Err(Error::input(format!("element {e} out of range")));
    }
    let (comps, index) = component_index(f);
    minimal_tight_set_in(f, load, e, &comps[index[e]])
}

pub(crate) fn minimal_tight_set_in(f: &dyn SetFunction, load: &[f64], e: usize, comp: &[usize]) -> Result<TightSet> {
    let empty = ElementSet::empty(f.ground_size());
    let problem = ShiftedProblem::new(f, 1.0, load, &empty, comp);
    let sol = sfm_min_containing(&problem, e, Backend::Auto)?;
    let scale = f.eval(&ElementSet::from_elements(f.ground_size(), comp.iter().copied()));
    if sol.value > tight_slack(scale) {
        Ok(TightSet::Unconstrained)
    } else {
        Ok(TightSet::Tight(sol.minimal))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::submodular::Uniform;

    #[test]
    fn rank_one_examples() {
        let f = Uniform::new(2, 1.0).unwrap();
        assert_eq!(minimal_tight_set(&f, &[1.0, 0.0], 0).unwrap(), TightSet::Tight(vec![0]));
        assert_eq!(minimal_tight_set(&f, &[0.5, 0.5], 0).unwrap(), TightSet::Tight(vec![0, 1]));
        assert_eq!(minimal_tight_set(&f, &[0.5, 0.2], 0).unwrap(), TightSet::Unconstrained);
    }
}
