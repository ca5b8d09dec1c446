//! Water levels by uniformly scaling the load and freezing tight sets.

use super::{assemble, validate_load, Block, Decomposition};
use crate::error::{Error, Result};
use crate::set::ElementSet;
use crate::submodular::sfm::{sfm_min, Backend, ShiftedProblem};
use crate::submodular::SetFunction;
use crate::tol::tight_slack;

const NEWTON_MAX_ITERS: usize = 200;

pub fn water_levels_alg2(f: &dyn SetFunction, x: &[f64]) -> Result<Decomposition> {
    water_levels_alg2_with(f, x, Backend::Auto)
}

/// Raises a common scale `s` on the unfrozen elements. The next freezing
/// scale is the largest `s` with `min_S f(S) − y_s(S) = 0`, located by a
/// discrete Newton iteration from above; the frozen elements get level `1/s`.
/// Elements that never freeze carry no load and receive level 0.
pub fn water_levels_alg2_with(f: &dyn SetFunction, x: &[f64], backend: Backend) -> Result<Decomposition> {
    validate_load(f, x)?;
    let n = f.ground_size();
    let all: Vec<usize> = (0..n).collect();
    let empty = ElementSet::empty(n);
    let f_all = f.eval(&ElementSet::full(n));
    let mut frozen = ElementSet::empty(n);
    let mut pinned = vec![0.0; n];
    let mut blocks = Vec::new();
    let mut f_frozen = 0.0;
    loop {
        let unfrozen: Vec<usize> = (0..n).filter(|&e| !frozen.contains(e)).collect();
        let active_mass: f64 = unfrozen.iter().map(|&e| x[e]).sum();
        if unfrozen.is_empty() {
            break;
        }
        if active_mass <= 0.0 {
            blocks.push(Block { density: 0.0, elements: unfrozen, mass: 0.0, rank_gain: f_all - f_frozen });
            break;
        }
        let frozen_load: f64 = frozen.sum(&pinned);
        let mut s = (f_all - frozen_load) / active_mass;
        let mut tight = None;
        for _ in 0..NEWTON_MAX_ITERS {
            let y: Vec<f64> = (0..n).map(|e| if frozen.contains(e) { pinned[e] } else { s * x[e] }).collect();
            let sol = sfm_min(&ShiftedProblem::new(f, 1.0, &y, &empty, &all), backend)?;
            if sol.value >= -tight_slack(f_all) {
                tight = Some(sol.maximal);
                break;
            }
            let set = ElementSet::from_elements(n, sol.maximal.iter().copied());
            let unfrozen_mass: f64 = sol.maximal.iter().filter(|&&e| !frozen.contains(e)).map(|&e| x[e]).sum();
            let next = (f.eval(&set) - set.intersection(&frozen).sum(&pinned)) / unfrozen_mass;
            if !(next.is_finite() && next < s) {
                tight = Some(sol.maximal);
                break;
            }
            s = next;
        }
        let tight = tight.ok_or_else(|| Error::invariant("freezing scale iteration did not converge"))?;
        let fresh: Vec<usize> = tight.into_iter().filter(|&e| !frozen.contains(e)).collect();
        if fresh.is_empty() {
            return Err(Error::invariant("no element froze at the critical scale"));
        }
        for &e in &fresh {
            frozen.insert(e);
            pinned[e] = s * x[e];
        }
        let f_next = f.eval(&frozen);
        let mass: f64 = fresh.iter().map(|&e| x[e]).sum();
        blocks.push(Block { density: 1.0 / s, elements: fresh, mass, rank_gain: f_next - f_frozen });
        f_frozen = f_next;
    }
    Ok(assemble(n, x, blocks))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::submodular::{Partition, Uniform};

    fn close(a: &[f64], b: &[f64]) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-12)
    }

    #[test]
    fn matches_contraction_examples() {
        let f = Uniform::new(2, 2.0).unwrap();
        assert!(close(&water_levels_alg2(&f, &[0.3, 0.7]).unwrap().w, &[0.3, 0.7]));
        let f = Uniform::new(2, 1.0).unwrap();
        assert!(close(&water_levels_alg2(&f, &[0.3, 0.7]).unwrap().w, &[1.0, 1.0]));
        let f = Partition::new(3, vec![vec![0, 1], vec![2]], vec![1.0, 1.0]).unwrap();
        let d = water_levels_alg2(&f, &[0.2, 0.3, 0.9]).unwrap();
        assert!(close(&d.w, &[0.5, 0.5, 0.9]));
        assert_eq!(d.chain, vec![vec![2], vec![0, 1, 2]]);
    }

    #[test]
    fn zero_load_cases() {
        let f = Uniform::new(3, 2.0).unwrap();
        assert!(close(&water_levels_alg2(&f, &[1.0, 1.0, 0.0]).unwrap().w, &[1.0, 1.0, 1.0]));
        assert!(close(&water_levels_alg2(&f, &[0.0; 3]).unwrap().w, &[0.0; 3]));
        let f = Partition::new(3, vec![vec![0], vec![1, 2]], vec![1.0, 1.0]).unwrap();
        assert!(close(&water_levels_alg2(&f, &[0.5, 0.0, 0.0]).unwrap().w, &[0.5, 0.0, 0.0]));
    }
}
