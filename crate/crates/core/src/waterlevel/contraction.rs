//! Water levels by repeatedly contracting the largest densest set.

use super::{assemble, validate_load, Block, Decomposition};
use crate::error::{Error, Result};
use crate::set::ElementSet;
use crate::submodular::sfm::{sfm_min, Backend, ShiftedProblem};
use crate::submodular::SetFunction;
use crate::tol::tolerance;

const DINKELBACH_MAX_ITERS: usize = 200;

pub fn water_levels_alg1(f: &dyn SetFunction, x: &[f64]) -> Result<Decomposition> {
    water_levels_alg1_with(f, x, Backend::Auto)
}

/// Runs the contraction scheme independently on each component of `f` and
/// merges the per-component chains by density.
pub fn water_levels_alg1_with(f: &dyn SetFunction, x: &[f64], backend: Backend) -> Result<Decomposition> {
    validate_load(f, x)?;
    let n = f.ground_size();
    let mut blocks = Vec::new();
    for comp in f.components() {
        component_chain(f, x, &comp, backend, &mut blocks)?;
    }
    Ok(assemble(n, x, blocks))
}

fn component_chain(
    f: &dyn SetFunction,
    x: &[f64],
    comp: &[usize],
    backend: Backend,
    out: &mut Vec<Block>,
) -> Result<()> {
    let n = f.ground_size();
    let mut prefix = ElementSet::empty(n);
    let mut f_prefix = 0.0;
    let mut rest: Vec<usize> = comp.to_vec();
    while !rest.is_empty() {
        let mass: f64 = rest.iter().map(|&e| x[e]).sum();
        let all = ElementSet::from_elements(n, rest.iter().copied()).union(&prefix);
        let gain = f.eval(&all) - f_prefix;
        if mass <= 0.0 {
            out.push(Block { density: 0.0, elements: rest, mass: 0.0, rank_gain: gain.max(0.0) });
            return Ok(());
        }
        if gain <= tolerance() * f_prefix.max(1.0) {
            // Positive load on elements spanned by the prefix cannot occur for
            // an exact maximal densest prefix; rounding is absorbed upward.
            match out.last_mut() {
                Some(last) => {
                    last.elements.extend(rest);
                    last.mass += mass;
                    if last.rank_gain > 0.0 {
                        last.density = last.mass / last.rank_gain;
                    }
                    return Ok(());
                }
                None => return Err(Error::invariant("positive load on a set of zero rank")),
            }
        }
        let (set, density) = densest(f, x, &prefix, f_prefix, &rest, mass / gain, backend)?;
        let block_mass: f64 = set.iter().map(|&e| x[e]).sum();
        let mut next = prefix.clone();
        for &e in &set {
            next.insert(e);
        }
        let f_next = f.eval(&next);
        out.push(Block { density, elements: set.clone(), mass: block_mass, rank_gain: f_next - f_prefix });
        prefix = next;
        f_prefix = f_next;
        rest.retain(|e| !prefix.contains(*e));
    }
    Ok(())
}

/// Dinkelbach iteration from the density of the whole remainder: the
/// maximal minimizer of `t·f_P(S) − x(S)` has density above `t` until `t`
/// is the optimum, at which point it is the largest densest set.
fn densest(
    f: &dyn SetFunction,
    x: &[f64],
    prefix: &ElementSet,
    f_prefix: f64,
    rest: &[usize],
    start: f64,
    backend: Backend,
) -> Result<(Vec<usize>, f64)> {
    let n = f.ground_size();
    let density_of = |set: &[usize]| {
        let s = ElementSet::from_elements(n, set.iter().copied()).union(prefix);
        let mass: f64 = set.iter().map(|&e| x[e]).sum();
        mass / (f.eval(&s) - f_prefix)
    };
    let mut t = start;
    let mut best: Vec<usize> = rest.to_vec();
    for _ in 0..DINKELBACH_MAX_ITERS {
        let problem = ShiftedProblem::new(f, t, x, prefix, rest);
        let sol = sfm_min(&problem, backend)?;
        let slack = tolerance() * t.max(1.0) * (f_prefix + 1.0);
        if sol.value < -slack && !sol.maximal.is_empty() {
            let next = density_of(&sol.maximal);
            if next.is_finite() && next > t {
                t = next;
                best = sol.maximal;
                continue;
            }
        }
        if !sol.maximal.is_empty() {
            best = sol.maximal;
        }
        let exact = density_of(&best);
        return Ok((best, if exact.is_finite() { exact } else { t }));
    }
    Err(Error::invariant("densest-set iteration did not converge"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::submodular::{Partition, Uniform};

    fn close(a: &[f64], b: &[f64]) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-12)
    }

    #[test]
    fn modular_levels_equal_loads() {
        let f = Uniform::new(2, 2.0).unwrap();
        let d = water_levels_alg1(&f, &[0.3, 0.7]).unwrap();
        assert!(close(&d.w, &[0.3, 0.7]));
        assert_eq!(d.chain, vec![vec![1], vec![0, 1]]);
        assert!(close(&d.densities, &[0.7, 0.3]));
    }

    #[test]
    fn rank_one_merges_both() {
        let f = Uniform::new(2, 1.0).unwrap();
        let d = water_levels_alg1(&f, &[0.3, 0.7]).unwrap();
        assert!(close(&d.w, &[1.0, 1.0]));
        assert_eq!(d.chain, vec![vec![0, 1]]);
    }

    #[test]
    fn partition_fill_fractions() {
        let f = Partition::new(3, vec![vec![0, 1], vec![2]], vec![1.0, 1.0]).unwrap();
        let d = water_levels_alg1(&f, &[0.2, 0.3, 0.9]).unwrap();
        assert!(close(&d.w, &[0.5, 0.5, 0.9]));
        assert_eq!(d.chain, vec![vec![2], vec![0, 1, 2]]);
        assert!(close(&d.alpha, &[0.4, 0.5]));
    }

    #[test]
    fn zero_load_joins_spanning_block() {
        let f = Uniform::new(2, 1.0).unwrap();
        let d = water_levels_alg1(&f, &[1.0, 0.0]).unwrap();
        assert!(close(&d.w, &[1.0, 1.0]));
        let f = Uniform::new(3, 2.0).unwrap();
        // {a,b,c} is as dense as {a,b}; c is spanned only once a and b are.
        let d = water_levels_alg1(&f, &[1.0, 1.0, 0.0]).unwrap();
        assert!(close(&d.w, &[1.0, 1.0, 1.0]));
    }

    #[test]
    fn all_zero_load() {
        let f = Uniform::new(3, 2.0).unwrap();
        let d = water_levels_alg1(&f, &[0.0; 3]).unwrap();
        assert!(close(&d.w, &[0.0; 3]));
        assert_eq!(d.chain, vec![vec![0, 1, 2]]);
    }
}
