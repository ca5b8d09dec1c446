//! Water levels of a load vector against a polymatroid, computed by three
//! independent routes, plus the derived decomposition data.

mod brute;
mod contraction;
mod freezing;
mod kkt;
mod threshold;
mod tight;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::submodular::SetFunction;

pub use brute::{naive_water_level, water_level_brute, water_levels_brute, BruteLevel, BRUTE_MAX_N};
pub use contraction::{water_levels_alg1, water_levels_alg1_with};
pub use freezing::{water_levels_alg2, water_levels_alg2_with};
pub use kkt::{verify_sua_kkt, KktReport};
pub use threshold::{support_ratios, thresholded_levels, ThresholdLevel, ThresholdedLevels};
pub use tight::{minimal_tight_set, TightSet};

/// Principal-partition decomposition of a load vector.
///
/// `chain` lists the nonempty nested sets `S_1 ⊂ … ⊂ S_L = E` (the empty
/// `S_0` is implicit), each sorted. `densities[ℓ]` is the level of the
/// elements in `S_{ℓ+1} \ S_ℓ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Decomposition {
    pub w: Vec<f64>,
    pub chain: Vec<Vec<usize>>,
    pub densities: Vec<f64>,
    pub alpha: Vec<f64>,
    pub u: Vec<f64>,
}

impl Decomposition {
    pub fn max_level(&self) -> f64 {
        self.w.iter().copied().fold(0.0, f64::max)
    }

    /// Index into `chain` of the block that contains `e`.
    pub fn level_of(&self, e: usize) -> Option<usize> {
        self.chain.iter().position(|s| s.binary_search(&e).is_ok())
    }
}

/// One block of a decomposition before assembly: elements entering the
/// chain together, their total load and the rank increment they add.
#[derive(Debug, Clone)]
pub(crate) struct Block {
    pub density: f64,
    pub elements: Vec<usize>,
    pub mass: f64,
    pub rank_gain: f64,
}

pub(crate) fn validate_load(f: &dyn SetFunction, x: &[f64]) -> Result<()> {
    if x.len() != f.ground_size() {
        return Err(Error::input(format!("load vector has length {}, expected {}", x.len(), f.ground_size())));
    }
    if let Some(e) = x.iter().position(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(Error::input(format!("load of element {e} is negative or not finite")));
    }
    Ok(())
}

/// Orders blocks by decreasing density, merges blocks whose densities agree
/// to rounding, and derives the chain, levels and market duals.
pub(crate) fn assemble(n: usize, x: &[f64], mut blocks: Vec<Block>) -> Decomposition {
    blocks.retain(|b| !b.elements.is_empty());
    blocks.sort_by(|a, b| b.density.total_cmp(&a.density).then(a.elements[0].cmp(&b.elements[0])));
    let mut merged: Vec<Block> = Vec::new();
    for b in blocks {
        match merged.last_mut() {
            Some(last) if (last.density - b.density).abs() <= 1e-10 * last.density.max(1.0) => {
                last.elements.extend(b.elements);
                last.mass += b.mass;
                last.rank_gain += b.rank_gain;
                if last.density > 0.0 && last.rank_gain > 0.0 {
                    last.density = last.mass / last.rank_gain;
                }
            }
            _ => merged.push(b),
        }
    }
    let mut w = vec![0.0; n];
    let mut chain = Vec::with_capacity(merged.len());
    let mut densities = Vec::with_capacity(merged.len());
    let mut prefix: Vec<usize> = Vec::new();
    for b in &merged {
        for &e in &b.elements {
            w[e] = b.density;
        }
        prefix.extend_from_slice(&b.elements);
        prefix.sort_unstable();
        chain.push(prefix.clone());
        densities.push(b.density);
    }
    let alpha = (0..densities.len()).map(|l| densities[l] - densities.get(l + 1).copied().unwrap_or(0.0)).collect();
    let u = (0..n).map(|e| if x[e] > 0.0 && w[e] > 0.0 { x[e] / w[e] } else { 0.0 }).collect();
    Decomposition { w, chain, densities, alpha, u }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_load, random_oracle, rng};

    #[test]
    fn three_routes_agree_on_random_instances() {
        let mut r = rng(11);
        for case in 0..80 {
            let n = 1 + case % 8;
            let f = random_oracle(&mut r, n);
            let x = random_load(&mut r, n);
            let a = water_levels_alg1(f.as_ref(), &x).unwrap();
            let b = water_levels_alg2(f.as_ref(), &x).unwrap();
            let c = water_levels_brute(f.as_ref(), &x).unwrap();
            for e in 0..n {
                assert!((a.w[e] - b.w[e]).abs() < 1e-7, "case {case} alg1 {:?} alg2 {:?}", a.w, b.w);
                assert!((a.w[e] - c[e].max_min).abs() < 1e-7, "case {case} alg1 {:?} brute {:?}", a.w, c);
                assert!((c[e].max_min - c[e].min_max).abs() < 1e-7);
            }
            assert!(verify_sua_kkt(f.as_ref(), &x, &a).unwrap().passed(), "case {case}");
        }
    }
}
