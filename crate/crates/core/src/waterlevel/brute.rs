//! Exhaustive evaluation of the max–min water-level formula.

use super::validate_load;
use crate::error::{Error, Result};
use crate::set::ElementSet;
use crate::submodular::SetFunction;
use crate::tol::tolerance;

/// Largest ground set handled by exhaustive evaluation.
pub const BRUTE_MAX_N: usize = 16;

/// Both orders of the water-level saddle problem for one element.
#[derive(Debug, Clone, PartialEq)]
pub struct BruteLevel {
    /// `max_{S∋e} min_T x(S∖T)/f_T(S)` over `T` with `f_T({e}) ≠ 0`.
    pub max_min: f64,
    /// `min_T max_{S∋e} x(S∖T)/f_T(S)`.
    pub min_max: f64,
    /// Maximizing `S` of the max–min order and its minimizing `T`.
    pub saddle: Option<(Vec<usize>, Vec<usize>)>,
}

struct Tables {
    n: usize,
    f: Vec<f64>,
    x: Vec<f64>,
}

impl Tables {
    fn build(f: &dyn SetFunction, x: &[f64]) -> Result<Self> {
        validate_load(f, x)?;
        let n = f.ground_size();
        if n > BRUTE_MAX_N {
            return Err(Error::capability(format!("exhaustive water levels limited to n <= {BRUTE_MAX_N}")));
        }
        let size = 1usize << n;
        let fv = (0..size).map(|m| f.eval(&ElementSet::from_mask(n, m as u64))).collect();
        let mut xv = vec![0.0; size];
        for m in 1..size {
            let low = m.trailing_zeros() as usize;
            xv[m] = xv[m & (m - 1)] + x[low];
        }
        Ok(Tables { n, f: fv, x: xv })
    }

    fn admissible(&self, t: usize, bit: usize) -> bool {
        self.f[t | bit] - self.f[t] > tolerance() * self.f[t].max(1.0)
    }

    fn level(&self, e: usize) -> BruteLevel {
        let full = (1usize << self.n) - 1;
        let bit = 1usize << e;
        let elems = |m: usize| (0..self.n).filter(|i| m & (1 << i) != 0).collect::<Vec<_>>();

        // T may be taken inside S ∖ {e}: intersecting with S only lowers
        // f_T(S) and keeps f_T({e}) positive.
        let mut max_min = f64::NEG_INFINITY;
        let mut saddle = None;
        let rest_all = full ^ bit;
        let mut rest = rest_all;
        loop {
            let s = rest | bit;
            let mut inner = f64::INFINITY;
            let mut arg_t = 0;
            let mut t = rest;
            loop {
                if self.admissible(t, bit) {
                    let r = (self.x[s] - self.x[t]) / (self.f[s] - self.f[t]);
                    if r < inner {
                        inner = r;
                        arg_t = t;
                    }
                }
                if t == 0 {
                    break;
                }
                t = (t - 1) & rest;
            }
            if inner.is_finite() && inner > max_min {
                max_min = inner;
                saddle = Some((elems(s), elems(arg_t)));
            }
            if rest == 0 {
                break;
            }
            rest = (rest - 1) & rest_all;
        }

        // f_T(S) depends only on S ∖ T, so S may be taken disjoint from T.
        let mut min_max = f64::INFINITY;
        let mut t = rest_all;
        loop {
            if self.admissible(t, bit) {
                let free = full ^ t ^ bit;
                let mut inner = f64::NEG_INFINITY;
                let mut s0 = free;
                loop {
                    let s = s0 | bit;
                    let r = self.x[s] / (self.f[s | t] - self.f[t]);
                    inner = inner.max(r);
                    if s0 == 0 {
                        break;
                    }
                    s0 = (s0 - 1) & free;
                }
                min_max = min_max.min(inner);
            }
            if t == 0 {
                break;
            }
            t = (t - 1) & rest_all;
        }

        if saddle.is_none() {
            return BruteLevel { max_min: 0.0, min_max: 0.0, saddle: None };
        }
        BruteLevel { max_min, min_max, saddle }
    }
}

/// Exhaustive water level of `e` (n ≤ 16). Elements with `f({e}) = 0`
/// admit no `T` and are reported at level 0.
pub fn water_level_brute(f: &dyn SetFunction, x: &[f64], e: usize) -> Result<BruteLevel> {
    if e >= f.ground_size() {
        return Err(Error::input(format!("element {e} out of range")));
    }
    Ok(Tables::build(f, x)?.level(e))
}

/// Exhaustive water levels of every element, sharing one value table.
pub fn water_levels_brute(f: &dyn SetFunction, x: &[f64]) -> Result<Vec<BruteLevel>> {
    let tables = Tables::build(f, x)?;
    Ok((0..tables.n).map(|e| tables.level(e)).collect())
}

/// The one-sided density `max_{S∋e} x(S)/f(S)`, which ignores contraction.
pub fn naive_water_level(f: &dyn SetFunction, x: &[f64], e: usize) -> Result<f64> {
    if e >= f.ground_size() {
        return Err(Error::input(format!("element {e} out of range")));
    }
    let tables = Tables::build(f, x)?;
    let full = (1usize << tables.n) - 1;
    let bit = 1 << e;
    let mut best = 0.0f64;
    let mut rest = full ^ bit;
    loop {
        let s = rest | bit;
        if tables.f[s] > 0.0 {
            best = best.max(tables.x[s] / tables.f[s]);
        }
        if rest == 0 {
            break;
        }
        rest = (rest - 1) & (full ^ bit);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::submodular::{Partition, Uniform};

    #[test]
    fn modular_vs_naive() {
        let f = Uniform::new(2, 2.0).unwrap();
        let x = [0.3, 0.7];
        let b = water_level_brute(&f, &x, 0).unwrap();
        assert!((b.max_min - 0.3).abs() < 1e-12);
        assert!((b.min_max - 0.3).abs() < 1e-12);
        assert!((naive_water_level(&f, &x, 0).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn zero_load_is_zero() {
        let f = Partition::new(3, vec![vec![0, 1], vec![2]], vec![1.0, 1.0]).unwrap();
        for e in 0..3 {
            let b = water_level_brute(&f, &[0.0; 3], e).unwrap();
            assert_eq!((b.max_min, b.min_max), (0.0, 0.0));
        }
    }

    #[test]
    fn partition_levels_and_saddle() {
        let f = Partition::new(3, vec![vec![0, 1], vec![2]], vec![1.0, 1.0]).unwrap();
        let levels = water_levels_brute(&f, &[0.2, 0.3, 0.9]).unwrap();
        let w: Vec<f64> = levels.iter().map(|l| l.max_min).collect();
        for (got, want) in w.iter().zip([0.5, 0.5, 0.9]) {
            assert!((got - want).abs() < 1e-12);
        }
        for l in &levels {
            assert!((l.max_min - l.min_max).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_large_ground_sets() {
        let f = Uniform::new(17, 1.0).unwrap();
        assert!(matches!(water_level_brute(&f, &[0.0; 17], 0), Err(Error::Capability(_))));
    }
}
