//! Water levels of the load restricted to elements of high bang-per-buck.

use serde::Serialize;

use super::{validate_load, water_levels_alg1, Decomposition};
use crate::error::{Error, Result};
use crate::submodular::SetFunction;

/// Decomposition of the load `(b_e x_e)` over elements with `v_e/b_e ≥ threshold`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdLevel {
    pub threshold: f64,
    pub decomposition: Decomposition,
}

/// `w^t` for every distinct support ratio `r_1 > … > r_K`, followed by the
/// `t = 0` entry. Between consecutive ratios `w^t` is constant:
/// `w^t = w^{r_k}` for `t ∈ (r_{k+1}, r_k]`, and `w^t = 0` above `r_1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdedLevels {
    pub levels: Vec<ThresholdLevel>,
}

impl ThresholdedLevels {
    /// Distinct positive thresholds, decreasing.
    pub fn ratios(&self) -> impl Iterator<Item = f64> + '_ {
        self.levels.iter().map(|l| l.threshold).filter(|&t| t > 0.0)
    }

    fn positive(&self) -> &[ThresholdLevel] {
        let k = self.levels.iter().filter(|l| l.threshold > 0.0).count();
        &self.levels[..k]
    }

    /// `w^t_e`.
    pub fn level_at(&self, e: usize, t: f64) -> f64 {
        let pos = self.positive();
        if pos.first().is_some_and(|l| t > l.threshold) {
            return 0.0;
        }
        match pos.iter().rev().find(|l| l.threshold >= t) {
            Some(l) => l.decomposition.w[e],
            None => self.levels.last().map_or(0.0, |l| l.decomposition.w[e]),
        }
    }

    /// `∫_0^upper h(w^t_e) dt`, exact for the piecewise-constant levels.
    pub fn integrate(&self, e: usize, upper: f64, h: impl Fn(f64) -> f64) -> f64 {
        if upper <= 0.0 {
            return 0.0;
        }
        let pos = self.positive();
        let mut total = 0.0;
        for (k, l) in pos.iter().enumerate() {
            let hi = l.threshold.min(upper);
            let lo = pos.get(k + 1).map_or(0.0, |n| n.threshold);
            if hi > lo {
                total += (hi - lo) * h(l.decomposition.w[e]);
            }
        }
        let top = pos.first().map_or(0.0, |l| l.threshold);
        if upper > top {
            total += (upper - top) * h(0.0);
        }
        total
    }

    /// `Σ_k (r_k − r_{k+1}) · φ(w^{r_k})` over the positive thresholds.
    pub fn weighted_sum(&self, mut phi: impl FnMut(&Decomposition) -> f64) -> f64 {
        let pos = self.positive();
        pos.iter()
            .enumerate()
            .map(|(k, l)| (l.threshold - pos.get(k + 1).map_or(0.0, |n| n.threshold)) * phi(&l.decomposition))
            .sum()
    }

    /// Decomposition at `t = 0`, i.e. of the full load.
    pub fn base(&self) -> &Decomposition {
        &self.levels.last().expect("thresholded levels always carry the t = 0 entry").decomposition
    }
}

/// Distinct bang-per-buck ratios of the support of `x`, decreasing.
pub fn support_ratios(x: &[f64], b: &[f64], v: &[f64]) -> Vec<f64> {
    let mut r: Vec<f64> = (0..x.len()).filter(|&e| x[e] > 0.0).map(|e| v[e] / b[e]).collect();
    r.sort_by(|a, b| b.total_cmp(a));
    r.dedup();
    r
}

pub fn thresholded_levels(f: &dyn SetFunction, x: &[f64], b: &[f64], v: &[f64]) -> Result<ThresholdedLevels> {
    validate_load(f, x)?;
    let n = f.ground_size();
    if b.len() != n || v.len() != n {
        return Err(Error::input("costs and values must match the ground set"));
    }
    if let Some(e) = b.iter().position(|&c| !(c.is_finite() && c > 0.0)) {
        return Err(Error::input(format!("cost of element {e} must be positive")));
    }
    if let Some(e) = (0..n).find(|&e| x[e] > 0.0 && !(v[e].is_finite() && v[e] > 0.0)) {
        return Err(Error::input(format!("value of supported element {e} must be positive")));
    }
    let mut levels = Vec::new();
    for r in support_ratios(x, b, v) {
        let load: Vec<f64> = (0..n).map(|e| if x[e] > 0.0 && v[e] / b[e] >= r { b[e] * x[e] } else { 0.0 }).collect();
        levels.push(ThresholdLevel { threshold: r, decomposition: water_levels_alg1(f, &load)? });
    }
    let base = match levels.last() {
        Some(l) => l.decomposition.clone(),
        None => water_levels_alg1(f, &vec![0.0; n])?,
    };
    levels.push(ThresholdLevel { threshold: 0.0, decomposition: base });
    Ok(ThresholdedLevels { levels })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::submodular::Uniform;

    #[test]
    fn equal_ratios_give_single_threshold() {
        let f = Uniform::new(2, 1.0).unwrap();
        let tl = thresholded_levels(&f, &[0.3, 0.4], &[1.0, 2.0], &[2.0, 4.0]).unwrap();
        assert_eq!(tl.ratios().collect::<Vec<_>>(), vec![2.0]);
        let plain = water_levels_alg1(&f, &[0.3, 0.8]).unwrap();
        assert_eq!(tl.levels[0].decomposition, plain);
        assert_eq!(tl.base(), &plain);
    }

    #[test]
    fn two_ratio_classes() {
        let f = Uniform::new(2, 1.0).unwrap();
        let tl = thresholded_levels(&f, &[0.5, 0.5], &[1.0, 1.0], &[2.0, 1.0]).unwrap();
        assert_eq!(tl.ratios().collect::<Vec<_>>(), vec![2.0, 1.0]);
        // At t=2 only a carries load, but b is spanned alongside it.
        assert_eq!(tl.levels[0].decomposition.w, vec![0.5, 0.5]);
        assert_eq!(tl.levels[1].decomposition.w, vec![1.0, 1.0]);
        assert_eq!(tl.level_at(0, 1.5), 0.5);
        assert_eq!(tl.level_at(0, 0.5), 1.0);
        assert_eq!(tl.level_at(0, 2.5), 0.0);
        // ∫_0^3 w^t_a dt = 1·1 + 1·0.5 + 1·0.
        assert!((tl.integrate(0, 3.0, |w| w) - 1.5).abs() < 1e-12);
    }

    #[test]
    fn empty_support() {
        let f = Uniform::new(2, 1.0).unwrap();
        let tl = thresholded_levels(&f, &[0.0, 0.0], &[1.0, 1.0], &[1.0, 1.0]).unwrap();
        assert_eq!(tl.levels.len(), 1);
        assert_eq!(tl.level_at(1, 0.7), 0.0);
        assert!((tl.integrate(1, 1.0, |w| w + 1.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn nonpositive_cost_rejected() {
        let f = Uniform::new(1, 1.0).unwrap();
        assert!(thresholded_levels(&f, &[0.1], &[0.0], &[1.0]).is_err());
    }
}
