//! Minimization of modular-shifted submodular functions
//! `h(S) = c · f_T(S) − m(S)` over subsets of a domain disjoint from `T`.
//!
//! Minimizers form a lattice, so the minimal and maximal minimizers are
//! unique; every backend reports both.

use super::SetFunction;
use crate::error::{Error, Result};
use crate::set::ElementSet;
use crate::tol::tolerance;

/// Largest domain enumerated by [`Backend::Exhaustive`].
pub const EXHAUSTIVE_MAX: usize = 20;
/// Largest domain [`Backend::Auto`] enumerates before switching to the
/// minimum-norm-point routine.
pub const AUTO_EXHAUSTIVE_MAX: usize = 12;

const MNP_MAX_ITERS: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Backend {
    /// Cardinality profile or family-specific minimizer when available,
    /// otherwise enumeration for small domains and minimum-norm point beyond.
    #[default]
    Auto,
    Exhaustive,
    MinNorm,
}

/// `h(S) = scale · (f(S ∪ T) − f(T)) − Σ_{e∈S} weights[e]` over `S ⊆ domain`.
#[derive(Clone, Copy)]
pub struct ShiftedProblem<'a> {
    pub f: &'a dyn SetFunction,
    pub scale: f64,
    /// Indexed by element id.
    pub weights: &'a [f64],
    pub contracted: &'a ElementSet,
    pub domain: &'a [usize],
}

#[derive(Debug, Clone, PartialEq)]
pub struct SfmSolution {
    pub value: f64,
    /// Sorted element ids.
    pub minimal: Vec<usize>,
    pub maximal: Vec<usize>,
}

impl<'a> ShiftedProblem<'a> {
    pub fn new(
        f: &'a dyn SetFunction,
        scale: f64,
        weights: &'a [f64],
        contracted: &'a ElementSet,
        domain: &'a [usize],
    ) -> Self {
        ShiftedProblem { f, scale, weights, contracted, domain }
    }

    fn validate(&self) -> Result<()> {
        let n = self.f.ground_size();
        if !(self.scale.is_finite() && self.scale >= 0.0) {
            return Err(Error::input("sfm: scale must be nonnegative"));
        }
        if self.weights.len() != n || self.contracted.universe() != n {
            return Err(Error::input("sfm: weights or contracted set do not match the ground set"));
        }
        for &d in self.domain {
            if d >= n {
                return Err(Error::input(format!("sfm: domain element {d} out of range")));
            }
            if self.contracted.contains(d) {
                return Err(Error::input(format!("sfm: domain element {d} is contracted")));
            }
        }
        Ok(())
    }

    /// `h(S)` for `S` given as element ids.
    pub fn value_of(&self, set: &[usize]) -> f64 {
        let mut s = self.contracted.clone();
        for &e in set {
            s.insert(e);
        }
        let m: f64 = set.iter().map(|&e| self.weights[e]).sum();
        self.scale * (self.f.eval(&s) - self.f.eval(self.contracted)) - m
    }
}

/// Absolute slack for deciding that two values of `h` coincide.
fn value_slack(p: &ShiftedProblem<'_>) -> f64 {
    let mut all = p.contracted.clone();
    for &d in p.domain {
        all.insert(d);
    }
    let span = p.scale * (p.f.eval(&all) - p.f.eval(p.contracted));
    let mass: f64 = p.domain.iter().map(|&d| p.weights[d].abs()).sum();
    tolerance() * span.max(mass).max(1.0)
}

/// Minimizes `h` with the elements of `include` forced in and those of
/// `exclude` forced out. Forced elements must lie in the domain.
pub fn sfm_min_constrained(
    p: &ShiftedProblem<'_>,
    include: &[usize],
    exclude: &[usize],
    backend: Backend,
) -> Result<SfmSolution> {
    p.validate()?;
    for &e in include.iter().chain(exclude) {
        if p.contracted.contains(e) {
            return Err(Error::input(format!("sfm: constrained element {e} is already contracted")));
        }
        if !p.domain.contains(&e) {
            return Err(Error::input(format!("sfm: constrained element {e} is outside the domain")));
        }
    }
    if include.iter().any(|e| exclude.contains(e)) {
        return Err(Error::input("sfm: an element is both included and excluded"));
    }
    if include.is_empty() {
        let domain: Vec<usize> = p.domain.iter().copied().filter(|d| !exclude.contains(d)).collect();
        return solve(&ShiftedProblem { domain: &domain, ..*p }, backend);
    }
    let mut contracted = p.contracted.clone();
    for &e in include {
        contracted.insert(e);
    }
    let offset = p.value_of(include);
    let domain: Vec<usize> =
        p.domain.iter().copied().filter(|d| !include.contains(d) && !exclude.contains(d)).collect();
    let mut sol = solve(&ShiftedProblem { contracted: &contracted, domain: &domain, ..*p }, backend)?;
    sol.value += offset;
    for set in [&mut sol.minimal, &mut sol.maximal] {
        set.extend_from_slice(include);
        set.sort_unstable();
    }
    Ok(sol)
}

/// Unconstrained minimization over the domain.
pub fn sfm_min(p: &ShiftedProblem<'_>, backend: Backend) -> Result<SfmSolution> {
    sfm_min_constrained(p, &[], &[], backend)
}

/// Minimization over sets containing `e`.
pub fn sfm_min_containing(p: &ShiftedProblem<'_>, e: usize, backend: Backend) -> Result<SfmSolution> {
    if p.contracted.contains(e) {
        return Err(Error::input(format!("sfm: constraint element {e} is contracted")));
    }
    sfm_min_constrained(p, &[e], &[], backend)
}

fn solve(p: &ShiftedProblem<'_>, backend: Backend) -> Result<SfmSolution> {
    if p.domain.is_empty() {
        return Ok(SfmSolution { value: 0.0, minimal: vec![], maximal: vec![] });
    }
    match backend {
        Backend::Exhaustive => exhaustive(p),
        Backend::MinNorm => Ok(min_norm(p)),
        Backend::Auto => {
            if p.scale == 0.0 {
                return Ok(modular_only(p));
            }
            if let Some(sol) = by_profile(p) {
                return Ok(sol);
            }
            if let Some(sol) = by_family_minimizer(p) {
                return Ok(sol);
            }
            if p.domain.len() <= AUTO_EXHAUSTIVE_MAX {
                exhaustive(p)
            } else {
                Ok(min_norm(p))
            }
        }
    }
}

fn sorted(mut v: Vec<usize>) -> Vec<usize> {
    v.sort_unstable();
    v
}

fn modular_only(p: &ShiftedProblem<'_>) -> SfmSolution {
    let value = -p.domain.iter().map(|&d| p.weights[d].max(0.0)).sum::<f64>();
    SfmSolution {
        value,
        minimal: sorted(p.domain.iter().copied().filter(|&d| p.weights[d] > 0.0).collect()),
        maximal: sorted(p.domain.iter().copied().filter(|&d| p.weights[d] >= 0.0).collect()),
    }
}

/// For symmetric domains the best set of each size is a prefix of the
/// domain sorted by decreasing weight.
fn by_profile(p: &ShiftedProblem<'_>) -> Option<SfmSolution> {
    let mut order = p.domain.to_vec();
    order.sort_by(|&a, &b| p.weights[b].total_cmp(&p.weights[a]).then(a.cmp(&b)));
    let profile = p.f.cardinality_profile(&order, p.contracted)?;
    let mut values = Vec::with_capacity(order.len() + 1);
    let mut mass = 0.0;
    values.push(0.0);
    for (k, &e) in order.iter().enumerate() {
        mass += p.weights[e];
        values.push(p.scale * profile[k + 1] - mass);
    }
    Some(from_prefix_values(p, &order, &values))
}

/// Picks the smallest and largest optimal prefix of `order`, given the
/// value of each prefix length.
fn from_prefix_values(p: &ShiftedProblem<'_>, order: &[usize], values: &[f64]) -> SfmSolution {
    let best = values.iter().copied().fold(f64::INFINITY, f64::min);
    let slack = value_slack(p);
    let lo = values.iter().position(|&v| v <= best + slack).unwrap_or(0);
    let hi = values.iter().rposition(|&v| v <= best + slack).unwrap_or(0);
    SfmSolution { value: best, minimal: sorted(order[..lo].to_vec()), maximal: sorted(order[..hi].to_vec()) }
}

/// Uses an exact family-specific minimum value and recovers the lattice
/// extremes element by element: `e` is in the maximal minimizer iff forcing
/// it in keeps the optimum, and in the minimal one iff forcing it out loses it.
fn by_family_minimizer(p: &ShiftedProblem<'_>) -> Option<SfmSolution> {
    let value = p.f.min_shifted(p.scale, p.weights, p.contracted, p.domain)?;
    let slack = value_slack(p);
    let mut minimal = Vec::new();
    let mut maximal = Vec::new();
    for &e in p.domain {
        let rest: Vec<usize> = p.domain.iter().copied().filter(|&d| d != e).collect();
        let with_e = p.contracted.with(e);
        let forced_in = p.f.min_shifted(p.scale, p.weights, &with_e, &rest)?
            + p.scale * (p.f.eval(&with_e) - p.f.eval(p.contracted))
            - p.weights[e];
        if forced_in <= value + slack {
            maximal.push(e);
        }
        let forced_out = p.f.min_shifted(p.scale, p.weights, p.contracted, &rest)?;
        if forced_out > value + slack {
            minimal.push(e);
        }
    }
    Some(SfmSolution { value, minimal: sorted(minimal), maximal: sorted(maximal) })
}

fn exhaustive(p: &ShiftedProblem<'_>) -> Result<SfmSolution> {
    let k = p.domain.len();
    if k > EXHAUSTIVE_MAX {
        return Err(Error::capability(format!("exhaustive minimization limited to {EXHAUSTIVE_MAX} free elements")));
    }
    let base = p.f.eval(p.contracted);
    let values: Vec<f64> = (0..1u64 << k)
        .map(|mask| {
            let mut s = p.contracted.clone();
            let mut m = 0.0;
            for (i, &e) in p.domain.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    s.insert(e);
                    m += p.weights[e];
                }
            }
            p.scale * (p.f.eval(&s) - base) - m
        })
        .collect();
    let best = values.iter().copied().fold(f64::INFINITY, f64::min);
    let slack = value_slack(p);
    let (mut meet, mut join) = (u64::MAX, 0u64);
    for (mask, &v) in values.iter().enumerate() {
        if v <= best + slack {
            meet &= mask as u64;
            join |= mask as u64;
        }
    }
    let pick = |mask: u64| sorted((0..k).filter(|i| mask & (1 << i) != 0).map(|i| p.domain[i]).collect());
    Ok(SfmSolution { value: best, minimal: pick(meet), maximal: pick(join) })
}

/// Fujishige–Wolfe minimum-norm point in the base polytope of `h`, followed
/// by a scan of the prefixes of the domain ordered by the point's coordinates.
fn min_norm(p: &ShiftedProblem<'_>) -> SfmSolution {
    let k = p.domain.len();
    let base = p.f.eval(p.contracted);
    let h = |prefix: &ElementSet, m: f64| p.scale * (p.f.eval(prefix) - base) - m;

    let greedy = |x: &[f64]| -> Vec<f64> {
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by(|&a, &b| x[a].total_cmp(&x[b]).then(a.cmp(&b)));
        let mut s = p.contracted.clone();
        let mut prev = 0.0;
        let mut mass = 0.0;
        let mut q = vec![0.0; k];
        for &i in &order {
            s.insert(p.domain[i]);
            mass += p.weights[p.domain[i]];
            let cur = h(&s, mass);
            q[i] = cur - prev;
            prev = cur;
        }
        q
    };

    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let mut corral: Vec<Vec<f64>> = vec![greedy(&vec![0.0; k])];
    let mut lambda = vec![1.0];
    let mut x = corral[0].clone();
    for _ in 0..MNP_MAX_ITERS {
        let q = greedy(&x);
        let gap = dot(&x, &x) - dot(&x, &q);
        let scale = corral.iter().chain(std::iter::once(&q)).map(|v| dot(v, v)).fold(1.0, f64::max);
        if gap <= 1e-12 * scale || corral.iter().any(|c| c == &q) {
            break;
        }
        corral.push(q);
        lambda.push(0.0);
        while let Some(mu) = affine_minimizer(&corral) {
            if mu.iter().all(|&m| m > 1e-15) {
                lambda = mu;
                break;
            }
            let mut theta = 1.0f64;
            for (l, m) in lambda.iter().zip(&mu) {
                if *m <= 1e-15 && l - m > 0.0 {
                    theta = theta.min(l / (l - m));
                }
            }
            for (l, m) in lambda.iter_mut().zip(&mu) {
                *l = theta * m + (1.0 - theta) * *l;
            }
            let mut i = 0;
            while i < corral.len() {
                if lambda[i] <= 1e-15 {
                    corral.swap_remove(i);
                    lambda.swap_remove(i);
                } else {
                    i += 1;
                }
            }
            let total: f64 = lambda.iter().sum();
            lambda.iter_mut().for_each(|l| *l /= total);
        }
        x = vec![0.0; k];
        for (c, l) in corral.iter().zip(&lambda) {
            for (xi, ci) in x.iter_mut().zip(c) {
                *xi += l * ci;
            }
        }
    }

    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]).then(a.cmp(&b)));
    let elems: Vec<usize> = order.iter().map(|&i| p.domain[i]).collect();
    let mut values = Vec::with_capacity(k + 1);
    values.push(0.0);
    let mut s = p.contracted.clone();
    let mut mass = 0.0;
    for &e in &elems {
        s.insert(e);
        mass += p.weights[e];
        values.push(h(&s, mass));
    }
    from_prefix_values(p, &elems, &values)
}

/// Coefficients `μ` (summing to 1) of the point of minimum norm in the
/// affine hull of `points`.
fn affine_minimizer(points: &[Vec<f64>]) -> Option<Vec<f64>> {
    let r = points.len();
    let mut a = vec![vec![0.0; r + 1]; r];
    for i in 0..r {
        for j in 0..r {
            a[i][j] = points[i].iter().zip(&points[j]).map(|(x, y)| x * y).sum();
        }
        a[i][i] += 1e-13;
        a[i][r] = 1.0;
    }
    for col in 0..r {
        let pivot = (col..r).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, pivot);
        let pivot_row = a[col].clone();
        for (row, target) in a.iter_mut().enumerate() {
            if row != col {
                let factor = target[col] / pivot_row[col];
                if factor != 0.0 {
                    for (t, p) in target[col..=r].iter_mut().zip(&pivot_row[col..=r]) {
                        *t -= factor * p;
                    }
                }
            }
        }
    }
    let alpha: Vec<f64> = (0..r).map(|i| a[i][r] / a[i][i]).collect();
    let total: f64 = alpha.iter().sum();
    if !total.is_finite() || total.abs() < 1e-300 {
        return None;
    }
    Some(alpha.into_iter().map(|v| v / total).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::submodular::{Partition, Table, Uniform};

    fn problem<'a>(
        f: &'a dyn SetFunction,
        scale: f64,
        w: &'a [f64],
        t: &'a ElementSet,
        d: &'a [usize],
    ) -> ShiftedProblem<'a> {
        ShiftedProblem::new(f, scale, w, t, d)
    }

    #[test]
    fn modular_function_empty_minimizer() {
        let f = Uniform::new(2, 2.0).unwrap();
        let t = ElementSet::empty(2);
        let w = [0.3, 0.7];
        for backend in [Backend::Auto, Backend::Exhaustive, Backend::MinNorm] {
            let sol = sfm_min(&problem(&f, 1.0, &w, &t, &[0, 1]), backend).unwrap();
            assert!(sol.value.abs() < 1e-12);
            assert!(sol.maximal.is_empty(), "{backend:?}");
        }
    }

    #[test]
    fn zero_scale_takes_everything() {
        let f = Uniform::new(3, 1.0).unwrap();
        let t = ElementSet::empty(3);
        let w = [0.3, 0.7, 0.0];
        let sol = sfm_min(&problem(&f, 0.0, &w, &t, &[0, 1, 2]), Backend::Auto).unwrap();
        assert_eq!(sol.maximal, vec![0, 1, 2]);
        assert_eq!(sol.minimal, vec![0, 1]);
        assert!((sol.value + 1.0).abs() < 1e-12);
    }

    #[test]
    fn rank_one_shift() {
        let f = Uniform::new(2, 1.0).unwrap();
        let t = ElementSet::empty(2);
        let w = [0.3, 0.7];
        // h(∅)=0, h({a})=0.2, h({b})=−0.2, h({a,b})=−0.5.
        for backend in [Backend::Auto, Backend::Exhaustive, Backend::MinNorm] {
            let sol = sfm_min(&problem(&f, 0.5, &w, &t, &[0, 1]), backend).unwrap();
            assert!((sol.value + 0.5).abs() < 1e-12, "{backend:?}");
            assert_eq!(sol.minimal, vec![0, 1]);
        }
        let sol = sfm_min_constrained(&problem(&f, 0.5, &w, &t, &[0, 1]), &[], &[0], Backend::Auto).unwrap();
        assert!((sol.value + 0.2).abs() < 1e-12);
        assert_eq!(sol.minimal, vec![1]);
    }

    #[test]
    fn lattice_extremes_differ() {
        // Minimizers of h on rank-1 {a,b} with c=1, m=(0.5,0.5) are ∅ and {a,b}.
        let f = Uniform::new(2, 1.0).unwrap();
        let t = ElementSet::empty(2);
        let w = [0.5, 0.5];
        for backend in [Backend::Auto, Backend::Exhaustive, Backend::MinNorm] {
            let sol = sfm_min(&problem(&f, 1.0, &w, &t, &[0, 1]), backend).unwrap();
            assert!(sol.value.abs() < 1e-12);
            assert!(sol.minimal.is_empty(), "{backend:?}");
            assert_eq!(sol.maximal, vec![0, 1], "{backend:?}");
        }
        let tab = Table::tabulate(&f).unwrap();
        let sol = sfm_min(&problem(&tab, 1.0, &w, &t, &[0, 1]), Backend::Auto).unwrap();
        assert_eq!((sol.minimal.len(), sol.maximal.len()), (0, 2));
    }

    #[test]
    fn containing_constraint() {
        let f = Partition::new(3, vec![vec![0, 1], vec![2]], vec![1.0, 1.0]).unwrap();
        let t = ElementSet::empty(3);
        let w = [0.2, 0.3, 0.9];
        let sol = sfm_min_containing(&problem(&f, 1.0, &w, &t, &[0, 1, 2]), 0, Backend::Auto).unwrap();
        // {a,b} costs 1 − 0.5; adding {c} would add 1 − 0.9 > 0.
        assert!((sol.value - 0.5).abs() < 1e-12);
        assert_eq!(sol.maximal, vec![0, 1]);
        assert_eq!(sol.minimal, vec![0, 1]);
        let tc = ElementSet::from_elements(3, [0]);
        assert!(sfm_min_containing(&problem(&f, 1.0, &w, &tc, &[1, 2]), 0, Backend::Auto).is_err());
    }
}
