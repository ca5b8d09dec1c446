//! Randomized ranking for online welfare maximization with weighted matroid
//! rank valuations.

mod montecarlo;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::set::ElementSet;
use crate::solvers::g;
use crate::submodular::DynOracle;

pub use montecarlo::{monte_carlo_ratio, monte_carlo_with_opt, trial_seed, trial_seeds, MonteCarlo, TrialRow};

/// Resolution of [`critical_threshold`].
pub const THRESHOLD_RESOLUTION: f64 = 1e-6;
/// Matroid axioms are checked exhaustively up to this many items.
pub const MATROID_CHECK_MAX_ITEMS: usize = 12;

#[derive(Clone)]
pub struct Agent {
    /// Rank function of the agent's matroid over the items.
    pub oracle: DynOracle,
    pub weight: f64,
}

#[derive(Clone)]
pub struct OswmInstance {
    pub items: usize,
    pub agents: Vec<Agent>,
}

impl std::fmt::Debug for OswmInstance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("OswmInstance")
            .field("items", &self.items)
            .field("weights", &self.agents.iter().map(|a| a.weight).collect::<Vec<_>>())
            .finish()
    }
}

impl OswmInstance {
    pub fn new(items: usize, agents: Vec<Agent>) -> Result<Self> {
        for (i, a) in agents.iter().enumerate() {
            if a.oracle.ground_size() != items {
                return Err(Error::input(format!(
                    "agent {i}: matroid has {} items, instance has {items}",
                    a.oracle.ground_size()
                )));
            }
            if !(a.weight.is_finite() && a.weight >= 0.0) {
                return Err(Error::input(format!("agent {i}: weight must be nonnegative")));
            }
            if items <= MATROID_CHECK_MAX_ITEMS {
                check_matroid_rank(a.oracle.as_ref(), items).map_err(|m| Error::input(format!("agent {i}: {m}")))?;
            }
        }
        Ok(OswmInstance { items, agents })
    }

    pub fn rank(&self, agent: usize, set: &ElementSet) -> f64 {
        self.agents[agent].oracle.eval(set)
    }

    /// `Σ_i a_i rank_i(U_i)` for an item → agent assignment.
    pub fn welfare(&self, assignment: &[Option<usize>]) -> f64 {
        self.bundles(assignment).iter().enumerate().map(|(i, u)| self.agents[i].weight * self.rank(i, u)).sum()
    }

    pub fn bundles(&self, assignment: &[Option<usize>]) -> Vec<ElementSet> {
        let mut u = vec![ElementSet::empty(self.items); self.agents.len()];
        for (j, a) in assignment.iter().enumerate() {
            if let Some(i) = a {
                u[*i].insert(j);
            }
        }
        u
    }

    /// `{ j : rank_i(U + j) = rank_i(U) }`.
    pub fn span(&self, agent: usize, set: &ElementSet) -> Vec<usize> {
        let r = self.rank(agent, set);
        (0..self.items).filter(|&j| set.contains(j) || self.rank(agent, &set.with(j)) <= r + 0.5).collect()
    }
}

/// Integral unit-increment check over all sets.
fn check_matroid_rank(f: &dyn crate::SetFunction, m: usize) -> std::result::Result<(), String> {
    let values: Vec<f64> = (0..1u64 << m).map(|mask| f.eval(&ElementSet::from_mask(m, mask))).collect();
    for (mask, &v) in values.iter().enumerate() {
        if (v - v.round()).abs() > 1e-9 {
            return Err(format!("rank value {v} is not an integer"));
        }
        for e in (0..m).filter(|e| mask >> e & 1 == 0) {
            let d = values[mask | 1 << e] - v;
            if !(d.abs() < 1e-9 || (d - 1.0).abs() < 1e-9) {
                return Err(format!("marginal {d} of item {e} is not 0 or 1"));
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankingRun {
    pub seeds: Vec<f64>,
    /// Agent receiving each item.
    pub assignment: Vec<Option<usize>>,
    /// Items of each agent, in arrival order.
    pub bundles: Vec<Vec<usize>>,
    pub welfare: f64,
    /// `β_j`: priority of the receiving agent, 0 for unassigned items.
    pub beta: Vec<f64>,
    /// `α_{i, span(U_i)} = a_i g(r_i)`.
    pub alpha: Vec<f64>,
    /// `span_i(U_i)` at termination.
    pub spans: Vec<Vec<usize>>,
}

impl RankingRun {
    /// `Σ_i α_i rank_i(span U_i) + Σ_j β_j`; `rank(span U) = |U|`.
    pub fn dual_objective(&self) -> f64 {
        self.alpha.iter().zip(&self.bundles).map(|(a, u)| a * u.len() as f64).sum::<f64>()
            + self.beta.iter().sum::<f64>()
    }

    /// Dual mass covering `(agent, item)`: `α_agent` when the item lies in
    /// the agent's final span, plus `β_item`.
    pub fn dual_coverage(&self, agent: usize, item: usize) -> f64 {
        let alpha = if self.spans[agent].binary_search(&item).is_ok() { self.alpha[agent] } else { 0.0 };
        alpha + self.beta[item]
    }
}

pub fn priority(weight: f64, seed: f64) -> f64 {
    weight * (1.0 - g(seed))
}

fn validate_seeds(inst: &OswmInstance, seeds: &[f64]) -> Result<()> {
    if seeds.len() != inst.agents.len() {
        return Err(Error::input(format!("expected {} seeds, got {}", inst.agents.len(), seeds.len())));
    }
    if let Some(i) = seeds.iter().position(|r| !(0.0..=1.0).contains(r)) {
        return Err(Error::input(format!("seed of agent {i} is outside [0, 1]")));
    }
    Ok(())
}

/// Agents by decreasing priority, ties to the lower id.
fn priority_order(inst: &OswmInstance, seeds: &[f64]) -> Vec<usize> {
    let p: Vec<f64> = inst.agents.iter().zip(seeds).map(|(a, &r)| priority(a.weight, r)).collect();
    let mut order: Vec<usize> = (0..inst.agents.len()).collect();
    order.sort_by(|&a, &b| p[b].total_cmp(&p[a]).then(a.cmp(&b)));
    order
}

/// Runs ranking, calling `observe(j, bundles)` after item `j` is placed.
pub fn ranking_run_observed(
    inst: &OswmInstance,
    seeds: &[f64],
    mut observe: impl FnMut(usize, &[ElementSet]),
) -> Result<RankingRun> {
    validate_seeds(inst, seeds)?;
    let order = priority_order(inst, seeds);
    let mut bundles = vec![ElementSet::empty(inst.items); inst.agents.len()];
    let mut sizes = vec![0usize; inst.agents.len()];
    let mut assignment = vec![None; inst.items];
    for (j, slot) in assignment.iter_mut().enumerate() {
        let taker = order.iter().copied().find(|&i| inst.rank(i, &bundles[i].with(j)) > sizes[i] as f64 + 0.5);
        if let Some(i) = taker {
            bundles[i].insert(j);
            sizes[i] += 1;
            *slot = Some(i);
        }
        observe(j, &bundles);
    }
    Ok(finish(inst, seeds, assignment))
}

pub fn ranking_run(inst: &OswmInstance, seeds: &[f64]) -> Result<RankingRun> {
    ranking_run_observed(inst, seeds, |_, _| {})
}

/// Agents in decreasing priority each sweep the items in arrival order and
/// claim every unclaimed item that raises their rank.
pub fn perusal_run(inst: &OswmInstance, seeds: &[f64]) -> Result<RankingRun> {
    validate_seeds(inst, seeds)?;
    let mut assignment = vec![None; inst.items];
    for i in priority_order(inst, seeds) {
        let mut bundle = ElementSet::empty(inst.items);
        let mut size = 0usize;
        for (j, slot) in assignment.iter_mut().enumerate() {
            if slot.is_none() && inst.rank(i, &bundle.with(j)) > size as f64 + 0.5 {
                bundle.insert(j);
                size += 1;
                *slot = Some(i);
            }
        }
    }
    Ok(finish(inst, seeds, assignment))
}

fn finish(inst: &OswmInstance, seeds: &[f64], assignment: Vec<Option<usize>>) -> RankingRun {
    let sets = inst.bundles(&assignment);
    let bundles: Vec<Vec<usize>> = sets.iter().map(|s| s.to_vec()).collect();
    let beta = assignment.iter().map(|a| a.map_or(0.0, |i| priority(inst.agents[i].weight, seeds[i]))).collect();
    let alpha = inst.agents.iter().zip(seeds).map(|(a, &r)| a.weight * g(r)).collect();
    let spans = sets.iter().enumerate().map(|(i, s)| inst.span(i, s)).collect();
    let welfare = bundles.iter().zip(&inst.agents).map(|(u, a)| a.weight * u.len() as f64).sum();
    RankingRun { seeds: seeds.to_vec(), assignment, bundles, welfare, beta, alpha, spans }
}

/// `sup { r ∈ [0,1] : item ∈ span(U_agent) when agent's seed is r }`, with
/// the other seeds fixed; 0 when no such `r` exists. The span shrinks as the
/// seed grows, so bisection applies.
pub fn critical_threshold(inst: &OswmInstance, seeds: &[f64], agent: usize, item: usize) -> Result<f64> {
    if agent >= inst.agents.len() || item >= inst.items {
        return Err(Error::input("agent or item out of range"));
    }
    let mut probe_seeds = seeds.to_vec();
    let mut spanned = |r: f64| -> Result<bool> {
        probe_seeds[agent] = r;
        let run = ranking_run(inst, &probe_seeds)?;
        Ok(run.spans[agent].binary_search(&item).is_ok())
    };
    if spanned(1.0)? {
        return Ok(1.0);
    }
    if !spanned(0.0)? {
        return Ok(0.0);
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    while hi - lo > THRESHOLD_RESOLUTION {
        let mid = 0.5 * (lo + hi);
        if spanned(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::submodular::{Graphic, Uniform};

    pub(crate) fn rank1_pair() -> OswmInstance {
        let agents = (0..2).map(|_| Agent { oracle: Arc::new(Uniform::new(2, 1.0).unwrap()), weight: 1.0 }).collect();
        OswmInstance::new(2, agents).unwrap()
    }

    #[test]
    fn single_agent_single_item() {
        let inst =
            OswmInstance::new(1, vec![Agent { oracle: Arc::new(Uniform::new(1, 1.0).unwrap()), weight: 1.0 }]).unwrap();
        let run = ranking_run(&inst, &[0.3]).unwrap();
        assert_eq!(run.assignment, vec![Some(0)]);
        assert_eq!(run.welfare, 1.0);
        assert!((run.beta[0] - (1.0 - g(0.3))).abs() < 1e-15);
        assert!((run.alpha[0] - g(0.3)).abs() < 1e-15);
        assert!((run.dual_objective() - run.welfare).abs() < 1e-12);
    }

    #[test]
    fn two_rank_one_agents() {
        let inst = rank1_pair();
        let run = ranking_run(&inst, &[0.1, 0.9]).unwrap();
        assert_eq!(run.assignment, vec![Some(0), Some(1)]);
        assert_eq!(run.welfare, 2.0);
        assert_eq!(perusal_run(&inst, &[0.1, 0.9]).unwrap(), run);
        let tied = ranking_run(&inst, &[0.5, 0.5]).unwrap();
        assert_eq!(tied.assignment, vec![Some(0), Some(1)]);
        assert_eq!(perusal_run(&inst, &[0.5, 0.5]).unwrap(), tied);
    }

    #[test]
    fn unavailable_item_stays_unassigned() {
        // Item 1 is a loop in the agent's graphic matroid.
        let f = Arc::new(Graphic::new(2, vec![(0, 1), (1, 1)]).unwrap());
        let inst = OswmInstance::new(2, vec![Agent { oracle: f, weight: 2.0 }]).unwrap();
        let run = ranking_run(&inst, &[0.0]).unwrap();
        assert_eq!(run.assignment, vec![Some(0), None]);
        assert_eq!(run.welfare, 2.0);
        assert_eq!(run.beta[1], 0.0);
    }

    #[test]
    fn non_matroid_rejected() {
        let f = Arc::new(Uniform::new(2, 1.5).unwrap());
        assert!(OswmInstance::new(2, vec![Agent { oracle: f, weight: 1.0 }]).is_err());
    }

    #[test]
    fn critical_thresholds() {
        let single =
            OswmInstance::new(1, vec![Agent { oracle: Arc::new(Uniform::new(1, 1.0).unwrap()), weight: 1.0 }]).unwrap();
        assert_eq!(critical_threshold(&single, &[0.5], 0, 0).unwrap(), 1.0);

        // Agent 0 outbids agent 1 at every seed of agent 1, so agent 1 never
        // holds or spans item 0.
        let inst = OswmInstance::new(
            1,
            vec![
                Agent { oracle: Arc::new(Uniform::new(1, 1.0).unwrap()), weight: 10.0 },
                Agent { oracle: Arc::new(Uniform::new(1, 1.0).unwrap()), weight: 1.0 },
            ],
        )
        .unwrap();
        assert_eq!(critical_threshold(&inst, &[0.5, 0.5], 1, 0).unwrap(), 0.0);

        // Two rank-1 agents, agent 0 at seed 0.4: agent 1 spans item 1 for
        // every seed (it gets item 0 or item 1), so the threshold is 1.
        let inst = rank1_pair();
        let r = critical_threshold(&inst, &[0.4, 0.0], 1, 1).unwrap();
        let grid = (0..=1000)
            .map(|k| k as f64 / 1000.0)
            .filter(|&r| ranking_run(&inst, &[0.4, r]).unwrap().spans[1].contains(&1))
            .fold(0.0, f64::max);
        assert!((r - grid).abs() <= 1e-3 + 1e-6, "{r} vs {grid}");
    }
}
