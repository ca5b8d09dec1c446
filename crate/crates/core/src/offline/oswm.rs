//! Exact offline welfare optimum by depth-first branch and bound.

use crate::error::{Error, Result};
use crate::ranking::OswmInstance;
use crate::set::ElementSet;

/// Search nodes allowed before giving up.
pub const OSWM_NODE_BUDGET: u64 = 50_000_000;

struct Search<'a> {
    inst: &'a OswmInstance,
    /// Agents by decreasing weight.
    order: Vec<usize>,
    /// `Σ_{j' ≥ j} max { a_i : j' is not a loop for i }`.
    item_bound: Vec<f64>,
    bundles: Vec<ElementSet>,
    sizes: Vec<usize>,
    current: Vec<Option<usize>>,
    welfare: f64,
    best: (f64, Vec<Option<usize>>),
    nodes: u64,
}

impl Search<'_> {
    fn agent_bound(&self, j: usize) -> f64 {
        let m = self.inst.items;
        (0..self.inst.agents.len())
            .map(|i| {
                let mut rest = self.bundles[i].clone();
                (j..m).for_each(|k| rest.insert(k));
                self.inst.agents[i].weight * (self.inst.rank(i, &rest) - self.sizes[i] as f64)
            })
            .sum()
    }

    fn dfs(&mut self, j: usize) -> Result<()> {
        self.nodes += 1;
        if self.nodes > OSWM_NODE_BUDGET {
            return Err(Error::capability(
                "exact welfare search exceeded its node budget; use the fractional LP optimum as an upper bound",
            ));
        }
        if j == self.inst.items {
            if self.welfare > self.best.0 + 1e-12 {
                self.best = (self.welfare, self.current.clone());
            }
            return Ok(());
        }
        if self.welfare + self.item_bound[j] <= self.best.0 + 1e-12 {
            return Ok(());
        }
        if self.welfare + self.agent_bound(j) <= self.best.0 + 1e-12 {
            return Ok(());
        }
        for k in 0..self.order.len() {
            let i = self.order[k];
            if self.inst.rank(i, &self.bundles[i].with(j)) <= self.sizes[i] as f64 + 0.5 {
                continue;
            }
            let a = self.inst.agents[i].weight;
            self.bundles[i].insert(j);
            self.sizes[i] += 1;
            self.current[j] = Some(i);
            self.welfare += a;
            self.dfs(j + 1)?;
            self.welfare -= a;
            self.current[j] = None;
            self.sizes[i] -= 1;
            self.bundles[i].remove(j);
        }
        self.dfs(j + 1)
    }
}

/// Welfare-maximizing assignment of items to agents (ties: the first found
/// in agent-by-weight order).
pub fn oswm_opt(inst: &OswmInstance) -> Result<(Vec<Option<usize>>, f64)> {
    let m = inst.items;
    let n = inst.agents.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| inst.agents[b].weight.total_cmp(&inst.agents[a].weight).then(a.cmp(&b)));
    let mut item_bound = vec![0.0; m + 1];
    for j in (0..m).rev() {
        let single = ElementSet::from_elements(m, [j]);
        let best = (0..n).filter(|&i| inst.rank(i, &single) > 0.5).map(|i| inst.agents[i].weight).fold(0.0, f64::max);
        item_bound[j] = item_bound[j + 1] + best;
    }
    let mut search = Search {
        inst,
        order,
        item_bound,
        bundles: vec![ElementSet::empty(m); n],
        sizes: vec![0; n],
        current: vec![None; m],
        welfare: 0.0,
        best: (0.0, vec![None; m]),
        nodes: 0,
    };
    search.dfs(0)?;
    let (_, assignment) = search.best;
    let welfare = inst.welfare(&assignment);
    Ok((assignment, welfare))
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::ranking::{ranking_run, Agent};
    use crate::submodular::{Graphic, Uniform};

    /// Every item → agent-or-none map.
    fn enumerate(inst: &OswmInstance) -> f64 {
        let n = inst.agents.len() as u64 + 1;
        let m = inst.items as u32;
        (0..n.pow(m))
            .map(|code| {
                let assignment: Vec<Option<usize>> = (0..m)
                    .map(|j| {
                        let d = (code / n.pow(j)) % n;
                        (d > 0).then(|| d as usize - 1)
                    })
                    .collect();
                let bundles = inst.bundles(&assignment);
                // Dependent bundles count at rank, which never beats an
                // independent subset, so plain rank welfare is the optimum.
                bundles.iter().enumerate().map(|(i, u)| inst.agents[i].weight * inst.rank(i, u)).sum::<f64>()
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn single_agent_gets_full_rank() {
        let f = Arc::new(Graphic::new(3, vec![(0, 1), (1, 2), (0, 2)]).unwrap());
        let inst = OswmInstance::new(3, vec![Agent { oracle: f, weight: 1.5 }]).unwrap();
        assert_eq!(oswm_opt(&inst).unwrap().1, 3.0);
    }

    #[test]
    fn two_rank_one_agents() {
        let agents = (0..2).map(|_| Agent { oracle: Arc::new(Uniform::new(2, 1.0).unwrap()), weight: 1.0 }).collect();
        let inst = OswmInstance::new(2, agents).unwrap();
        assert_eq!(oswm_opt(&inst).unwrap().1, 2.0);
        assert_eq!(enumerate(&inst), 2.0);
    }

    #[test]
    fn matches_enumeration_and_dominates_ranking() {
        let mut rng = crate::random::rng(11);
        for _ in 0..20 {
            let inst = crate::random::random_oswm(&mut rng, 3, 5);
            let (assignment, opt) = oswm_opt(&inst).unwrap();
            assert!((opt - enumerate(&inst)).abs() < 1e-9);
            assert!((inst.welfare(&assignment) - opt).abs() < 1e-12);
            for t in 0..5 {
                let seeds = crate::ranking::trial_seeds(inst.agents.len(), 3, t);
                assert!(ranking_run(&inst, &seeds).unwrap().welfare <= opt + 1e-9);
            }
        }
    }
}
