//! Minimum-budget covers over a laminar family.

use serde::{Deserialize, Serialize};

use super::{OracleKind, SetFunction};
use crate::error::{Error, Result};
use crate::set::ElementSet;

/// One member of a laminar family together with its budget.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LaminarSet {
    pub members: Vec<usize>,
    pub budget: f64,
}

/// A laminar family of budgeted element sets.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct LaminarBudgetSpec {
    pub sets: Vec<LaminarSet>,
}

impl LaminarBudgetSpec {
    /// Smallest ground set containing every member.
    pub fn implied_ground_size(&self) -> usize {
        self.sets.iter().flat_map(|s| s.members.iter()).max().map_or(0, |&m| m + 1)
    }
}

/// `f(S) = min { Σ_{T ∈ C} B_T : C ⊆ family covers S }`, evaluated by a
/// bottom-up pass over the laminar forest.
#[derive(Debug, Clone)]
pub struct LaminarBudget {
    n: usize,
    budgets: Vec<f64>,
    parent: Vec<Option<usize>>,
    /// Node indices with every child before its parent.
    order: Vec<usize>,
    /// Deepest family set containing each element.
    leaf_of: Vec<usize>,
    root_of: Vec<usize>,
    /// Symmetry class of each element.
    class: Vec<usize>,
}

impl LaminarBudget {
    pub fn new(n: usize, spec: &LaminarBudgetSpec) -> Result<Self> {
        let k = spec.sets.len();
        let mut sets: Vec<ElementSet> = Vec::with_capacity(k);
        for (i, s) in spec.sets.iter().enumerate() {
            if !(s.budget.is_finite() && s.budget >= 0.0) {
                return Err(Error::input(format!("laminar set {i} has an invalid budget")));
            }
            if let Some(&e) = s.members.iter().find(|&&e| e >= n) {
                return Err(Error::input(format!("laminar set {i} references element {e} >= {n}")));
            }
            if s.members.is_empty() {
                return Err(Error::input(format!("laminar set {i} is empty")));
            }
            sets.push(ElementSet::from_elements(n, s.members.iter().copied()));
        }
        for i in 0..k {
            for j in i + 1..k {
                let (a, b) = (&sets[i], &sets[j]);
                if !(a.is_disjoint(b) || a.is_subset(b) || b.is_subset(a)) {
                    return Err(Error::input(format!("laminar sets {i} and {j} cross")));
                }
            }
        }
        // Larger sets first; equal sets keep input order so duplicates chain.
        let mut by_size: Vec<usize> = (0..k).collect();
        by_size.sort_by_key(|&i| (std::cmp::Reverse(sets[i].len()), i));
        let mut parent = vec![None; k];
        for (pos, &i) in by_size.iter().enumerate() {
            parent[i] = by_size[..pos].iter().rev().copied().find(|&j| sets[i].is_subset(&sets[j]));
        }
        let order: Vec<usize> = by_size.iter().rev().copied().collect();

        let mut leaf_of = vec![usize::MAX; n];
        for &i in by_size.iter() {
            for e in sets[i].iter() {
                leaf_of[e] = i;
            }
        }
        if let Some(e) = leaf_of.iter().position(|&l| l == usize::MAX) {
            return Err(Error::input(format!("element {e} is covered by no laminar set")));
        }
        let mut root_of = vec![0; n];
        for e in 0..n {
            let mut r = leaf_of[e];
            while let Some(p) = parent[r] {
                r = p;
            }
            root_of[e] = r;
        }
        // Elements sharing a deepest set are symmetric, and so are elements
        // whose deepest sets are equal-budget singletons under one parent.
        let mut class_ids: std::collections::HashMap<(usize, u64, bool), usize> = Default::default();
        let class = (0..n)
            .map(|e| {
                let leaf = leaf_of[e];
                let key = if sets[leaf].len() == 1 {
                    (parent[leaf].unwrap_or(usize::MAX), spec.sets[leaf].budget.to_bits(), true)
                } else {
                    (leaf, 0, false)
                };
                let next = class_ids.len();
                *class_ids.entry(key).or_insert(next)
            })
            .collect();
        Ok(LaminarBudget {
            n,
            budgets: spec.sets.iter().map(|s| s.budget).collect(),
            parent,
            order,
            leaf_of,
            root_of,
            class,
        })
    }

    pub fn family_size(&self) -> usize {
        self.budgets.len()
    }
}

impl SetFunction for LaminarBudget {
    fn ground_size(&self) -> usize {
        self.n
    }

    fn eval(&self, set: &ElementSet) -> f64 {
        let k = self.budgets.len();
        let mut direct = vec![false; k];
        let mut touched = vec![false; k];
        for e in set.iter() {
            direct[self.leaf_of[e]] = true;
        }
        let mut child_sum = vec![0.0f64; k];
        let mut total = 0.0;
        for &node in &self.order {
            let cost = if direct[node] {
                self.budgets[node]
            } else if touched[node] {
                child_sum[node].min(self.budgets[node])
            } else {
                continue;
            };
            match self.parent[node] {
                Some(p) => {
                    touched[p] = true;
                    child_sum[p] += cost;
                }
                None => total += cost,
            }
        }
        total
    }

    fn kind(&self) -> OracleKind {
        OracleKind::LaminarBudget
    }

    fn components(&self) -> Vec<Vec<usize>> {
        let mut by_root: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
        for e in 0..self.n {
            by_root.entry(self.root_of[e]).or_default().push(e);
        }
        let mut comps: Vec<Vec<usize>> = by_root.into_values().collect();
        comps.sort_by_key(|c| c[0]);
        comps
    }

    fn interchangeable(&self, a: usize, b: usize) -> bool {
        self.class[a] == self.class[b]
    }

    /// Tree recursion: each node is either bought, after which every
    /// positive-weight domain element below it comes for free, or skipped,
    /// which is only allowed when no contracted element sits directly in it.
    fn min_shifted(&self, scale: f64, weights: &[f64], contracted: &ElementSet, domain: &[usize]) -> Option<f64> {
        let k = self.budgets.len();
        let mut gain = vec![0.0; k];
        let mut pinned = vec![false; k];
        for &e in domain {
            if weights[e] > 0.0 {
                gain[self.leaf_of[e]] += weights[e];
            }
        }
        for e in contracted.iter() {
            pinned[self.leaf_of[e]] = true;
        }
        let mut skip = vec![0.0f64; k];
        let mut total = 0.0;
        for &node in &self.order {
            let bought = scale * self.budgets[node] - gain[node];
            let best = if pinned[node] { bought } else { bought.min(skip[node]) };
            match self.parent[node] {
                Some(p) => {
                    gain[p] += gain[node];
                    skip[p] += best;
                }
                None => total += best,
            }
        }
        Some(total - scale * self.eval(contracted))
    }
}

/// Minimum-budget cover cost of `set` under `spec`. The ground set is taken
/// to be the elements mentioned by the family; an element of `set` outside
/// every family set is an input error.
pub fn laminar_budget_eval(spec: &LaminarBudgetSpec, set: &[usize]) -> Result<f64> {
    let n = spec.implied_ground_size().max(set.iter().map(|&e| e + 1).max().unwrap_or(0));
    let covered: Vec<bool> = {
        let mut c = vec![false; n];
        for s in &spec.sets {
            for &e in &s.members {
                c[e] = true;
            }
        }
        c
    };
    if let Some(&e) = set.iter().find(|&&e| !covered[e]) {
        return Err(Error::input(format!("element {e} is covered by no laminar set")));
    }
    // Uncovered elements outside `set` do not matter; give them a private
    // zero-budget set so the oracle can be built.
    let mut padded = spec.clone();
    for (e, _) in covered.iter().enumerate().filter(|(_, c)| !**c) {
        padded.sets.push(LaminarSet { members: vec![e], budget: 0.0 });
    }
    let oracle = LaminarBudget::new(n, &padded)?;
    Ok(oracle.eval(&ElementSet::from_elements(n, set.iter().copied())))
}
