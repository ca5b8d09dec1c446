//! Offline fractional optimum of a submodular assignment instance.

use std::collections::BTreeSet;

use serde::Serialize;

use super::simplex::maximize;
use crate::error::{Error, Result};
use crate::set::ElementSet;
use crate::solvers::SapInstance;
use crate::submodular::component_index;
use crate::submodular::sfm::{sfm_min, Backend, ShiftedProblem};

/// Largest ground set for which every subset constraint is materialized.
pub const LP_EXHAUSTIVE_MAX_N: usize = 16;
/// [`LpBackend::Auto`] enumerates subsets up to this size.
pub const LP_AUTO_EXHAUSTIVE_MAX_N: usize = 12;
/// Separation stops once every set has slack at least `−SEPARATION_SLACK`.
pub const SEPARATION_SLACK: f64 = 1e-8;
const MAX_ROUNDS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LpBackend {
    #[default]
    Auto,
    Exhaustive,
    CuttingPlane,
}

impl std::fmt::Display for LpBackend {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            LpBackend::Auto => "auto",
            LpBackend::Exhaustive => "exhaustive",
            LpBackend::CuttingPlane => "cutting-plane",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Constraint {
    Part(usize),
    Subset(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ActiveConstraint {
    pub constraint: Constraint,
    pub multiplier: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    /// Constraints with positive multiplier.
    pub active: Vec<ActiveConstraint>,
    pub backend: LpBackend,
    /// `min_S f(S) − b·x(S)` at termination; 0 for the exhaustive backend
    /// up to rounding.
    pub separation_slack: f64,
    pub rows: usize,
}

pub fn lp_opt_fractional(inst: &SapInstance) -> Result<LpSolution> {
    lp_opt_fractional_with(inst, LpBackend::Auto)
}

pub fn lp_opt_fractional_with(inst: &SapInstance, backend: LpBackend) -> Result<LpSolution> {
    let n = inst.len();
    match backend {
        LpBackend::Auto if n <= LP_AUTO_EXHAUSTIVE_MAX_N => exhaustive(inst),
        LpBackend::Auto | LpBackend::CuttingPlane => cutting_plane(inst),
        LpBackend::Exhaustive if n <= LP_EXHAUSTIVE_MAX_N => exhaustive(inst),
        LpBackend::Exhaustive => Err(Error::capability(format!(
            "exhaustive LP needs at most {LP_EXHAUSTIVE_MAX_N} elements, got {n}; use the cutting-plane backend"
        ))),
    }
}

struct Rows {
    constraints: Vec<Constraint>,
    coeffs: Vec<Vec<f64>>,
    rhs: Vec<f64>,
}

impl Rows {
    fn with_parts(inst: &SapInstance) -> Self {
        let n = inst.len();
        let mut rows = Rows { constraints: Vec::new(), coeffs: Vec::new(), rhs: Vec::new() };
        for (j, q) in inst.parts.iter().enumerate() {
            let mut row = vec![0.0; n];
            for &e in q {
                row[e] = 1.0;
            }
            rows.push(Constraint::Part(j), row, 1.0);
        }
        rows
    }

    fn push(&mut self, c: Constraint, row: Vec<f64>, rhs: f64) {
        self.constraints.push(c);
        self.coeffs.push(row);
        self.rhs.push(rhs);
    }

    fn push_subset(&mut self, inst: &SapInstance, set: Vec<usize>) {
        let n = inst.len();
        let mut row = vec![0.0; n];
        for &e in &set {
            row[e] = inst.costs[e];
        }
        let rhs = inst.oracle.eval(&ElementSet::from_elements(n, set.iter().copied())).max(0.0);
        self.push(Constraint::Subset(set), row, rhs);
    }

    fn solve(&self, inst: &SapInstance, backend: LpBackend, separation_slack: f64) -> Result<LpSolution> {
        let sol = maximize(&inst.values, &self.coeffs, &self.rhs)?;
        let active = self
            .constraints
            .iter()
            .zip(&sol.duals)
            .filter(|(_, &y)| y > 0.0)
            .map(|(c, &y)| ActiveConstraint { constraint: c.clone(), multiplier: y })
            .collect();
        Ok(LpSolution { x: sol.x, objective: sol.objective, active, backend, separation_slack, rows: self.rhs.len() })
    }
}

fn exhaustive(inst: &SapInstance) -> Result<LpSolution> {
    let n = inst.len();
    let mut rows = Rows::with_parts(inst);
    for mask in 1..(1u64 << n) {
        rows.push_subset(inst, ElementSet::from_mask(n, mask).to_vec());
    }
    let mut sol = rows.solve(inst, LpBackend::Exhaustive, 0.0)?;
    sol.separation_slack = min_slack(inst, &sol.x)?.0.min(0.0);
    Ok(sol)
}

/// Most violated set per component of `f`, with the overall minimum slack.
fn min_slack(inst: &SapInstance, x: &[f64]) -> Result<(f64, Vec<Vec<usize>>)> {
    let f = inst.oracle.as_ref();
    let n = inst.len();
    let load = inst.load(x);
    let empty = ElementSet::empty(n);
    let (comps, _) = component_index(f);
    let mut worst = 0.0f64;
    let mut cuts = Vec::new();
    for comp in &comps {
        let sol = sfm_min(&ShiftedProblem::new(f, 1.0, &load, &empty, comp), Backend::Auto)?;
        worst = worst.min(sol.value);
        if sol.value < -SEPARATION_SLACK {
            cuts.push(sol.minimal.clone());
            if sol.maximal != sol.minimal {
                cuts.push(sol.maximal);
            }
        }
    }
    Ok((worst, cuts))
}

fn cutting_plane(inst: &SapInstance) -> Result<LpSolution> {
    let mut rows = Rows::with_parts(inst);
    let mut seen = BTreeSet::new();
    for e in 0..inst.len() {
        seen.insert(vec![e]);
        rows.push_subset(inst, vec![e]);
    }
    for _ in 0..MAX_ROUNDS {
        let sol = rows.solve(inst, LpBackend::CuttingPlane, 0.0)?;
        let (worst, cuts) = min_slack(inst, &sol.x)?;
        let fresh: Vec<Vec<usize>> = cuts.into_iter().filter(|c| !c.is_empty() && seen.insert(c.clone())).collect();
        if fresh.is_empty() {
            return Ok(LpSolution { separation_slack: worst, ..sol });
        }
        for c in fresh {
            rows.push_subset(inst, c);
        }
    }
    Err(Error::invariant("cutting plane did not converge"))
}
