//! Monotone submodular set functions: oracle families, the Lovász extension,
//! property verification and submodular minimization.

mod laminar;
mod lovasz;
mod oracles;
pub mod sfm;
mod spec;
mod verify;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::set::ElementSet;

pub use laminar::{laminar_budget_eval, LaminarBudget, LaminarBudgetSpec, LaminarSet};
pub use lovasz::eval_lovasz;
pub use oracles::{
    Contraction, Coverage, DirectSum, ExactTable, Graphic, Partition, Restriction, Scaled, Table, Transversal, Uniform,
};
pub use spec::{build_oracle, OracleSpec, SumBlock};
pub use verify::{verify_submodular, SubmodularReport, VerifyMode, Violation};

/// Shared handle to an oracle.
pub type DynOracle = Arc<dyn SetFunction>;

/// Family tag of an oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OracleKind {
    Uniform,
    Partition,
    Graphic,
    Transversal,
    LaminarBudget,
    Coverage,
    Scaled,
    DirectSum,
    Contraction,
    Restriction,
    ExplicitTable,
}

impl fmt::Display for OracleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            OracleKind::Uniform => "uniform",
            OracleKind::Partition => "partition",
            OracleKind::Graphic => "graphic",
            OracleKind::Transversal => "transversal",
            OracleKind::LaminarBudget => "laminar-budget",
            OracleKind::Coverage => "coverage",
            OracleKind::Scaled => "scaled",
            OracleKind::DirectSum => "direct-sum",
            OracleKind::Contraction => "contraction",
            OracleKind::Restriction => "restriction",
            OracleKind::ExplicitTable => "explicit-table",
        };
        f.write_str(s)
    }
}

/// Evaluation oracle for a set function on the ground set `0..ground_size()`.
///
/// Implementations are expected to be normalized (`eval(∅) = 0`), monotone
/// and submodular; [`verify_submodular`] checks this. Oracles are immutable
/// once built and may be shared across threads.
pub trait SetFunction: Send + Sync {
    fn ground_size(&self) -> usize;

    fn eval(&self, set: &ElementSet) -> f64;

    fn kind(&self) -> OracleKind;

    /// Blocks `B_1, …, B_k` partitioning the ground set with
    /// `f(S) = Σ_i f(S ∩ B_i)`. The default is the trivial single block.
    fn components(&self) -> Vec<Vec<usize>> {
        vec![(0..self.ground_size()).collect()]
    }

    /// True when swapping `a` and `b` is a symmetry of `f`. Must be an
    /// equivalence relation; the default reports only the identity.
    fn interchangeable(&self, a: usize, b: usize) -> bool {
        a == b
    }

    /// When `S ↦ f(S ∪ T) − f(T)` restricted to subsets of `domain` depends
    /// only on `|S|`, returns that profile indexed by `|S| = 0..=domain.len()`.
    /// `domain` must be disjoint from `contracted`.
    fn cardinality_profile(&self, domain: &[usize], contracted: &ElementSet) -> Option<Vec<f64>> {
        let (&first, rest) = match domain.split_first() {
            Some(split) => split,
            None => return Some(vec![0.0]),
        };
        if !rest.iter().all(|&d| self.interchangeable(first, d)) {
            return None;
        }
        let mut s = contracted.clone();
        let base = self.eval(&s);
        let mut profile = Vec::with_capacity(domain.len() + 1);
        profile.push(0.0);
        for &d in domain {
            s.insert(d);
            profile.push(self.eval(&s) - base);
        }
        Some(profile)
    }

    /// Exact minimum of `scale · (f(S ∪ T) − f(T)) − weights(S)` over
    /// `S ⊆ domain`, for families with a direct combinatorial minimizer.
    /// `weights` is indexed by element id; `domain` is disjoint from `T`.
    fn min_shifted(&self, _scale: f64, _weights: &[f64], _contracted: &ElementSet, _domain: &[usize]) -> Option<f64> {
        None
    }

    /// Marginal value `f(T + e) − f(T)`.
    fn marginal(&self, contracted: &ElementSet, e: usize) -> f64 {
        if contracted.contains(e) {
            return 0.0;
        }
        self.eval(&contracted.with(e)) - self.eval(contracted)
    }
}

/// Dense element ids `0..n` with optional labels for reporting.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct GroundSet {
    n: usize,
    labels: BTreeMap<usize, String>,
}

impl GroundSet {
    pub fn new(n: usize) -> Self {
        GroundSet { n, labels: BTreeMap::new() }
    }

    pub fn with_labels(n: usize, labels: BTreeMap<usize, String>) -> Self {
        GroundSet { n, labels }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn label(&self, e: usize) -> String {
        self.labels.get(&e).cloned().unwrap_or_else(|| e.to_string())
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.n
    }

    pub fn empty_set(&self) -> ElementSet {
        ElementSet::empty(self.n)
    }

    pub fn full_set(&self) -> ElementSet {
        ElementSet::full(self.n)
    }
}

/// Index of the component containing each element.
pub fn component_index(f: &dyn SetFunction) -> (Vec<Vec<usize>>, Vec<usize>) {
    let comps = f.components();
    let mut index = vec![usize::MAX; f.ground_size()];
    for (ci, c) in comps.iter().enumerate() {
        for &e in c {
            index[e] = ci;
        }
    }
    (comps, index)
}

/// Elements whose singleton value is not positive.
pub fn dead_elements(f: &dyn SetFunction) -> Vec<usize> {
    let n = f.ground_size();
    let empty = ElementSet::empty(n);
    (0..n).filter(|&e| f.marginal(&empty, e) <= 0.0).collect()
}

/// Groups elements into connected blocks given an edge relation, via union-find.
pub(crate) fn blocks_from_links(n: usize, links: impl IntoIterator<Item = (usize, usize)>) -> Vec<Vec<usize>> {
    let mut uf = UnionFind::new(n);
    for (a, b) in links {
        uf.union(a, b);
    }
    let mut by_root: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for e in 0..n {
        by_root.entry(uf.find(e)).or_default().push(e);
    }
    let mut blocks: Vec<Vec<usize>> = by_root.into_values().collect();
    blocks.sort_by_key(|b| b[0]);
    blocks
}

/// Plain union-find with path halving and union by size.
#[derive(Debug, Clone)]
pub(crate) struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect(), size: vec![1; n] }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns true when `a` and `b` were in different classes.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        true
    }
}
