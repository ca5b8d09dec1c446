//! Concrete oracle families.

use std::collections::{BTreeMap, HashMap};

use num_rational::Ratio;
use parking_lot::Mutex;

use super::{blocks_from_links, DynOracle, OracleKind, SetFunction, UnionFind};
use crate::error::{Error, Result};
use crate::set::ElementSet;

/// Rank function of the uniform matroid, `min(|S|, rank)`. A rank of at
/// least `n` gives the modular cardinality function `|S|`.
#[derive(Debug, Clone)]
pub struct Uniform {
    n: usize,
    rank: f64,
}

impl Uniform {
    pub fn new(n: usize, rank: f64) -> Result<Self> {
        if !(rank.is_finite() && rank >= 0.0) {
            return Err(Error::input("uniform rank must be a nonnegative finite number"));
        }
        Ok(Uniform { n, rank })
    }
}

impl SetFunction for Uniform {
    fn ground_size(&self) -> usize {
        self.n
    }

    fn eval(&self, set: &ElementSet) -> f64 {
        (set.len() as f64).min(self.rank)
    }

    fn kind(&self) -> OracleKind {
        OracleKind::Uniform
    }

    fn interchangeable(&self, _a: usize, _b: usize) -> bool {
        true
    }
}

/// Partition matroid rank (or budgeted variant with real capacities):
/// `Σ_j min(|S ∩ P_j|, c_j)`.
#[derive(Debug, Clone)]
pub struct Partition {
    n: usize,
    parts: Vec<Vec<usize>>,
    capacities: Vec<f64>,
    part_of: Vec<usize>,
}

impl Partition {
    pub fn new(n: usize, parts: Vec<Vec<usize>>, capacities: Vec<f64>) -> Result<Self> {
        if parts.len() != capacities.len() {
            return Err(Error::input("partition: parts and capacities differ in length"));
        }
        let mut part_of = vec![usize::MAX; n];
        for (j, part) in parts.iter().enumerate() {
            for &e in part {
                if e >= n {
                    return Err(Error::input(format!("partition: element {e} out of range")));
                }
                if part_of[e] != usize::MAX {
                    return Err(Error::input(format!("partition: element {e} in two parts")));
                }
                part_of[e] = j;
            }
        }
        if let Some(e) = part_of.iter().position(|&p| p == usize::MAX) {
            return Err(Error::input(format!("partition: element {e} is in no part")));
        }
        if capacities.iter().any(|c| !(c.is_finite() && *c >= 0.0)) {
            return Err(Error::input("partition: capacities must be nonnegative"));
        }
        Ok(Partition { n, parts, capacities, part_of })
    }

    pub fn parts(&self) -> &[Vec<usize>] {
        &self.parts
    }
}

impl SetFunction for Partition {
    fn ground_size(&self) -> usize {
        self.n
    }

    fn eval(&self, set: &ElementSet) -> f64 {
        let mut counts = vec![0usize; self.parts.len()];
        for e in set.iter() {
            counts[self.part_of[e]] += 1;
        }
        counts.into_iter().zip(&self.capacities).filter(|(c, _)| *c > 0).map(|(c, cap)| (c as f64).min(*cap)).sum()
    }

    fn kind(&self) -> OracleKind {
        OracleKind::Partition
    }

    fn cardinality_profile(&self, domain: &[usize], contracted: &ElementSet) -> Option<Vec<f64>> {
        let Some(&first) = domain.first() else {
            return Some(vec![0.0]);
        };
        let part = self.part_of[first];
        if domain.iter().any(|&d| self.part_of[d] != part) {
            return None;
        }
        let cap = self.capacities[part];
        let base = contracted.iter().filter(|&e| self.part_of[e] == part).count() as f64;
        Some((0..=domain.len()).map(|k| (base + k as f64).min(cap) - base.min(cap)).collect())
    }

    fn components(&self) -> Vec<Vec<usize>> {
        let mut comps: Vec<Vec<usize>> = self.parts.iter().filter(|p| !p.is_empty()).cloned().collect();
        for c in comps.iter_mut() {
            c.sort_unstable();
        }
        comps.sort_by_key(|c| c[0]);
        comps
    }

    fn interchangeable(&self, a: usize, b: usize) -> bool {
        self.part_of[a] == self.part_of[b]
    }
}

const GRAPHIC_MEMO_LIMIT: usize = 1 << 16;

/// Graphic matroid rank: the size of a spanning forest of the chosen edges.
#[derive(Debug)]
pub struct Graphic {
    vertices: usize,
    edges: Vec<(usize, usize)>,
    memo: Mutex<HashMap<ElementSet, f64>>,
}

impl Graphic {
    pub fn new(vertices: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        if let Some(&(u, v)) = edges.iter().find(|&&(u, v)| u >= vertices || v >= vertices) {
            return Err(Error::input(format!("graphic: edge ({u},{v}) references a missing vertex")));
        }
        Ok(Graphic { vertices, edges, memo: Mutex::new(HashMap::new()) })
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    fn rank_uncached(&self, set: &ElementSet) -> f64 {
        let mut uf = UnionFind::new(self.vertices);
        set.iter()
            .filter(|&e| {
                let (u, v) = self.edges[e];
                uf.union(u, v)
            })
            .count() as f64
    }
}

impl Clone for Graphic {
    fn clone(&self) -> Self {
        Graphic { vertices: self.vertices, edges: self.edges.clone(), memo: Mutex::new(HashMap::new()) }
    }
}

impl SetFunction for Graphic {
    fn ground_size(&self) -> usize {
        self.edges.len()
    }

    fn eval(&self, set: &ElementSet) -> f64 {
        if let Some(&v) = self.memo.lock().get(set) {
            return v;
        }
        let r = self.rank_uncached(set);
        let mut memo = self.memo.lock();
        if memo.len() >= GRAPHIC_MEMO_LIMIT {
            memo.clear();
        }
        memo.insert(set.clone(), r);
        r
    }

    fn kind(&self) -> OracleKind {
        OracleKind::Graphic
    }

    fn components(&self) -> Vec<Vec<usize>> {
        let m = self.edges.len();
        let mut first_edge_at: Vec<Option<usize>> = vec![None; self.vertices];
        let mut links = Vec::new();
        for (i, &(u, v)) in self.edges.iter().enumerate() {
            for w in [u, v] {
                match first_edge_at[w] {
                    Some(j) => links.push((i, j)),
                    None => first_edge_at[w] = Some(i),
                }
            }
        }
        blocks_from_links(m, links)
    }

    fn interchangeable(&self, a: usize, b: usize) -> bool {
        let norm = |(u, v): (usize, usize)| if u <= v { (u, v) } else { (v, u) };
        a == b || norm(self.edges[a]) == norm(self.edges[b])
    }
}

/// Transversal matroid rank: maximum matching of the chosen left vertices
/// into the right vertices they are adjacent to.
#[derive(Debug, Clone)]
pub struct Transversal {
    right: usize,
    adjacency: Vec<Vec<usize>>,
}

impl Transversal {
    pub fn new(right: usize, adjacency: Vec<Vec<usize>>) -> Result<Self> {
        for (e, adj) in adjacency.iter().enumerate() {
            if let Some(&r) = adj.iter().find(|&&r| r >= right) {
                return Err(Error::input(format!("transversal: element {e} adjacent to missing vertex {r}")));
            }
        }
        let adjacency = adjacency
            .into_iter()
            .map(|mut a| {
                a.sort_unstable();
                a.dedup();
                a
            })
            .collect();
        Ok(Transversal { right, adjacency })
    }

    fn augment(&self, e: usize, owner: &mut [Option<usize>], seen: &mut [bool]) -> bool {
        for &r in &self.adjacency[e] {
            if seen[r] {
                continue;
            }
            seen[r] = true;
            let free = match owner[r] {
                None => true,
                Some(other) => self.augment(other, owner, seen),
            };
            if free {
                owner[r] = Some(e);
                return true;
            }
        }
        false
    }
}

impl SetFunction for Transversal {
    fn ground_size(&self) -> usize {
        self.adjacency.len()
    }

    fn eval(&self, set: &ElementSet) -> f64 {
        let mut owner = vec![None; self.right];
        let mut seen = vec![false; self.right];
        let mut size = 0usize;
        for e in set.iter() {
            seen.fill(false);
            if self.augment(e, &mut owner, &mut seen) {
                size += 1;
            }
        }
        size as f64
    }

    fn kind(&self) -> OracleKind {
        OracleKind::Transversal
    }

    fn components(&self) -> Vec<Vec<usize>> {
        let mut first: Vec<Option<usize>> = vec![None; self.right];
        let mut links = Vec::new();
        for (e, adj) in self.adjacency.iter().enumerate() {
            for &r in adj {
                match first[r] {
                    Some(o) => links.push((e, o)),
                    None => first[r] = Some(e),
                }
            }
        }
        blocks_from_links(self.adjacency.len(), links)
    }

    fn interchangeable(&self, a: usize, b: usize) -> bool {
        self.adjacency[a] == self.adjacency[b]
    }
}

/// Weighted coverage: `f(S)` is the total weight of universe items covered by `S`.
#[derive(Debug, Clone)]
pub struct Coverage {
    weights: Vec<f64>,
    covers: Vec<Vec<usize>>,
}

impl Coverage {
    pub fn new(weights: Vec<f64>, covers: Vec<Vec<usize>>) -> Result<Self> {
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::input("coverage: weights must be nonnegative"));
        }
        let covers: Vec<Vec<usize>> = covers
            .into_iter()
            .map(|mut c| {
                c.sort_unstable();
                c.dedup();
                c
            })
            .collect();
        for (e, c) in covers.iter().enumerate() {
            if let Some(&u) = c.iter().find(|&&u| u >= weights.len()) {
                return Err(Error::input(format!("coverage: element {e} covers missing item {u}")));
            }
        }
        Ok(Coverage { weights, covers })
    }
}

impl SetFunction for Coverage {
    fn ground_size(&self) -> usize {
        self.covers.len()
    }

    fn eval(&self, set: &ElementSet) -> f64 {
        let mut hit = vec![false; self.weights.len()];
        let mut total = 0.0;
        for e in set.iter() {
            for &u in &self.covers[e] {
                if !hit[u] {
                    hit[u] = true;
                    total += self.weights[u];
                }
            }
        }
        total
    }

    fn kind(&self) -> OracleKind {
        OracleKind::Coverage
    }

    fn components(&self) -> Vec<Vec<usize>> {
        let mut first: Vec<Option<usize>> = vec![None; self.weights.len()];
        let mut links = Vec::new();
        for (e, c) in self.covers.iter().enumerate() {
            for &u in c {
                match first[u] {
                    Some(o) => links.push((e, o)),
                    None => first[u] = Some(e),
                }
            }
        }
        blocks_from_links(self.covers.len(), links)
    }

    fn interchangeable(&self, a: usize, b: usize) -> bool {
        self.covers[a] == self.covers[b]
    }
}

/// Largest ground set an explicit table may describe.
pub const TABLE_MAX_N: usize = 20;

/// Explicit value table indexed by subset bitmask.
#[derive(Debug, Clone)]
pub struct Table {
    n: usize,
    values: Vec<f64>,
}

impl Table {
    pub fn new(n: usize, values: Vec<f64>) -> Result<Self> {
        if n > TABLE_MAX_N {
            return Err(Error::capability(format!("explicit table limited to n <= {TABLE_MAX_N}")));
        }
        if values.len() != 1usize << n {
            return Err(Error::input(format!("table needs {} values, got {}", 1usize << n, values.len())));
        }
        Ok(Table { n, values })
    }

    /// Tabulates another oracle (n ≤ 20).
    pub fn tabulate(f: &dyn SetFunction) -> Result<Self> {
        let n = f.ground_size();
        if n > TABLE_MAX_N {
            return Err(Error::capability(format!("explicit table limited to n <= {TABLE_MAX_N}")));
        }
        let values = (0..1u64 << n).map(|m| f.eval(&ElementSet::from_mask(n, m))).collect();
        Ok(Table { n, values })
    }

    /// Parses `"0,1" -> value` keys; the empty set may be keyed by `""` and
    /// defaults to 0. Every other subset must be present.
    pub fn from_keyed(n: usize, keyed: &BTreeMap<String, f64>) -> Result<Self> {
        if n > TABLE_MAX_N {
            return Err(Error::capability(format!("explicit table limited to n <= {TABLE_MAX_N}")));
        }
        let mut values = vec![f64::NAN; 1usize << n];
        values[0] = 0.0;
        for (key, &v) in keyed {
            let mut mask = 0usize;
            for tok in key.split(',').map(str::trim).filter(|t| !t.is_empty()) {
                let e: usize =
                    tok.parse().map_err(|_| Error::input(format!("table key {key:?} is not a list of ids")))?;
                if e >= n {
                    return Err(Error::input(format!("table key {key:?} references element {e} >= {n}")));
                }
                mask |= 1 << e;
            }
            values[mask] = v;
        }
        if let Some(m) = values.iter().position(|v| v.is_nan()) {
            let key: Vec<String> = ElementSet::from_mask(n, m as u64).iter().map(|e| e.to_string()).collect();
            return Err(Error::input(format!("table is missing subset {{{}}}", key.join(","))));
        }
        Ok(Table { n, values })
    }

    pub fn to_keyed(&self) -> BTreeMap<String, f64> {
        (1..self.values.len())
            .map(|m| {
                let key: Vec<String> = ElementSet::from_mask(self.n, m as u64).iter().map(|e| e.to_string()).collect();
                (key.join(","), self.values[m])
            })
            .collect()
    }

    pub fn value_by_mask(&self, mask: usize) -> f64 {
        self.values[mask]
    }
}

impl SetFunction for Table {
    fn ground_size(&self) -> usize {
        self.n
    }

    fn eval(&self, set: &ElementSet) -> f64 {
        self.values[set.to_mask() as usize]
    }

    fn kind(&self) -> OracleKind {
        OracleKind::ExplicitTable
    }
}

/// Exact rational value table for cross-checking floating-point oracles on
/// tiny ground sets (n ≤ 10).
#[derive(Debug, Clone)]
pub struct ExactTable {
    n: usize,
    values: Vec<Ratio<i64>>,
}

/// Ground-set limit for [`ExactTable`].
pub const EXACT_TABLE_MAX_N: usize = 10;

impl ExactTable {
    pub fn new(n: usize, values: Vec<Ratio<i64>>) -> Result<Self> {
        if n > EXACT_TABLE_MAX_N {
            return Err(Error::capability(format!("exact table limited to n <= {EXACT_TABLE_MAX_N}")));
        }
        if values.len() != 1usize << n {
            return Err(Error::input("exact table has the wrong number of entries"));
        }
        Ok(ExactTable { n, values })
    }

    /// Tabulates an oracle, approximating each value by a rational with the
    /// given denominator.
    pub fn tabulate(f: &dyn SetFunction, denominator: i64) -> Result<Self> {
        let n = f.ground_size();
        if n > EXACT_TABLE_MAX_N {
            return Err(Error::capability(format!("exact table limited to n <= {EXACT_TABLE_MAX_N}")));
        }
        let values = (0..1u64 << n)
            .map(|m| {
                let v = f.eval(&ElementSet::from_mask(n, m));
                Ratio::new((v * denominator as f64).round() as i64, denominator)
            })
            .collect();
        Ok(ExactTable { n, values })
    }

    pub fn value(&self, mask: usize) -> Ratio<i64> {
        self.values[mask]
    }

    /// Exhaustive exact check of normalization, monotonicity and the
    /// diminishing-returns form of submodularity. Returns the first violating
    /// pair `(A, B)` of masks, if any.
    pub fn find_violation(&self) -> Option<(usize, usize)> {
        let zero = Ratio::from_integer(0);
        if self.values[0] != zero {
            return Some((0, 0));
        }
        let full = (1usize << self.n) - 1;
        for a in 0..=full {
            for e in 0..self.n {
                if a & (1 << e) != 0 {
                    continue;
                }
                let gain_a = self.values[a | 1 << e] - self.values[a];
                if gain_a < zero {
                    return Some((a, a | 1 << e));
                }
                // Diminishing returns against every single-element superset.
                for x in 0..self.n {
                    if x == e || a & (1 << x) != 0 {
                        continue;
                    }
                    let b = a | 1 << x;
                    let gain_b = self.values[b | 1 << e] - self.values[b];
                    if gain_b > gain_a {
                        return Some((a | 1 << e, b));
                    }
                }
            }
        }
        None
    }
}

impl SetFunction for ExactTable {
    fn ground_size(&self) -> usize {
        self.n
    }

    fn eval(&self, set: &ElementSet) -> f64 {
        let r = self.values[set.to_mask() as usize];
        *r.numer() as f64 / *r.denom() as f64
    }

    fn kind(&self) -> OracleKind {
        OracleKind::ExplicitTable
    }
}

/// `factor · f`.
#[derive(Clone)]
pub struct Scaled {
    factor: f64,
    inner: DynOracle,
}

impl Scaled {
    pub fn new(factor: f64, inner: DynOracle) -> Result<Self> {
        if !(factor.is_finite() && factor >= 0.0) {
            return Err(Error::input("scale factor must be nonnegative"));
        }
        Ok(Scaled { factor, inner })
    }

    pub fn factor(&self) -> f64 {
        self.factor
    }
}

impl SetFunction for Scaled {
    fn ground_size(&self) -> usize {
        self.inner.ground_size()
    }

    fn eval(&self, set: &ElementSet) -> f64 {
        self.factor * self.inner.eval(set)
    }

    fn kind(&self) -> OracleKind {
        OracleKind::Scaled
    }

    fn components(&self) -> Vec<Vec<usize>> {
        self.inner.components()
    }

    fn interchangeable(&self, a: usize, b: usize) -> bool {
        self.inner.interchangeable(a, b)
    }

    fn cardinality_profile(&self, domain: &[usize], contracted: &ElementSet) -> Option<Vec<f64>> {
        self.inner.cardinality_profile(domain, contracted).map(|p| p.into_iter().map(|v| v * self.factor).collect())
    }

    fn min_shifted(&self, scale: f64, weights: &[f64], contracted: &ElementSet, domain: &[usize]) -> Option<f64> {
        self.inner.min_shifted(scale * self.factor, weights, contracted, domain)
    }
}

/// Direct sum of oracles on consecutive id blocks.
#[derive(Clone)]
pub struct DirectSum {
    n: usize,
    offsets: Vec<usize>,
    blocks: Vec<DynOracle>,
}

impl DirectSum {
    pub fn new(blocks: Vec<DynOracle>) -> Self {
        let mut offsets = Vec::with_capacity(blocks.len());
        let mut n = 0;
        for b in &blocks {
            offsets.push(n);
            n += b.ground_size();
        }
        DirectSum { n, offsets, blocks }
    }

    fn locate(&self, e: usize) -> (usize, usize) {
        let b = self.offsets.partition_point(|&o| o <= e) - 1;
        (b, e - self.offsets[b])
    }

    fn local(&self, b: usize, set: &ElementSet) -> ElementSet {
        let size = self.blocks[b].ground_size();
        let off = self.offsets[b];
        ElementSet::from_elements(size, set.iter().filter(|&e| e >= off && e < off + size).map(|e| e - off))
    }
}

impl SetFunction for DirectSum {
    fn ground_size(&self) -> usize {
        self.n
    }

    fn eval(&self, set: &ElementSet) -> f64 {
        (0..self.blocks.len())
            .map(|b| {
                let local = self.local(b, set);
                if local.is_empty() {
                    0.0
                } else {
                    self.blocks[b].eval(&local)
                }
            })
            .sum()
    }

    fn kind(&self) -> OracleKind {
        OracleKind::DirectSum
    }

    fn components(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        for (b, f) in self.blocks.iter().enumerate() {
            let off = self.offsets[b];
            for c in f.components() {
                if !c.is_empty() {
                    out.push(c.into_iter().map(|e| e + off).collect());
                }
            }
        }
        out
    }

    fn interchangeable(&self, a: usize, b: usize) -> bool {
        let (ba, la) = self.locate(a);
        let (bb, lb) = self.locate(b);
        ba == bb && self.blocks[ba].interchangeable(la, lb)
    }

    fn cardinality_profile(&self, domain: &[usize], contracted: &ElementSet) -> Option<Vec<f64>> {
        let (&first, _) = domain.split_first()?;
        let (b, _) = self.locate(first);
        let off = self.offsets[b];
        let mut local = Vec::with_capacity(domain.len());
        for &d in domain {
            let (bd, ld) = self.locate(d);
            if bd != b {
                return None;
            }
            local.push(ld);
        }
        debug_assert!(local.iter().all(|&l| l + off < self.n));
        self.blocks[b].cardinality_profile(&local, &self.local(b, contracted))
    }

    fn min_shifted(&self, scale: f64, weights: &[f64], contracted: &ElementSet, domain: &[usize]) -> Option<f64> {
        let mut total = 0.0;
        for (b, f) in self.blocks.iter().enumerate() {
            let off = self.offsets[b];
            let size = f.ground_size();
            let local_domain: Vec<usize> =
                domain.iter().filter(|&&d| d >= off && d < off + size).map(|&d| d - off).collect();
            if local_domain.is_empty() {
                continue;
            }
            let local_weights = &weights[off..off + size];
            total += f.min_shifted(scale, local_weights, &self.local(b, contracted), &local_domain)?;
        }
        Some(total)
    }
}

/// Contraction `f_T(S) = f(S ∪ T) − f(T)` over the same ground set.
#[derive(Clone)]
pub struct Contraction {
    base: DynOracle,
    contracted: ElementSet,
    base_value: f64,
}

impl Contraction {
    pub fn new(base: DynOracle, contracted: ElementSet) -> Result<Self> {
        if contracted.universe() != base.ground_size() {
            return Err(Error::input("contraction set does not match the ground set"));
        }
        let base_value = base.eval(&contracted);
        Ok(Contraction { base, contracted, base_value })
    }

    pub fn contracted(&self) -> &ElementSet {
        &self.contracted
    }
}

impl SetFunction for Contraction {
    fn ground_size(&self) -> usize {
        self.base.ground_size()
    }

    fn eval(&self, set: &ElementSet) -> f64 {
        (self.base.eval(&set.union(&self.contracted)) - self.base_value).max(0.0)
    }

    fn kind(&self) -> OracleKind {
        OracleKind::Contraction
    }

    fn components(&self) -> Vec<Vec<usize>> {
        self.base.components()
    }

    fn interchangeable(&self, a: usize, b: usize) -> bool {
        self.contracted.contains(a) == self.contracted.contains(b) && self.base.interchangeable(a, b)
    }

    fn min_shifted(&self, scale: f64, weights: &[f64], contracted: &ElementSet, domain: &[usize]) -> Option<f64> {
        let inner: Vec<usize> = domain.iter().copied().filter(|&d| !self.contracted.contains(d)).collect();
        self.base.min_shifted(scale, weights, &contracted.union(&self.contracted), &inner)
    }
}

/// Restriction of `f` to a subset of its elements, re-indexed densely.
#[derive(Clone)]
pub struct Restriction {
    base: DynOracle,
    elements: Vec<usize>,
}

impl Restriction {
    pub fn new(base: DynOracle, elements: Vec<usize>) -> Result<Self> {
        let n = base.ground_size();
        let mut seen = vec![false; n];
        for &e in &elements {
            if e >= n || seen[e] {
                return Err(Error::input(format!("restriction: element {e} out of range or repeated")));
            }
            seen[e] = true;
        }
        Ok(Restriction { base, elements })
    }

    fn lift(&self, set: &ElementSet) -> ElementSet {
        ElementSet::from_elements(self.base.ground_size(), set.iter().map(|e| self.elements[e]))
    }
}

impl SetFunction for Restriction {
    fn ground_size(&self) -> usize {
        self.elements.len()
    }

    fn eval(&self, set: &ElementSet) -> f64 {
        self.base.eval(&self.lift(set))
    }

    fn kind(&self) -> OracleKind {
        OracleKind::Restriction
    }

    fn components(&self) -> Vec<Vec<usize>> {
        let mut local = vec![usize::MAX; self.base.ground_size()];
        for (i, &e) in self.elements.iter().enumerate() {
            local[e] = i;
        }
        let mut out: Vec<Vec<usize>> = self
            .base
            .components()
            .into_iter()
            .map(|c| {
                let mut v: Vec<usize> = c.into_iter().map(|e| local[e]).filter(|&i| i != usize::MAX).collect();
                v.sort_unstable();
                v
            })
            .filter(|c| !c.is_empty())
            .collect();
        out.sort_by_key(|c| c[0]);
        out
    }

    fn interchangeable(&self, a: usize, b: usize) -> bool {
        self.base.interchangeable(self.elements[a], self.elements[b])
    }

    fn min_shifted(&self, scale: f64, weights: &[f64], contracted: &ElementSet, domain: &[usize]) -> Option<f64> {
        let mut lifted = vec![0.0; self.base.ground_size()];
        for (i, &e) in self.elements.iter().enumerate() {
            lifted[e] = weights[i];
        }
        let domain: Vec<usize> = domain.iter().map(|&d| self.elements[d]).collect();
        self.base.min_shifted(scale, &lifted, &self.lift(contracted), &domain)
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;

    fn set(n: usize, e: &[usize]) -> ElementSet {
        ElementSet::from_elements(n, e.iter().copied())
    }

    #[test]
    fn graphic_triangle_rank() {
        let g = Graphic::new(3, vec![(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(g.eval(&set(3, &[0, 1, 2])), 2.0);
        assert_eq!(g.eval(&set(3, &[0, 2])), 2.0);
        assert_eq!(g.eval(&set(3, &[1])), 1.0);
        assert_eq!(g.components(), vec![vec![0, 1, 2]]);
    }

    #[test]
    fn graphic_components_split_disconnected_edges() {
        let g = Graphic::new(5, vec![(0, 1), (3, 4), (1, 2)]).unwrap();
        assert_eq!(g.components(), vec![vec![0, 2], vec![1]]);
        assert!(g.interchangeable(0, 0));
        let p = Graphic::new(2, vec![(0, 1), (1, 0)]).unwrap();
        assert!(p.interchangeable(0, 1));
    }

    #[test]
    fn transversal_matching_rank() {
        // Elements 0 and 1 compete for right vertex 0; element 2 can use 0 or 1.
        let t = Transversal::new(2, vec![vec![0], vec![0], vec![0, 1]]).unwrap();
        assert_eq!(t.eval(&set(3, &[0, 1])), 1.0);
        assert_eq!(t.eval(&set(3, &[0, 2])), 2.0);
        assert_eq!(t.eval(&set(3, &[0, 1, 2])), 2.0);
        assert!(t.interchangeable(0, 1));
        assert!(!t.interchangeable(0, 2));
    }

    #[test]
    fn partition_rank_and_profile() {
        let p = Partition::new(3, vec![vec![0, 1], vec![2]], vec![1.0, 1.0]).unwrap();
        assert_eq!(p.eval(&set(3, &[0, 1, 2])), 2.0);
        assert_eq!(p.components(), vec![vec![0, 1], vec![2]]);
        let prof = p.cardinality_profile(&[0, 1], &set(3, &[])).unwrap();
        assert_eq!(prof, vec![0.0, 1.0, 1.0]);
        assert!(p.cardinality_profile(&[0, 2], &set(3, &[])).is_none());
    }

    #[test]
    fn partition_rejects_uncovered_element() {
        assert!(Partition::new(3, vec![vec![0, 1]], vec![1.0]).is_err());
    }

    #[test]
    fn direct_sum_offsets_blocks() {
        let a: DynOracle = Arc::new(Uniform::new(2, 1.0).unwrap());
        let b: DynOracle = Arc::new(Uniform::new(3, 2.0).unwrap());
        let d = DirectSum::new(vec![a, b]);
        assert_eq!(d.ground_size(), 5);
        assert_eq!(d.eval(&set(5, &[0, 1, 2, 3, 4])), 3.0);
        assert_eq!(d.components(), vec![vec![0, 1], vec![2, 3, 4]]);
        assert!(d.interchangeable(2, 4));
        assert!(!d.interchangeable(1, 2));
    }

    #[test]
    fn contraction_and_restriction_views() {
        let u: DynOracle = Arc::new(Uniform::new(3, 2.0).unwrap());
        let c = Contraction::new(u.clone(), set(3, &[0])).unwrap();
        assert_eq!(c.eval(&set(3, &[])), 0.0);
        assert_eq!(c.eval(&set(3, &[1, 2])), 1.0);
        let r = Restriction::new(u, vec![2, 0]).unwrap();
        assert_eq!(r.ground_size(), 2);
        assert_eq!(r.eval(&set(2, &[0, 1])), 2.0);
    }

    #[test]
    fn table_keyed_roundtrip() {
        let mut keyed = BTreeMap::new();
        keyed.insert("0".to_string(), 1.0);
        keyed.insert("1".to_string(), 1.0);
        keyed.insert("0,1".to_string(), 1.5);
        let t = Table::from_keyed(2, &keyed).unwrap();
        assert_eq!(t.eval(&set(2, &[0, 1])), 1.5);
        assert_eq!(t.to_keyed(), keyed);
        keyed.remove("1");
        assert!(Table::from_keyed(2, &keyed).is_err());
    }

    #[test]
    fn exact_table_detects_supermodularity() {
        let v = |x: i64| Ratio::from_integer(x);
        let bad = ExactTable::new(2, vec![v(0), v(1), v(1), v(3)]).unwrap();
        assert!(bad.find_violation().is_some());
        let u = Uniform::new(4, 2.0).unwrap();
        let good = ExactTable::tabulate(&u, 1).unwrap();
        assert!(good.find_violation().is_none());
    }

    #[test]
    fn coverage_counts_union_weight() {
        let c = Coverage::new(vec![1.0, 2.0, 4.0], vec![vec![0, 1], vec![1, 2], vec![2]]).unwrap();
        assert_eq!(c.eval(&set(3, &[0, 1])), 7.0);
        assert_eq!(c.eval(&set(3, &[1, 2])), 6.0);
        assert_eq!(c.components(), vec![vec![0, 1, 2]]);
    }
}
