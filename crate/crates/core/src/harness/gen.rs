//! Instance families.

use rand::Rng;

use super::instance::{AgentFile, InstanceFile, OswmFile, SapFile};
use crate::error::{Error, Result};
use crate::random::{random_coverage_spec, random_matroid_spec, rng};
use crate::submodular::{LaminarSet, OracleSpec, SumBlock};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    pub vertices: usize,
    pub edges: Vec<(usize, usize)>,
}

impl Graph {
    pub fn complete(k: usize) -> Self {
        let edges = (0..k).flat_map(|a| (a + 1..k).map(move |b| (a, b))).collect();
        Graph { vertices: k, edges }
    }

    pub fn path(k: usize) -> Self {
        Graph { vertices: k, edges: (1..k).map(|v| (v - 1, v)).collect() }
    }

    pub fn cycle(k: usize) -> Self {
        Graph { vertices: k, edges: (0..k).map(|v| (v, (v + 1) % k)).collect() }
    }

    /// `triangle`, `complete:K`, `path:K`, `cycle:K`, or an edge list
    /// `0-1,1-2,…` (vertices are numbered from 0).
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        let sized = |arg: &str, min: usize| -> Result<usize> {
            let k: usize = arg.parse().map_err(|_| Error::input(format!("bad vertex count `{arg}`")))?;
            if k < min {
                return Err(Error::input(format!("graph needs at least {min} vertices")));
            }
            Ok(k)
        };
        let g = match text.split_once(':') {
            None if text == "triangle" => Graph::complete(3),
            Some(("complete", k)) => Graph::complete(sized(k, 2)?),
            Some(("path", k)) => Graph::path(sized(k, 2)?),
            Some(("cycle", k)) => Graph::cycle(sized(k, 3)?),
            Some(("edges", list)) => Self::edge_list(list)?,
            None => Self::edge_list(text)?,
            Some((kind, _)) => return Err(Error::input(format!("unknown graph kind `{kind}`"))),
        };
        Ok(g)
    }

    fn edge_list(list: &str) -> Result<Self> {
        let mut edges = Vec::new();
        for item in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (a, b) = item.split_once('-').ok_or_else(|| Error::input(format!("bad edge `{item}`")))?;
            let parse = |s: &str| s.trim().parse::<usize>().map_err(|_| Error::input(format!("bad vertex `{s}`")));
            edges.push((parse(a)?, parse(b)?));
        }
        if edges.is_empty() {
            return Err(Error::input("graph has no edges"));
        }
        let vertices = edges.iter().map(|&(a, b)| a.max(b) + 1).max().unwrap_or(0);
        Ok(Graph { vertices, edges })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    UpperTriangular { n: usize },
    AdwordsLaminar { n: usize, depth: usize, seed: u64 },
    AdwordsUpperTriangular { bidders: usize, budget: usize },
    MatroidColoring { graph: Graph, delta: usize },
    RandomPolymatroid { n: usize, seed: u64 },
    RankingUpperTriangular { n: usize },
    RandomOswm { agents: usize, items: usize, seed: u64 },
}

pub fn generate(family: &Family) -> Result<InstanceFile> {
    Ok(match family {
        Family::UpperTriangular { n } => InstanceFile::Sap(upper_triangular(*n)?),
        Family::AdwordsLaminar { n, depth, seed } => InstanceFile::Sap(adwords_laminar(*n, *depth, *seed)?),
        Family::AdwordsUpperTriangular { bidders, budget } => {
            InstanceFile::Sap(adwords_upper_triangular(*bidders, *budget)?)
        }
        Family::MatroidColoring { graph, delta } => InstanceFile::Sap(matroid_coloring(graph, *delta)?),
        Family::RandomPolymatroid { n, seed } => InstanceFile::Sap(random_polymatroid(*n, *seed)?),
        Family::RankingUpperTriangular { n } => InstanceFile::Oswm(ranking_upper_triangular(*n)?),
        Family::RandomOswm { agents, items, seed } => InstanceFile::Oswm(random_oswm_file(*agents, *items, *seed)?),
    })
}

fn positive(name: &str, n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::input(format!("{name} must be positive")));
    }
    Ok(())
}

/// `n` unit slots; part `j` may use slots `j..n`. Elements are numbered part
/// by part.
pub fn upper_triangular(n: usize) -> Result<SapFile> {
    positive("n", n)?;
    let mut slots = vec![Vec::new(); n];
    let mut parts = Vec::with_capacity(n);
    let mut id = 0;
    for j in 0..n {
        let mut part = Vec::new();
        for slot in slots.iter_mut().skip(j) {
            slot.push(id);
            part.push(id);
            id += 1;
        }
        parts.push(part);
    }
    Ok(SapFile {
        ground: id,
        oracle: OracleSpec::Partition { parts: slots, capacities: vec![1.0; n] },
        values: vec![1.0; id],
        costs: vec![1.0; id],
        parts,
    })
}

/// `bidders` bidders with budget `budget` and unit bids; impressions come
/// in `bidders` rounds of `budget`, and round `j` is wanted by bidders
/// `j..bidders`. The optimum spends every budget.
pub fn adwords_upper_triangular(bidders: usize, budget: usize) -> Result<SapFile> {
    positive("bidders", bidders)?;
    positive("budget", budget)?;
    let mut edges_of = vec![Vec::new(); bidders];
    let mut parts = Vec::new();
    let mut id = 0;
    for round in 0..bidders {
        for _ in 0..budget {
            let mut part = Vec::new();
            for edges in edges_of.iter_mut().skip(round) {
                edges.push(id);
                part.push(id);
                id += 1;
            }
            parts.push(part);
        }
    }
    let sets = edges_of.into_iter().map(|members| LaminarSet { members, budget: budget as f64 }).collect();
    Ok(SapFile { ground: id, oracle: OracleSpec::Laminar { sets }, values: vec![1.0; id], costs: vec![1.0; id], parts })
}

/// Laminar AdWords: `n` impressions, `1 + n/3` bidders, each impression bid
/// on by one to three bidders with bids in `[0.5, 1.5]`. Each bidder's edges
/// form a budgeted set, and bidders are grouped into a random tree of
/// `depth` levels of shared budgets.
pub fn adwords_laminar(n: usize, depth: usize, seed: u64) -> Result<SapFile> {
    positive("n", n)?;
    let mut r = rng(seed);
    let k = 1 + n / 3;
    let mut edges_of: Vec<Vec<usize>> = vec![Vec::new(); k];
    let mut bids = Vec::new();
    let mut parts = Vec::new();
    for _ in 0..n {
        let want = r.gen_range(1..=k.min(3));
        let mut chosen: Vec<usize> = rand::seq::index::sample(&mut r, k, want).into_vec();
        chosen.sort_unstable();
        let mut part = Vec::new();
        for i in chosen {
            let id = bids.len();
            bids.push((r.gen_range(50..=150) as f64) / 100.0);
            edges_of[i].push(id);
            part.push(id);
        }
        parts.push(part);
    }
    let mut sets = Vec::new();
    // (members, budget) per current group of bidders
    let mut groups: Vec<(Vec<usize>, f64)> = Vec::new();
    for members in edges_of.into_iter().filter(|m| !m.is_empty()) {
        let spend: f64 = members.iter().map(|&e| bids[e]).sum();
        let budget = (r.gen_range(0.3..0.7) * spend).max(1.5);
        let budget = (budget * 100.0).round() / 100.0;
        sets.push(LaminarSet { members: members.clone(), budget });
        groups.push((members, budget));
    }
    for _ in 0..depth {
        if groups.len() <= 1 {
            break;
        }
        let mut next = Vec::new();
        let mut i = 0;
        while i < groups.len() {
            let take = r.gen_range(1..=3).min(groups.len() - i);
            let members: Vec<usize> = groups[i..i + take].iter().flat_map(|g| g.0.iter().copied()).collect();
            let total: f64 = groups[i..i + take].iter().map(|g| g.1).sum();
            let budget = if take > 1 {
                let b = ((r.gen_range(0.5..0.9) * total) * 100.0).round() / 100.0;
                sets.push(LaminarSet { members: members.clone(), budget: b });
                b
            } else {
                total
            };
            next.push((members, budget));
            i += take;
        }
        groups = next;
    }
    Ok(SapFile { ground: bids.len(), oracle: OracleSpec::Laminar { sets }, values: bids.clone(), costs: bids, parts })
}

/// `delta` colors of a graphic matroid: color `c` of edge `k` is element
/// `c·|E| + k`, and edge `k` arrives as the part of its colors.
pub fn matroid_coloring(graph: &Graph, delta: usize) -> Result<SapFile> {
    positive("delta", delta)?;
    let m = graph.edges.len();
    if m == 0 {
        return Err(Error::input("graph has no edges"));
    }
    for &(a, b) in &graph.edges {
        if a >= graph.vertices || b >= graph.vertices {
            return Err(Error::input(format!("edge ({a}, {b}) leaves the vertex range")));
        }
        if a == b {
            return Err(Error::input(format!("self-loop at vertex {a} can never be colored")));
        }
    }
    let block = OracleSpec::Graphic { vertices: graph.vertices, edges: graph.edges.clone() };
    let blocks = (0..delta).map(|_| SumBlock { ground: m, oracle: block.clone() }).collect();
    let n = m * delta;
    Ok(SapFile {
        ground: n,
        oracle: OracleSpec::DirectSum { blocks },
        values: vec![1.0; n],
        costs: vec![1.0; n],
        parts: (0..m).map(|k| (0..delta).map(|c| c * m + k).collect()).collect(),
    })
}

/// Weighted coverage oracle with random parts, values and costs.
pub fn random_polymatroid(n: usize, seed: u64) -> Result<SapFile> {
    positive("n", n)?;
    let mut r = rng(seed);
    let oracle = random_coverage_spec(&mut r, n);
    let k = r.gen_range(1..=n);
    let mut parts = vec![Vec::new(); k];
    for e in 0..n {
        parts[r.gen_range(0..k)].push(e);
    }
    parts.retain(|p| !p.is_empty());
    let mut draw = || (r.gen_range(50..=150) as f64) / 100.0;
    let values = (0..n).map(|_| draw()).collect();
    let costs = (0..n).map(|_| draw()).collect();
    Ok(SapFile { ground: n, oracle, values, costs, parts })
}

/// Classic ranking instance: agent `i` (a rank-1 matroid) can take items
/// `0..=i`.
pub fn ranking_upper_triangular(n: usize) -> Result<OswmFile> {
    positive("n", n)?;
    let agents = (0..n)
        .map(|i| AgentFile {
            oracle: OracleSpec::Transversal {
                right: 1,
                adjacency: (0..n).map(|j| if j <= i { vec![0] } else { vec![] }).collect(),
            },
            weight: 1.0,
        })
        .collect();
    Ok(OswmFile { agents, items: n })
}

pub fn random_oswm_file(agents: usize, items: usize, seed: u64) -> Result<OswmFile> {
    positive("agents", agents)?;
    positive("items", items)?;
    let mut r = rng(seed);
    let unit = r.gen_bool(0.5);
    let agents = (0..agents)
        .map(|_| AgentFile {
            oracle: random_matroid_spec(&mut r, items),
            weight: if unit { 1.0 } else { (r.gen_range(20..=200) as f64) / 100.0 },
        })
        .collect();
    Ok(OswmFile { agents, items })
}
