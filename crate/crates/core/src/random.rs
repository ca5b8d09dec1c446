//! Seeded random instances for property tests, generators and benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ranking::{Agent, OswmInstance};
use crate::solvers::SapInstance;
use crate::submodular::{build_oracle, DynOracle, LaminarSet, OracleSpec, SumBlock};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random oracle description drawn from a mix of families. Every element
/// has a positive singleton value.
pub fn random_oracle_spec(rng: &mut ChaCha8Rng, n: usize) -> OracleSpec {
    match rng.gen_range(0..7) {
        0 => OracleSpec::Uniform { rank: rng.gen_range(1..=n.max(1)) as f64 },
        1 => {
            let k = rng.gen_range(1..=n.max(1));
            let mut parts = vec![Vec::new(); k];
            for e in 0..n {
                parts[rng.gen_range(0..k)].push(e);
            }
            let capacities = (0..k).map(|_| rng.gen_range(1..=3) as f64).collect();
            OracleSpec::Partition { parts, capacities }
        }
        2 => {
            let vertices = rng.gen_range(2..=n.max(2));
            let edges = (0..n)
                .map(|_| {
                    let a = rng.gen_range(0..vertices);
                    let mut b = rng.gen_range(0..vertices - 1);
                    if b >= a {
                        b += 1;
                    }
                    (a, b)
                })
                .collect();
            OracleSpec::Graphic { vertices, edges }
        }
        3 => random_coverage_spec(rng, n),
        4 => random_laminar_spec(rng, n, 3),
        5 => {
            let right = rng.gen_range(1..=n.max(1));
            let adjacency = (0..n)
                .map(|_| {
                    let mut a: Vec<usize> = (0..right).filter(|_| rng.gen_bool(0.4)).collect();
                    if a.is_empty() {
                        a.push(rng.gen_range(0..right));
                    }
                    a
                })
                .collect();
            OracleSpec::Transversal { right, adjacency }
        }
        _ => {
            let split = rng.gen_range(0..=n);
            let left = OracleSpec::Uniform { rank: rng.gen_range(1..=2) as f64 };
            let right = OracleSpec::Scale {
                factor: rng.gen_range(0.5..2.0),
                oracle: Box::new(random_oracle_spec(rng, n - split)),
            };
            OracleSpec::DirectSum {
                blocks: vec![SumBlock { ground: split, oracle: left }, SumBlock { ground: n - split, oracle: right }],
            }
        }
    }
}

/// Weighted coverage function over a random universe.
pub fn random_coverage_spec(rng: &mut ChaCha8Rng, n: usize) -> OracleSpec {
    let items = rng.gen_range(1..=n.max(1) + 2);
    let weights = (0..items).map(|_| rng.gen_range(0.1..2.0)).collect();
    let covers = (0..n)
        .map(|_| {
            let mut c: Vec<usize> = (0..items).filter(|_| rng.gen_bool(0.35)).collect();
            if c.is_empty() {
                c.push(rng.gen_range(0..items));
            }
            c
        })
        .collect();
    OracleSpec::Coverage { weights, covers }
}

/// Random laminar budget family: a singleton per element, grouped into
/// consecutive runs level by level, at most `depth` levels above the leaves.
pub fn random_laminar_spec(rng: &mut ChaCha8Rng, n: usize, depth: usize) -> OracleSpec {
    let mut sets: Vec<LaminarSet> =
        (0..n).map(|e| LaminarSet { members: vec![e], budget: rng.gen_range(0.2..1.5) }).collect();
    let mut groups: Vec<Vec<usize>> = (0..n).map(|e| vec![e]).collect();
    for _ in 0..depth {
        if groups.len() <= 1 {
            break;
        }
        let mut next = Vec::new();
        let mut i = 0;
        while i < groups.len() {
            let take = rng.gen_range(1..=3).min(groups.len() - i);
            let merged: Vec<usize> = groups[i..i + take].iter().flatten().copied().collect();
            if take > 1 {
                let budget = rng.gen_range(0.4..1.0) * merged.len() as f64;
                sets.push(LaminarSet { members: merged.clone(), budget });
            }
            next.push(merged);
            i += take;
        }
        groups = next;
    }
    OracleSpec::Laminar { sets }
}

pub fn random_oracle(rng: &mut ChaCha8Rng, n: usize) -> DynOracle {
    let spec = random_oracle_spec(rng, n);
    build_oracle(&spec, n).expect("random oracle specs are valid")
}

/// Random matroid rank function: uniform, partition, graphic (loops
/// allowed) or transversal.
pub fn random_matroid_spec(rng: &mut ChaCha8Rng, m: usize) -> OracleSpec {
    match rng.gen_range(0..4) {
        0 => OracleSpec::Uniform { rank: rng.gen_range(1..=m.max(1)) as f64 },
        1 => {
            let k = rng.gen_range(1..=m.max(1));
            let mut parts = vec![Vec::new(); k];
            for e in 0..m {
                parts[rng.gen_range(0..k)].push(e);
            }
            let capacities = (0..k).map(|_| rng.gen_range(1..=2) as f64).collect();
            OracleSpec::Partition { parts, capacities }
        }
        2 => {
            let vertices = rng.gen_range(2..=m.max(2));
            let edges = (0..m).map(|_| (rng.gen_range(0..vertices), rng.gen_range(0..vertices))).collect();
            OracleSpec::Graphic { vertices, edges }
        }
        _ => {
            let right = rng.gen_range(1..=m.max(1));
            let adjacency = (0..m).map(|_| (0..right).filter(|_| rng.gen_bool(0.4)).collect()).collect();
            OracleSpec::Transversal { right, adjacency }
        }
    }
}

/// Welfare instance with `agents` random matroids over `items` items and
/// weights in `{1}` or `[0.2, 2)` at random.
pub fn random_oswm(rng: &mut ChaCha8Rng, agents: usize, items: usize) -> OswmInstance {
    let unit = rng.gen_bool(0.5);
    let agents = (0..agents)
        .map(|_| Agent {
            oracle: build_oracle(&random_matroid_spec(rng, items), items).expect("random matroid specs are valid"),
            weight: if unit { 1.0 } else { rng.gen_range(0.2..2.0) },
        })
        .collect();
    OswmInstance::new(items, agents).expect("random welfare instances are valid")
}

/// Assignment instance over a random oracle, elements split into random
/// parts, values and costs in `[0.2, 2)`; with `unit`, all values and costs 1.
pub fn random_sap(rng: &mut ChaCha8Rng, n: usize, unit: bool) -> SapInstance {
    let oracle = random_oracle(rng, n);
    let k = rng.gen_range(1..=n.max(1));
    let mut parts = vec![Vec::new(); k];
    for e in 0..n {
        parts[rng.gen_range(0..k)].push(e);
    }
    parts.retain(|p| !p.is_empty());
    let draw = |rng: &mut ChaCha8Rng| if unit { 1.0 } else { rng.gen_range(0.2..2.0) };
    let values = (0..n).map(|_| draw(rng)).collect();
    let costs = (0..n).map(|_| draw(rng)).collect();
    SapInstance::new(oracle, values, costs, parts).expect("random assignment instances are valid")
}

/// Random nonnegative load with roughly a fifth of the entries exactly zero.
pub fn random_load(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| if rng.gen_bool(0.2) { 0.0 } else { rng.gen_range(0.0..1.5) }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::submodular::{dead_elements, verify_submodular, VerifyMode};

    #[test]
    fn random_oracles_are_valid() {
        let mut r = rng(3);
        for n in 0..10 {
            for _ in 0..8 {
                let f = random_oracle(&mut r, n);
                assert!(dead_elements(f.as_ref()).is_empty());
                assert!(verify_submodular(f.as_ref(), VerifyMode::Exhaustive).unwrap().passed);
            }
        }
    }
}
