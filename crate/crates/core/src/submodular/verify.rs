//! Checks of normalization, monotonicity and submodularity.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::SetFunction;
use crate::error::{Error, Result};
use crate::set::ElementSet;
use crate::tol::tolerance;

/// Ground-set limit for exhaustive verification.
pub const EXHAUSTIVE_MAX_N: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerifyMode {
    /// All `(S, a, b)` local exchanges, which imply every pairwise inequality.
    Exhaustive,
    /// `pairs` random pairs `(A, B)` drawn from a generator seeded with `seed`.
    Sampled { pairs: usize, seed: u64 },
}

/// First property violation found.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    NotNormalized { value: f64 },
    NotMonotone { subset: Vec<usize>, superset: Vec<usize>, drop: f64 },
    NotSubmodular { a: Vec<usize>, b: Vec<usize>, excess: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NotNormalized { value } => write!(f, "f(∅) = {value}"),
            Violation::NotMonotone { subset, superset, drop } => {
                write!(f, "f({superset:?}) < f({subset:?}) by {drop}")
            }
            Violation::NotSubmodular { a, b, excess } => {
                write!(f, "f(A∪B) + f(A∩B) exceeds f(A) + f(B) by {excess} for A={a:?}, B={b:?}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubmodularReport {
    pub passed: bool,
    /// Number of inequalities evaluated.
    pub checks: usize,
    pub violation: Option<Violation>,
}

impl SubmodularReport {
    fn pass(checks: usize) -> Self {
        SubmodularReport { passed: true, checks, violation: None }
    }

    fn fail(checks: usize, v: Violation) -> Self {
        SubmodularReport { passed: false, checks, violation: Some(v) }
    }
}

fn slack(scale: f64) -> f64 {
    tolerance() * scale.abs().max(1.0)
}

fn mask_elems(mask: usize, n: usize) -> Vec<usize> {
    (0..n).filter(|e| mask & (1 << e) != 0).collect()
}

pub fn verify_submodular(f: &dyn SetFunction, mode: VerifyMode) -> Result<SubmodularReport> {
    let n = f.ground_size();
    let empty = f.eval(&ElementSet::empty(n));
    if empty.abs() > slack(0.0) {
        return Ok(SubmodularReport::fail(1, Violation::NotNormalized { value: empty }));
    }
    match mode {
        VerifyMode::Exhaustive => exhaustive(f),
        VerifyMode::Sampled { pairs, seed } => Ok(sampled(f, pairs, seed)),
    }
}

fn exhaustive(f: &dyn SetFunction) -> Result<SubmodularReport> {
    let n = f.ground_size();
    if n > EXHAUSTIVE_MAX_N {
        return Err(Error::capability(format!("exhaustive verification limited to n <= {EXHAUSTIVE_MAX_N}")));
    }
    let values: Vec<f64> = (0..1u64 << n).map(|m| f.eval(&ElementSet::from_mask(n, m))).collect();
    let mut checks = 1;
    for s in 0..values.len() {
        for a in (0..n).filter(|a| s & (1 << a) == 0) {
            let sa = s | 1 << a;
            checks += 1;
            if values[sa] < values[s] - slack(values[s]) {
                return Ok(SubmodularReport::fail(
                    checks,
                    Violation::NotMonotone {
                        subset: mask_elems(s, n),
                        superset: mask_elems(sa, n),
                        drop: values[s] - values[sa],
                    },
                ));
            }
            for b in (a + 1..n).filter(|b| s & (1 << b) == 0) {
                let sb = s | 1 << b;
                let sab = sa | 1 << b;
                checks += 1;
                let excess = values[sab] + values[s] - values[sa] - values[sb];
                if excess > slack(values[sab]) {
                    return Ok(SubmodularReport::fail(
                        checks,
                        Violation::NotSubmodular { a: mask_elems(sa, n), b: mask_elems(sb, n), excess },
                    ));
                }
            }
        }
    }
    Ok(SubmodularReport::pass(checks))
}

fn sampled(f: &dyn SetFunction, pairs: usize, seed: u64) -> SubmodularReport {
    let n = f.ground_size();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let random_set = |rng: &mut ChaCha8Rng| {
        let p: f64 = rng.gen();
        ElementSet::from_elements(n, (0..n).filter(|_| rng.gen::<f64>() < p).collect::<Vec<_>>())
    };
    let mut checks = 1;
    for _ in 0..pairs {
        let a = random_set(&mut rng);
        let b = random_set(&mut rng);
        let (u, i) = (a.union(&b), a.intersection(&b));
        let (fa, fb, fu, fi) = (f.eval(&a), f.eval(&b), f.eval(&u), f.eval(&i));
        checks += 3;
        for (sub, fsub, sup, fsup) in [(&i, fi, &a, fa), (&a, fa, &u, fu)] {
            if fsup < fsub - slack(fsub) {
                return SubmodularReport::fail(
                    checks,
                    Violation::NotMonotone { subset: sub.to_vec(), superset: sup.to_vec(), drop: fsub - fsup },
                );
            }
        }
        let excess = fu + fi - fa - fb;
        if excess > slack(fu) {
            return SubmodularReport::fail(checks, Violation::NotSubmodular { a: a.to_vec(), b: b.to_vec(), excess });
        }
    }
    SubmodularReport::pass(checks)
}
