//! Integral allocation when every bid is small against every marginal.

use std::sync::Arc;

use rand::Rng;
use serde::Serialize;

use super::fractional::finish_report;
use super::{dual_decrease, g, Allocation, DualCertificate, SapInstance, SolveMode, SolveOutput, G};
use crate::error::{Error, Result};
use crate::set::ElementSet;
use crate::submodular::{Scaled, SetFunction};
use crate::waterlevel::water_levels_alg1;

/// Ground sets up to this size are checked over every `T`.
pub const SMALL_BIDS_EXHAUSTIVE_MAX_N: usize = 14;
const SAMPLES: usize = 8192;
const MARGINAL_FLOOR: f64 = 1e-12;

/// Outcome of checking `b_e ≤ ε f_T({e})` wherever `f_T({e}) > 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SmallBidsCheck {
    pub epsilon: f64,
    pub exhaustive: bool,
    pub pairs_checked: usize,
    /// Largest `b_e / f_T({e})` seen.
    pub worst_ratio: f64,
    /// `(e, T)` attaining the worst ratio.
    pub witness: Option<(usize, Vec<usize>)>,
}

impl SmallBidsCheck {
    pub fn holds(&self) -> bool {
        self.worst_ratio <= self.epsilon * (1.0 + 1e-9)
    }
}

pub fn check_small_bids(inst: &SapInstance, epsilon: f64, seed: u64) -> Result<SmallBidsCheck> {
    let f = inst.oracle.as_ref();
    let n = inst.len();
    let mut check = SmallBidsCheck {
        epsilon,
        exhaustive: n <= SMALL_BIDS_EXHAUSTIVE_MAX_N,
        pairs_checked: 0,
        worst_ratio: 0.0,
        witness: None,
    };
    let probe = |t: &ElementSet, ft: f64, e: usize, check: &mut SmallBidsCheck| {
        let marginal = f.eval(&t.with(e)) - ft;
        check.pairs_checked += 1;
        if marginal > MARGINAL_FLOOR {
            let r = inst.costs[e] / marginal;
            if r > check.worst_ratio {
                check.worst_ratio = r;
                check.witness = Some((e, t.to_vec()));
            }
        }
    };
    if check.exhaustive {
        for mask in 0..(1u64 << n) {
            let t = ElementSet::from_mask(n, mask);
            let ft = f.eval(&t);
            for e in (0..n).filter(|e| mask >> e & 1 == 0) {
                probe(&t, ft, e, &mut check);
            }
        }
    } else {
        let mut rng = crate::random::rng(seed);
        for _ in 0..SAMPLES {
            let density: f64 = rng.gen();
            let e = rng.gen_range(0..n);
            let t = ElementSet::from_elements(n, (0..n).filter(|&d| d != e && rng.gen::<f64>() < density));
            let ft = f.eval(&t);
            probe(&t, ft, e, &mut check);
        }
    }
    Ok(check)
}

/// Runs water-filling against `(1−ε) f` one whole element at a time: each
/// part takes the element maximizing `b_e (1 − g(w_e))` among those below
/// level 1, or nothing. Needs `b = v`.
pub fn solve_small_bids(inst: &SapInstance, epsilon: f64) -> Result<SolveOutput> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::input("epsilon must lie in (0, 1)"));
    }
    if let Some(e) = (0..inst.len()).find(|&e| (inst.values[e] - inst.costs[e]).abs() > 1e-12 * inst.costs[e]) {
        return Err(Error::input(format!("small-bids mode needs values equal to costs (element {e})")));
    }
    let n = inst.len();
    let b = &inst.costs;
    let mut warnings = Vec::new();
    let check = check_small_bids(inst, epsilon, 0)?;
    if !check.holds() {
        warnings.push(format!(
            "small-bids assumption fails: b/f_T(e) reaches {:.6} > ε = {epsilon} ({} check)",
            check.worst_ratio,
            if check.exhaustive { "exhaustive" } else { "sampled" }
        ));
    }

    let shrunk = Scaled::new(1.0 - epsilon, Arc::clone(&inst.oracle))?;
    let mut alloc = Allocation::zeros(n);
    let mut beta = vec![0.0; inst.parts.len()];
    let mut w = water_levels_alg1(&shrunk, &alloc.x)?.w;
    let mut gamma: Vec<f64> = w.iter().map(|&z| G(z)).collect();
    let mut max_level = 0.0f64;
    let mut max_decrease = 0.0f64;
    let mut picks = 0;

    for (j, part) in inst.parts.iter().enumerate() {
        alloc.revealed = j + 1;
        let mut members = part.clone();
        members.sort_unstable();
        let score = |e: usize| b[e] * (1.0 - g(w[e]));
        beta[j] = members.iter().map(|&e| score(e)).fold(0.0, f64::max);
        let pick = members.iter().copied().filter(|&e| w[e] < 1.0).fold(None, |best: Option<usize>, e| match best {
            Some(c) if score(c) >= score(e) => Some(c),
            _ => Some(e),
        });
        let Some(e) = pick else { continue };
        if alloc.x[e] != 0.0 {
            return Err(Error::invariant(format!("element {e} selected twice")));
        }
        alloc.x[e] = 1.0;
        picks += 1;
        let dec = water_levels_alg1(&shrunk, &inst.load(&alloc.x))?;
        max_level = max_level.max(dec.max_level());
        w = dec.w;
        let new_gamma: Vec<f64> = w.iter().map(|&z| G(z)).collect();
        max_decrease = max_decrease.max(dual_decrease(&gamma, &new_gamma));
        gamma = new_gamma;
    }

    let f: &dyn SetFunction = inst.oracle.as_ref();
    let final_level = water_levels_alg1(f, &inst.load(&alloc.x))?.max_level();
    if final_level > 1.0 + 1e-9 {
        return Err(Error::invariant(format!("integral allocation infeasible: water level {final_level}")));
    }
    let cert = DualCertificate { gamma, beta, scale: 1.0 - epsilon, surrogate: None };
    let mut report = finish_report(inst, &alloc, &cert, SolveMode::SmallBids, 0.0, picks, 0, max_level)?;
    report.epsilon = Some(epsilon);
    report.max_dual_decrease = max_decrease;
    report.warnings = warnings;
    Ok((alloc, cert, report))
}
