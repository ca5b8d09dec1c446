//! Optimality check of the market allocation `u_e = x_e / w_e` with chain duals.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{validate_load, Decomposition};
use crate::error::{Error, Result};
use crate::set::ElementSet;
use crate::submodular::SetFunction;

/// Ground-set limit for checking every primal constraint.
pub const KKT_EXHAUSTIVE_MAX_N: usize = 14;
const KKT_TOL: f64 = 1e-7;
const SAMPLED_SETS: usize = 4096;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KktReport {
    pub primal_feasible: bool,
    pub dual_nonnegative: bool,
    pub stationary: bool,
    pub complementary: bool,
    /// Whether every primal constraint was checked.
    pub exhaustive: bool,
    /// Description of the first failure.
    pub witness: Option<String>,
}

impl KktReport {
    pub fn passed(&self) -> bool {
        self.primal_feasible && self.dual_nonnegative && self.stationary && self.complementary
    }

    fn fail(&mut self, msg: String) {
        if self.witness.is_none() {
            self.witness = Some(msg);
        }
    }
}

pub fn verify_sua_kkt(f: &dyn SetFunction, x: &[f64], dec: &Decomposition) -> Result<KktReport> {
    validate_load(f, x)?;
    let n = f.ground_size();
    if dec.w.len() != n || dec.u.len() != n || dec.alpha.len() != dec.chain.len() {
        return Err(Error::input("decomposition does not match the ground set"));
    }
    let mut report = KktReport {
        primal_feasible: true,
        dual_nonnegative: true,
        stationary: true,
        complementary: true,
        exhaustive: n <= KKT_EXHAUSTIVE_MAX_N,
        witness: None,
    };
    let slack = |v: f64| KKT_TOL * v.abs().max(1.0);

    let check_primal = |set: &ElementSet, report: &mut KktReport| {
        let used = set.sum(&dec.u);
        let cap = f.eval(set);
        if used > cap + slack(cap) {
            report.primal_feasible = false;
            report.fail(format!("u({:?}) = {used} exceeds f = {cap}", set.to_vec()));
        }
    };
    if report.exhaustive {
        for m in 1..1u64 << n {
            check_primal(&ElementSet::from_mask(n, m), &mut report);
        }
    } else {
        for s in &dec.chain {
            check_primal(&ElementSet::from_elements(n, s.iter().copied()), &mut report);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        for _ in 0..SAMPLED_SETS {
            let p: f64 = rng.gen();
            let set = ElementSet::from_elements(n, (0..n).filter(|_| rng.gen::<f64>() < p).collect::<Vec<_>>());
            check_primal(&set, &mut report);
        }
    }

    for (l, &a) in dec.alpha.iter().enumerate() {
        if a < -slack(0.0) {
            report.dual_nonnegative = false;
            report.fail(format!("alpha of chain set {l} is negative ({a})"));
        }
    }

    // Σ_{S_ℓ ∋ e} α_ℓ, from the outermost chain set inwards.
    let mut cover = vec![0.0; n];
    for (l, s) in dec.chain.iter().enumerate() {
        for &e in s {
            cover[e] += dec.alpha[l];
        }
    }
    for e in (0..n).filter(|&e| x[e] > 0.0) {
        let lhs = if dec.u[e] > 0.0 { x[e] / dec.u[e] } else { f64::INFINITY };
        if (lhs - cover[e]).abs() > slack(cover[e]) {
            report.stationary = false;
            report.fail(format!("element {e}: x/u = {lhs} but chain duals sum to {}", cover[e]));
        }
    }

    for (l, s) in dec.chain.iter().enumerate() {
        if dec.alpha[l] <= slack(0.0) {
            continue;
        }
        let set = ElementSet::from_elements(n, s.iter().copied());
        let used = set.sum(&dec.u);
        let cap = f.eval(&set);
        if (used - cap).abs() > slack(cap) {
            report.complementary = false;
            report.fail(format!("chain set {l} has positive dual but u = {used} < f = {cap}"));
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::submodular::Partition;
    use crate::waterlevel::water_levels_alg1;

    #[test]
    fn partition_decomposition_is_optimal() {
        let f = Partition::new(3, vec![vec![0, 1], vec![2]], vec![1.0, 1.0]).unwrap();
        let x = [0.2, 0.3, 0.9];
        let d = water_levels_alg1(&f, &x).unwrap();
        assert!(verify_sua_kkt(&f, &x, &d).unwrap().passed());
    }

    #[test]
    fn perturbed_dual_breaks_stationarity() {
        let f = Partition::new(3, vec![vec![0, 1], vec![2]], vec![1.0, 1.0]).unwrap();
        let x = [0.2, 0.3, 0.9];
        let mut d = water_levels_alg1(&f, &x).unwrap();
        d.alpha[0] += 0.1;
        let r = verify_sua_kkt(&f, &x, &d).unwrap();
        assert!(!r.stationary);
        assert!(r.witness.unwrap().contains("element 2"));
    }

    #[test]
    fn zero_load_is_vacuous() {
        let f = Partition::new(3, vec![vec![0, 1], vec![2]], vec![1.0, 1.0]).unwrap();
        let d = water_levels_alg1(&f, &[0.0; 3]).unwrap();
        assert!(verify_sua_kkt(&f, &[0.0; 3], &d).unwrap().passed());
    }
}
