//! Online water-filling solvers for submodular assignment and their dual
//! certificates.

mod certify;
mod fractional;
mod instance;
mod matroid;
mod small_bids;

use serde::Serialize;

pub use certify::{certify, Certification};
pub use fractional::{price, solve_fractional, solve_fractional_with};
pub use instance::{Allocation, SapInstance};
pub use matroid::{solve_matroid_intersection, solve_matroid_intersection_with};
pub use small_bids::{check_small_bids, solve_small_bids, SmallBidsCheck};

/// Utilities at or below this value end the allocation to a part.
pub const UTILITY_FLOOR: f64 = 1e-9;
/// Largest water level tolerated between micro-steps.
pub const LEVEL_LIMIT: f64 = 1.0 + 1e-6;
/// Steps shorter than this count as no progress.
const MIN_STEP: f64 = 1e-12;

/// `g(z) = e^{z−1}`.
pub fn g(z: f64) -> f64 {
    (z - 1.0).exp()
}

/// `G(z) = ∫_0^z g = e^{z−1} − e^{−1}`.
#[allow(non_snake_case)]
pub fn G(z: f64) -> f64 {
    (z - 1.0).exp() - (-1.0f64).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveMode {
    Frac,
    Mi,
    SmallBids,
}

impl std::fmt::Display for SolveMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SolveMode::Frac => "frac",
            SolveMode::Mi => "mi",
            SolveMode::SmallBids => "small-bids",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub step: f64,
    /// Record a row per micro-step; also evaluates the dual objective after
    /// every step, which costs one Lovász evaluation each.
    pub trace: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { step: 1e-3, trace: false }
    }
}

impl SolveOptions {
    pub fn with_step(step: f64) -> Self {
        SolveOptions { step, ..Default::default() }
    }
}

/// Dual variables `(γ, β)` for the capacity function `scale · f`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualCertificate {
    pub gamma: Vec<f64>,
    pub beta: Vec<f64>,
    /// The duals are stated against `scale · f`; below 1 for the small-bids
    /// solver, which runs against a shrunken polymatroid.
    pub scale: f64,
    /// `Σ_k (r_k − r_{k+1}) L_f(G(w^{r_k}))`, the γ-term of the dual
    /// surrogate, when values are not uniform.
    pub surrogate: Option<f64>,
}

impl DualCertificate {
    /// `scale · L_f(γ) + Σ β`.
    pub fn objective(&self, f: &dyn crate::SetFunction) -> crate::Result<f64> {
        Ok(self.scale * crate::submodular::eval_lovasz(f, &self.gamma)? + self.beta.iter().sum::<f64>())
    }

    /// The dual bound used for certification: the surrogate when present,
    /// the plain objective otherwise.
    pub fn bound(&self, f: &dyn crate::SetFunction) -> crate::Result<f64> {
        match self.surrogate {
            Some(s) => Ok(self.scale * s + self.beta.iter().sum::<f64>()),
            None => self.objective(f),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRow {
    pub step: usize,
    pub part: usize,
    pub element: usize,
    pub delta: f64,
    pub primal: f64,
    pub dual: f64,
    pub min_kappa: f64,
}

impl TraceRow {
    pub const CSV_HEADER: &'static str = "step,part,element,delta,primal,dual,min_kappa";

    pub fn csv(&self) -> String {
        format!(
            "{},{},{},{:.17e},{:.17e},{:.17e},{:.17e}",
            self.step, self.part, self.element, self.delta, self.primal, self.dual, self.min_kappa
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveReport {
    pub mode: SolveMode,
    pub primal: f64,
    /// `scale · L_f(γ) + Σβ`.
    pub dual: f64,
    /// Dual bound used for certification (see [`DualCertificate::bound`]).
    pub dual_bound: f64,
    pub kappa: f64,
    /// Upper bound on the offline optimum implied by the certificate.
    pub opt_upper_bound: f64,
    pub certified_ratio: f64,
    pub step: f64,
    /// Small-bids parameter, for the integral solver.
    pub epsilon: Option<f64>,
    pub micro_steps: usize,
    pub reallocations: usize,
    pub max_level: f64,
    /// Largest decrease of any dual variable between consecutive steps.
    pub max_dual_decrease: f64,
    /// Largest `|Δprimal − Δdual| / δ²` over traced steps.
    pub tracking_constant: Option<f64>,
    /// Largest deviation of a reallocation's primal gain from
    /// `b_e (v_e/b_e − v_alt/b_alt) δ'`.
    pub disposal_error: f64,
    pub warnings: Vec<String>,
    #[serde(skip)]
    pub trace: Vec<TraceRow>,
}

pub type SolveOutput = (Allocation, DualCertificate, SolveReport);

/// Smallest `(b_e γ_e + β_{j(e)}) / v_e` over elements of revealed parts.
pub(crate) fn min_kappa(inst: &SapInstance, gamma: &[f64], beta: &[f64], revealed: usize) -> f64 {
    inst.parts[..revealed]
        .iter()
        .enumerate()
        .flat_map(|(j, q)| q.iter().map(move |&e| (inst.costs[e] * gamma[e] + beta[j]) / inst.values[e]))
        .fold(f64::INFINITY, f64::min)
}

/// Tracks dual monotonicity between steps.
pub(crate) fn dual_decrease(old: &[f64], new: &[f64]) -> f64 {
    old.iter().zip(new).map(|(a, b)| a - b).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;
    use std::time::Instant;

    use super::*;
    use crate::submodular::{Graphic, LaminarBudget, LaminarBudgetSpec, LaminarSet, Partition, Uniform};
    use crate::waterlevel::{thresholded_levels, water_levels_alg1};

    /// Part `j` may use slots `j..n`; every slot holds one unit.
    fn upper_triangular(n: usize) -> SapInstance {
        let mut parts = Vec::new();
        let mut slots = vec![Vec::new(); n];
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
        let f = Arc::new(Partition::new(id, slots, vec![1.0; n]).unwrap());
        SapInstance::new(f, vec![1.0; id], vec![1.0; id], parts).unwrap()
    }

    #[test]
    fn price_examples() {
        let f = Arc::new(Uniform::new(2, 1.0).unwrap());
        let inst = SapInstance::new(f.clone(), vec![1.0, 3.0], vec![1.0, 2.0], vec![vec![0, 1]]).unwrap();
        let zero = thresholded_levels(f.as_ref(), &[0.0, 0.0], &inst.costs, &inst.values).unwrap();
        assert!((price(&inst, &zero, 1) - 3.0 / std::f64::consts::E).abs() < 1e-12);
        let full = thresholded_levels(f.as_ref(), &[0.0, 0.5], &inst.costs, &inst.values).unwrap();
        assert!((price(&inst, &full, 1) - 3.0).abs() < 1e-12);
        let half = thresholded_levels(f.as_ref(), &[0.5, 0.0], &inst.costs, &inst.values).unwrap();
        assert!((price(&inst, &half, 0) - (-0.5f64).exp()).abs() < 1e-12);
        assert!((price(&inst, &half, 0) - 0.6065306597).abs() < 1e-9);
    }

    #[test]
    fn two_by_two_upper_triangular() {
        let inst = upper_triangular(2);
        let (alloc, cert, report) = solve_fractional(&inst, 1e-3).unwrap();
        assert!((report.primal - 1.5).abs() < 0.01, "{}", report.primal);
        assert!((alloc.x[0] - 0.5).abs() < 0.01 && (alloc.x[1] - 0.5).abs() < 0.01);
        assert!((alloc.x[2] - 0.5).abs() < 0.01);
        assert!(report.kappa >= 1.0 - (-1.0f64).exp() - 0.01);
        assert!(report.certified_ratio <= 1.0 + 1e-6);
        assert!(report.opt_upper_bound >= 2.0 - 1e-9);
        assert!(report.max_level <= 1.0 + 1e-7);
        assert!(cert.gamma.iter().all(|&g| g >= 0.0));
        let (_, _, mi) = solve_matroid_intersection(&inst, 1e-3).unwrap();
        assert!((mi.primal - report.primal).abs() <= 2e-3 * 2.0);
    }

    #[test]
    fn single_element() {
        let f = Arc::new(Uniform::new(1, 1.0).unwrap());
        let inst = SapInstance::new(f, vec![1.0], vec![1.0], vec![vec![0]]).unwrap();
        let (alloc, _, report) = solve_fractional(&inst, 1e-3).unwrap();
        assert!((alloc.x[0] - 1.0).abs() <= 1e-3);
        assert!((report.primal - 1.0).abs() <= 1e-3);
    }

    #[test]
    fn matroid_examples() {
        let path = Arc::new(Graphic::new(3, vec![(0, 1), (1, 2)]).unwrap());
        let inst = SapInstance::new(path, vec![1.0; 2], vec![1.0; 2], vec![vec![0], vec![1]]).unwrap();
        let (_, _, report) = solve_matroid_intersection(&inst, 1e-3).unwrap();
        assert!((report.primal - 2.0).abs() < 1e-9);

        let rank1 = Arc::new(Uniform::new(2, 1.0).unwrap());
        let inst = SapInstance::new(rank1, vec![1.0; 2], vec![1.0; 2], vec![vec![0], vec![1]]).unwrap();
        let (alloc, _, report) = solve_matroid_intersection(&inst, 1e-3).unwrap();
        assert!((alloc.x[0] - 1.0).abs() < 1e-9 && alloc.x[1].abs() < 1e-9);
        assert!((report.primal - 1.0).abs() < 1e-9);
        let (frac, _, _) = solve_fractional(&inst, 1e-3).unwrap();
        assert_eq!(frac.x, alloc.x);
    }

    #[test]
    fn mi_mode_rejects_weights() {
        let f = Arc::new(Uniform::new(1, 1.0).unwrap());
        let inst = SapInstance::new(f, vec![2.0], vec![1.0], vec![vec![0]]).unwrap();
        assert!(solve_matroid_intersection(&inst, 1e-3).is_err());
    }

    #[test]
    fn free_disposal_prefers_valuable_element() {
        // One unit of capacity; the cheap element arrives first, then an
        // element three times as valuable displaces it.
        let f = Arc::new(Uniform::new(2, 1.0).unwrap());
        let inst = SapInstance::new(f, vec![1.0, 3.0], vec![1.0, 1.0], vec![vec![0], vec![1]]).unwrap();
        let (alloc, _, report) = solve_fractional_with(&inst, SolveOptions { step: 1e-3, trace: true }).unwrap();
        assert!(alloc.x[1] > 0.5);
        assert!(report.reallocations > 0);
        assert!(report.disposal_error < 1e-9);
        assert!(report.max_level <= 1.0 + 1e-7);
        assert!(report.max_dual_decrease <= 1e-9);
        assert!(report.certified_ratio <= 1.0 + 1e-6);
        assert!(report.kappa >= 1.0 - (-1.0f64).exp() - 0.01, "{}", report.kappa);
        let first = solve_fractional_with(&inst, SolveOptions { step: 1e-3, trace: true }).unwrap().2.trace;
        assert_eq!(first, report.trace);
    }

    #[test]
    fn tracking_on_unit_instance() {
        let inst = upper_triangular(4);
        let (alloc, cert, report) = solve_fractional_with(&inst, SolveOptions { step: 1e-3, trace: true }).unwrap();
        assert!((report.primal - report.dual).abs() <= 0.05 * report.primal);
        assert!(report.max_dual_decrease <= 1e-9);
        assert!(report.tracking_constant.unwrap() < 100.0, "{:?}", report.tracking_constant);
        for j in 0..inst.parts.len() {
            assert!(alloc.part_total(&inst, j) <= 1.0 + 1e-9);
        }
        let w = water_levels_alg1(inst.oracle.as_ref(), &alloc.x).unwrap();
        assert!(w.max_level() <= 1.0 + 1e-7);
        assert_eq!(cert.surrogate, None);
    }

    fn adwords(budget: f64, bids: usize) -> SapInstance {
        let spec = LaminarBudgetSpec { sets: vec![LaminarSet { members: (0..bids).collect(), budget }] };
        let f = Arc::new(LaminarBudget::new(bids, &spec).unwrap());
        SapInstance::new(f, vec![1.0; bids], vec![1.0; bids], (0..bids).map(|e| vec![e]).collect()).unwrap()
    }

    #[test]
    fn small_bids_single_bidder() {
        // Budget 10, ten unit bids, ε = 0.1: after nine picks the shrunken
        // budget 9 is full and the last bid sits exactly at level 1.
        let inst = adwords(10.0, 10);
        let (alloc, cert, report) = solve_small_bids(&inst, 0.1).unwrap();
        assert_eq!(alloc.x, [vec![1.0; 9], vec![0.0]].concat());
        assert!((report.primal - 9.0).abs() < 1e-9);
        assert!(report.warnings.is_empty(), "{:?}", report.warnings);
        assert!(report.kappa >= 1.0 - (-1.0f64).exp() - 1e-9);
        assert_eq!(cert.scale, 0.9);
        assert!(alloc.x.iter().all(|&x| x == 0.0 || x == 1.0));

        let roomy = adwords(20.0, 10);
        let (alloc, _, report) = solve_small_bids(&roomy, 0.05).unwrap();
        assert!(alloc.x.iter().all(|&x| x == 1.0));
        assert!(report.warnings.is_empty(), "{:?}", report.warnings);
    }

    #[test]
    fn small_bids_check_witness() {
        let check = check_small_bids(&adwords(10.0, 10), 0.1, 0).unwrap();
        assert!(check.exhaustive && check.holds());
        assert_eq!(check.worst_ratio, 0.1);
        let check = check_small_bids(&adwords(10.0, 10), 0.05, 0).unwrap();
        assert!(!check.holds());
        assert_eq!(check.witness, Some((0, vec![])));
    }

    #[test]
    fn upper_triangular_twenty_is_fast_and_tight() {
        let inst = upper_triangular(20);
        let start = Instant::now();
        let (_, _, report) = solve_fractional(&inst, 1e-3).unwrap();
        let ratio = report.primal / 20.0;
        eprintln!("n=20 ratio {ratio} in {:?} ({} steps)", start.elapsed(), report.micro_steps);
        assert!((0.6221..=0.69).contains(&ratio), "{ratio}");
    }
}
