//! Acceptance checks A1–A10, shared by `polyflow verify` and the test
//! suite. Each check is deterministic given its seed.

use std::sync::Arc;
use std::time::Instant;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::gen::{adwords_upper_triangular, upper_triangular};
use crate::error::Result;
use crate::offline::{brute_force_feasibility, lp_opt_fractional, oswm_opt};
use crate::random::{random_load, random_oracle, random_oswm, random_sap, rng};
use crate::ranking::{monte_carlo_with_opt, perusal_run, ranking_run, trial_seeds};
use crate::set::ElementSet;
use crate::solvers::{check_small_bids, g, solve_fractional, solve_small_bids, SapInstance, G};
use crate::submodular::{
    eval_lovasz, laminar_budget_eval, verify_submodular, DynOracle, LaminarBudget, LaminarBudgetSpec, LaminarSet,
    SetFunction, VerifyMode,
};
use crate::waterlevel::{verify_sua_kkt, water_levels_alg1, water_levels_alg2, water_levels_brute};

const ONE_MINUS_INV_E: f64 = 0.632_120_558_828_557_7;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CheckConfig {
    pub seed: u64,
    /// Smaller sample counts and sizes, for smoke runs.
    pub quick: bool,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig { seed: 2024, quick: false }
    }
}

impl CheckConfig {
    fn count(&self, full: usize, quick: usize) -> usize {
        if self.quick {
            quick
        } else {
            full
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub id: &'static str,
    pub passed: bool,
    pub summary: String,
    pub seconds: f64,
}

impl std::fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} {} ({:.1}s): {}", self.id, if self.passed { "PASS" } else { "FAIL" }, self.seconds, self.summary)
    }
}

pub const CHECK_IDS: [&str; 10] = ["A1", "A2", "A3", "A4", "A5", "A6", "A7", "A8", "A9", "A10"];

pub fn run_check(id: &str, cfg: &CheckConfig) -> Result<CheckOutcome> {
    let start = Instant::now();
    let (id, (passed, summary)) = match id {
        "A1" => ("A1", a1(cfg)?),
        "A2" => ("A2", a2(cfg)?),
        "A3" => ("A3", a3(cfg)?),
        "A4" => ("A4", a4(cfg)?),
        "A5" => ("A5", a5(cfg)?),
        "A6" => ("A6", a6(cfg)?),
        "A7" => ("A7", a7(cfg)?),
        "A8" => ("A8", a8(cfg)?),
        "A9" => ("A9", a9(cfg)?),
        "A10" => ("A10", a10(cfg)?),
        other => return Err(crate::Error::input(format!("unknown check `{other}`"))),
    };
    Ok(CheckOutcome { id, passed, summary, seconds: start.elapsed().as_secs_f64() })
}

pub fn run_all(cfg: &CheckConfig) -> Result<Vec<CheckOutcome>> {
    CHECK_IDS.iter().map(|id| run_check(id, cfg)).collect()
}

type Verdict = (bool, String);

/// Fractional water-filling on upper-triangular instances approaches
/// `1 − 1/e` from above.
fn a1(cfg: &CheckConfig) -> Result<Verdict> {
    let sizes: &[usize] = if cfg.quick { &[5, 10] } else { &[5, 10, 20] };
    let mut ok = true;
    let mut parts = Vec::new();
    for &n in sizes {
        let inst = upper_triangular(n)?.build()?;
        let start = Instant::now();
        let (_, _, report) = solve_fractional(&inst, 1e-3)?;
        let opt = lp_opt_fractional(&inst)?.objective;
        let secs = start.elapsed().as_secs_f64();
        let ratio = report.primal / opt;
        let good = (0.6221..=1.0).contains(&ratio) && secs < 60.0 && (n != 20 || ratio <= 0.69);
        ok &= good;
        parts.push(format!("n={n} ratio={ratio:.4} opt={opt:.3} {secs:.1}s"));
    }
    Ok((ok, parts.join("; ")))
}

fn waterlevel_cases(cfg: &CheckConfig, salt: u64, count: usize, max_n: usize) -> Vec<(DynOracle, Vec<f64>)> {
    let mut r = rng(cfg.seed ^ salt);
    (0..count)
        .map(|_| {
            let n = r.gen_range(1..=max_n);
            (random_oracle(&mut r, n), random_load(&mut r, n))
        })
        .collect()
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

/// Three routes to the water levels agree, and the max–min and min–max
/// orders coincide.
fn a2(cfg: &CheckConfig) -> Result<Verdict> {
    let cases = waterlevel_cases(cfg, 0xA2, cfg.count(200, 40), 10);
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut bad = 0;
    for (f, x) in &cases {
        let w1 = water_levels_alg1(f.as_ref(), x)?.w;
        let w2 = water_levels_alg2(f.as_ref(), x)?.w;
        let brute = water_levels_brute(f.as_ref(), x)?;
        let mut case_ok = true;
        for e in 0..x.len() {
            let b = &brute[e];
            for v in [w2[e], b.max_min, b.min_max] {
                worst = worst.max((w1[e] - v).abs() / w1[e].abs().max(1.0));
                case_ok &= close(w1[e], v, 1e-7);
            }
        }
        bad += usize::from(!case_ok);
    }
    let secs = start.elapsed().as_secs_f64();
    Ok((
        bad == 0 && secs < 120.0,
        format!("{} instances, {bad} disagreements, worst relative gap {worst:.2e}, {secs:.1}s", cases.len()),
    ))
}

/// Duality, monotonicity, feasibility indication, locality and the chain
/// rule on random instances.
fn a3(cfg: &CheckConfig) -> Result<Verdict> {
    let cases = waterlevel_cases(cfg, 0xA3, cfg.count(200, 30), 10);
    let mut r = rng(cfg.seed ^ 0xA3A3);
    let mut fails = [0usize; 5];
    let mut worst_chain = 0.0f64;
    for (f, x0) in &cases {
        let f = f.as_ref();
        let n = x0.len();

        let w = water_levels_alg1(f, x0)?.w;
        let total: f64 = x0.iter().sum();
        if (eval_lovasz(f, &w)? - total).abs() > 1e-8 * total.max(1.0) {
            fails[0] += 1;
        }

        let mut x = x0.clone();
        let mut prev = w.clone();
        for _ in 0..50 {
            let e = r.gen_range(0..n);
            x[e] += r.gen_range(0.0..0.5);
            let next = water_levels_alg1(f, &x)?.w;
            if next.iter().zip(&prev).any(|(a, b)| *a < b - 1e-9 * b.max(1.0)) {
                fails[1] += 1;
                break;
            }
            prev = next;
        }

        if n <= 12 {
            let top = w.iter().copied().fold(0.0, f64::max);
            if top > 0.0 {
                for scale in [0.5, 1.0, 1.01, 2.0] {
                    let y: Vec<f64> = x0.iter().map(|v| v * scale / top).collect();
                    let level_ok = water_levels_alg1(f, &y)?.max_level() <= 1.0 + 1e-9;
                    if level_ok != brute_force_feasibility(f, &y)?.feasible {
                        fails[2] += 1;
                    }
                }
            }
        }

        let e2 = r.gen_range(0..n);
        let mut y = x0.clone();
        y[e2] += 1e-7;
        let wy = water_levels_alg1(f, &y)?.w;
        for e1 in 0..n {
            if (w[e1] - w[e2]).abs() > 1e-4 && (wy[e1] - w[e1]).abs() > 1e-9 {
                fails[3] += 1;
                break;
            }
        }

        let e = r.gen_range(0..n);
        let h = 1e-6;
        let mut y = x0.clone();
        y[e] += h;
        let lg = |w: &[f64]| eval_lovasz(f, &w.iter().map(|&z| G(z)).collect::<Vec<_>>());
        let slope = (lg(&water_levels_alg1(f, &y)?.w)? - lg(&w)?) / h;
        let gap = (slope - g(w[e])).abs() / g(w[e]).max(1.0);
        worst_chain = worst_chain.max(gap);
        if gap > 1e-4 {
            fails[4] += 1;
        }
    }
    let names = ["duality", "monotonicity", "feasibility", "locality", "chain-rule"];
    let summary = names.iter().zip(&fails).map(|(n, f)| format!("{n}:{f}")).collect::<Vec<_>>().join(" ");
    Ok((
        fails.iter().all(|&f| f == 0),
        format!("{} instances, failures {summary}, worst relative chain-rule gap {worst_chain:.1e}", cases.len()),
    ))
}

/// The decomposition solves the market program (KKT conditions hold).
fn a4(cfg: &CheckConfig) -> Result<Verdict> {
    let cases = waterlevel_cases(cfg, 0xA2, cfg.count(200, 40), 10);
    let mut bad = Vec::new();
    for (k, (f, x)) in cases.iter().enumerate() {
        let dec = water_levels_alg1(f.as_ref(), x)?;
        let rep = verify_sua_kkt(f.as_ref(), x, &dec)?;
        if !rep.passed() {
            bad.push(format!("#{k}: {}", rep.witness.unwrap_or_default()));
        }
    }
    Ok((bad.is_empty(), format!("{} decompositions, {} failures {}", cases.len(), bad.len(), bad.join("; "))))
}

/// Ranking reaches `1 − 1/e` in expectation; one agent is always optimal.
fn a5(cfg: &CheckConfig) -> Result<Verdict> {
    let mut r = rng(cfg.seed ^ 0xA5);
    let trials = cfg.count(2000, 200) as u64;
    let start = Instant::now();
    let mut worst: f64 = f64::INFINITY;
    let mut ok = true;
    let count = cfg.count(20, 5);
    for k in 0..count {
        let (agents, items) = (r.gen_range(2..=8), r.gen_range(2..=8));
        let inst = random_oswm(&mut r, agents, items);
        let (_, opt) = oswm_opt(&inst)?;
        let mc = monte_carlo_with_opt(&inst, trials, cfg.seed + k as u64, opt)?;
        let bar = 0.62f64.max(ONE_MINUS_INV_E - 3.0 * mc.std_error);
        ok &= mc.mean_ratio >= bar;
        worst = worst.min(mc.mean_ratio);
    }
    let mut single_ok = true;
    for k in 0..5 {
        let items = r.gen_range(1..=8);
        let inst = random_oswm(&mut r, 1, items);
        let (_, opt) = oswm_opt(&inst)?;
        let mc = monte_carlo_with_opt(&inst, trials.min(200), cfg.seed + 100 + k, opt)?;
        single_ok &= mc.rows.iter().all(|row| row.welfare == opt);
    }
    let secs = start.elapsed().as_secs_f64();
    Ok((
        ok && single_ok && secs < 300.0,
        format!(
            "{count} instances x {trials} trials, worst mean ratio {worst:.4}, single-agent exact: {single_ok}, {secs:.1}s"
        ),
    ))
}

/// Perusal order reproduces the online assignment.
fn a6(cfg: &CheckConfig) -> Result<Verdict> {
    let mut r = rng(cfg.seed ^ 0xA6);
    let count = cfg.count(500, 100);
    let mut agree = 0;
    for k in 0..count {
        let (agents, items) = (r.gen_range(1..=6), r.gen_range(1..=8));
        let inst = random_oswm(&mut r, agents, items);
        let seeds = trial_seeds(inst.agents.len(), cfg.seed, k as u64);
        if ranking_run(&inst, &seeds)?.assignment == perusal_run(&inst, &seeds)?.assignment {
            agree += 1;
        }
    }
    Ok((agree == count, format!("{agree}/{count} identical assignments")))
}

/// Random AdWords instance with at most `max_n` edges and budgets at least
/// `ratio` times every bid of the bidder.
fn random_adwords(r: &mut ChaCha8Rng, max_n: usize, ratio: f64) -> Result<SapInstance> {
    let bidders = r.gen_range(1..=3usize);
    let mut edges_of = vec![Vec::new(); bidders];
    let mut bids = Vec::new();
    let mut parts = Vec::new();
    while bids.len() < max_n {
        let want = r.gen_range(1..=bidders).min(max_n - bids.len());
        let mut part = Vec::new();
        for i in rand::seq::index::sample(r, bidders, want) {
            edges_of[i].push(bids.len());
            part.push(bids.len());
            bids.push(r.gen_range(0.5..1.0));
        }
        parts.push(part);
        if r.gen_bool(0.15) {
            break;
        }
    }
    let sets = edges_of
        .into_iter()
        .filter(|m| !m.is_empty())
        .map(|members| {
            let top = members.iter().map(|&e| bids[e]).fold(0.0, f64::max);
            LaminarSet { members, budget: ratio * top }
        })
        .collect();
    let n = bids.len();
    let f: DynOracle = Arc::new(LaminarBudget::new(n, &LaminarBudgetSpec { sets })?);
    SapInstance::new(f, bids.clone(), bids, parts)
}

/// Integral small-bids allocation stays feasible and near `1 − 1/e`.
fn a7(cfg: &CheckConfig) -> Result<Verdict> {
    let eps = 0.05;
    let mut r = rng(cfg.seed ^ 0xA7);
    let mut instances = Vec::new();
    for _ in 0..cfg.count(30, 8) {
        instances.push(("random".to_string(), random_adwords(&mut r, 14, 1.0 / eps)?));
    }
    let binding: &[usize] = if cfg.quick { &[2] } else { &[2, 3, 4] };
    for &k in binding {
        instances.push((format!("upper-triangular-{k}x20"), adwords_upper_triangular(k, 20)?.build()?));
    }
    let bar = (1.0 - 2.0 * eps) * ONE_MINUS_INV_E;
    let mut ok = true;
    let mut worst = (f64::INFINITY, f64::INFINITY);
    let mut notes = Vec::new();
    for (name, inst) in &instances {
        let check = check_small_bids(inst, eps, cfg.seed)?;
        let (alloc, _, report) = solve_small_bids(inst, eps)?;
        let feasible = water_levels_alg1(inst.oracle.as_ref(), &inst.load(&alloc.x))?.max_level() <= 1.0 + 1e-9;
        let opt = lp_opt_fractional(inst)?.objective;
        let ratio = report.primal / opt;
        let good = check.holds() && feasible && ratio >= bar && report.kappa >= ONE_MINUS_INV_E - 2.0 * eps;
        if !good {
            notes.push(format!("{name}: ratio {ratio:.4} kappa {:.4} feasible {feasible}", report.kappa));
        }
        if name != "random" {
            notes.push(format!("{name}: ratio {ratio:.4}"));
        }
        ok &= good;
        worst = (worst.0.min(ratio), worst.1.min(report.kappa));
    }
    Ok((
        ok,
        format!(
            "{} instances, worst ratio {:.4} (bar {bar:.4}), worst kappa {:.4}; {}",
            instances.len(),
            worst.0,
            worst.1,
            notes.join("; ")
        ),
    ))
}

/// Water levels move by at most `ε t` under a single-coordinate increase.
fn a8(cfg: &CheckConfig) -> Result<Verdict> {
    let mut r = rng(cfg.seed ^ 0xA8);
    let mut instances = Vec::new();
    for _ in 0..10 {
        instances.push(random_adwords(&mut r, 14, 20.0)?);
    }
    instances.push(adwords_upper_triangular(2, 20)?.build()?);
    let trials = cfg.count(100, 30);
    let mut worst = f64::NEG_INFINITY;
    for k in 0..trials {
        let inst = &instances[k % instances.len()];
        let eps = check_small_bids(inst, 1.0, cfg.seed)?.worst_ratio;
        let n = inst.len();
        let x: Vec<f64> = (0..n).map(|_| if r.gen_bool(0.5) { r.gen_range(0.0..1.0) } else { 0.0 }).collect();
        let e = r.gen_range(0..n);
        let t = r.gen_range(0.0..2.0);
        let mut y = x.clone();
        y[e] += t;
        let f = inst.oracle.as_ref();
        let wx = water_levels_alg1(f, &inst.load(&x))?.w;
        let wy = water_levels_alg1(f, &inst.load(&y))?.w;
        let moved = wx.iter().zip(&wy).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        worst = worst.max(moved - eps * t);
    }
    Ok((worst <= 1e-9, format!("{trials} increases, worst excess over eps*t {worst:.2e}")))
}

/// Random laminar family with at most `max_sets` sets over `n` elements; the
/// root is always present so every element is covered.
fn random_family(r: &mut ChaCha8Rng, n: usize, max_sets: usize) -> LaminarBudgetSpec {
    fn split(r: &mut ChaCha8Rng, members: Vec<usize>, sets: &mut Vec<LaminarSet>, max_sets: usize, root: bool) {
        if sets.len() >= max_sets {
            return;
        }
        if root || r.gen_bool(0.7) {
            sets.push(LaminarSet { members: members.clone(), budget: r.gen_range(0.1..3.0) });
        }
        if members.len() > 1 {
            let cut = r.gen_range(1..members.len());
            let (a, b) = members.split_at(cut);
            split(r, a.to_vec(), sets, max_sets, false);
            split(r, b.to_vec(), sets, max_sets, false);
        }
    }
    let mut sets = Vec::new();
    split(r, (0..n).collect(), &mut sets, max_sets, true);
    LaminarBudgetSpec { sets }
}

/// `min Σ B_T` over subfamilies covering `set`, by enumeration.
fn cover_by_enumeration(spec: &LaminarBudgetSpec, set: &[usize]) -> f64 {
    let k = spec.sets.len();
    (0..1u32 << k)
        .filter(|mask| set.iter().all(|e| (0..k).any(|i| mask >> i & 1 == 1 && spec.sets[i].members.contains(e))))
        .map(|mask| (0..k).filter(|i| mask >> i & 1 == 1).map(|i| spec.sets[i].budget).sum::<f64>())
        .fold(f64::INFINITY, f64::min)
}

/// Laminar budget functions match brute-force covers and are submodular.
fn a9(cfg: &CheckConfig) -> Result<Verdict> {
    let mut r = rng(cfg.seed ^ 0xA9);
    let count = cfg.count(100, 25);
    let mut mismatches = 0;
    let mut not_submodular = 0;
    for _ in 0..count {
        let n = r.gen_range(1..=8);
        let spec = random_family(&mut r, n, 10);
        let oracle = LaminarBudget::new(n, &spec)?;
        for mask in 0..1u64 << n {
            let set = ElementSet::from_mask(n, mask).to_vec();
            let truth = if set.is_empty() { 0.0 } else { cover_by_enumeration(&spec, &set) };
            let fast = laminar_budget_eval(&spec, &set)?;
            let via_oracle = oracle.eval(&ElementSet::from_mask(n, mask));
            if !close(truth, fast, 1e-9) || !close(truth, via_oracle, 1e-9) {
                mismatches += 1;
            }
        }
        if !verify_submodular(&oracle, VerifyMode::Exhaustive)?.passed {
            not_submodular += 1;
        }
    }
    Ok((
        mismatches == 0 && not_submodular == 0,
        format!("{count} families, {mismatches} value mismatches, {not_submodular} submodularity failures"),
    ))
}

/// With unit values, primal and dual objectives track each other.
fn a10(cfg: &CheckConfig) -> Result<Verdict> {
    let mut r = rng(cfg.seed ^ 0xA10);
    let mut instances: Vec<(String, SapInstance)> = Vec::new();
    for n in [2, 4, 8] {
        instances.push((format!("upper-triangular-{n}"), upper_triangular(n)?.build()?));
    }
    for _ in 0..cfg.count(10, 4) {
        let n = r.gen_range(2..=10);
        instances.push(("random".into(), random_sap(&mut r, n, true)));
    }
    let mut worst = 0.0f64;
    for (_, inst) in &instances {
        let (_, _, report) = solve_fractional(inst, 1e-3)?;
        if report.primal > 0.0 {
            worst = worst.max((report.primal - report.dual).abs() / report.primal);
        }
    }
    Ok((worst <= 0.05, format!("{} instances, worst |primal - dual|/primal {worst:.2e}", instances.len())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumeration_cover_examples() {
        let spec = LaminarBudgetSpec {
            sets: vec![
                LaminarSet { members: vec![0, 1, 2], budget: 2.0 },
                LaminarSet { members: vec![0], budget: 0.5 },
                LaminarSet { members: vec![1], budget: 0.7 },
            ],
        };
        assert_eq!(cover_by_enumeration(&spec, &[0]), 0.5);
        assert_eq!(cover_by_enumeration(&spec, &[0, 1]), 1.2);
        assert_eq!(cover_by_enumeration(&spec, &[0, 2]), 2.0);
    }

    #[test]
    fn random_families_are_laminar_and_small() {
        let mut r = rng(1);
        for _ in 0..50 {
            let n = r.gen_range(1..=8);
            let spec = random_family(&mut r, n, 10);
            assert!(spec.sets.len() <= 10);
            LaminarBudget::new(n, &spec).unwrap();
        }
    }

    #[test]
    fn quick_checks_pass() {
        let cfg = CheckConfig { seed: 7, quick: true };
        for id in ["A2", "A4", "A6", "A9", "A10"] {
            let out = run_check(id, &cfg).unwrap();
            assert!(out.passed, "{out}");
        }
    }
}
