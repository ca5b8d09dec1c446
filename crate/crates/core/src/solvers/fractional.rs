//! Water-filling with free disposal for arbitrary values and costs.

use super::{
    certify, dual_decrease, g, min_kappa, Allocation, DualCertificate, SapInstance, SolveMode, SolveOptions,
    SolveOutput, SolveReport, TraceRow, G, LEVEL_LIMIT, MIN_STEP, UTILITY_FLOOR,
};
use crate::error::{Error, Result};
use crate::set::ElementSet;
use crate::submodular::sfm::{sfm_min_constrained, Backend, ShiftedProblem};
use crate::submodular::{component_index, eval_lovasz, SetFunction};
use crate::tol::tight_slack;
use crate::waterlevel::{thresholded_levels, ThresholdedLevels};

/// `p_e = b_e ∫_0^{v_e/b_e} g(w^t_e) dt`.
pub fn price(inst: &SapInstance, tl: &ThresholdedLevels, e: usize) -> f64 {
    let b = inst.costs[e];
    b * tl.integrate(e, inst.values[e] / b, g)
}

/// `γ_e = ∫_0^∞ G(w^t_e) dt` for every element.
pub(crate) fn gamma_from(tl: &ThresholdedLevels, n: usize) -> Vec<f64> {
    let mut gamma = vec![0.0; n];
    let ratios: Vec<f64> = tl.ratios().collect();
    for (k, level) in tl.levels.iter().take(ratios.len()).enumerate() {
        let len = ratios[k] - ratios.get(k + 1).copied().unwrap_or(0.0);
        for (gm, &w) in gamma.iter_mut().zip(&level.decomposition.w) {
            *gm += len * G(w);
        }
    }
    gamma
}

/// `Σ_k (r_k − r_{k+1}) L_f(G(w^{r_k}))`.
pub(crate) fn surrogate_term(f: &dyn SetFunction, tl: &ThresholdedLevels) -> Result<f64> {
    let mut err = None;
    let total = tl.weighted_sum(|dec| {
        let gw: Vec<f64> = dec.w.iter().map(|&w| G(w)).collect();
        eval_lovasz(f, &gw).unwrap_or_else(|e| {
            err.get_or_insert(e);
            0.0
        })
    });
    match err {
        Some(e) => Err(e),
        None => Ok(total),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Dispatch {
    MaxUtility,
    MinLevel,
}

pub fn solve_fractional(inst: &SapInstance, step: f64) -> Result<SolveOutput> {
    solve_fractional_with(inst, SolveOptions::with_step(step))
}

pub fn solve_fractional_with(inst: &SapInstance, opts: SolveOptions) -> Result<SolveOutput> {
    run(inst, opts, Dispatch::MaxUtility)
}

pub(crate) fn run(inst: &SapInstance, opts: SolveOptions, dispatch: Dispatch) -> Result<SolveOutput> {
    if !(opts.step.is_finite() && opts.step > 0.0) {
        return Err(Error::input("step must be positive"));
    }
    let f = inst.oracle.as_ref();
    let n = inst.len();
    let (b, v) = (&inst.costs, &inst.values);
    let (comps, index) = component_index(f);
    let comp_caps: Vec<f64> =
        comps.iter().map(|c| tight_slack(f.eval(&ElementSet::from_elements(n, c.iter().copied())))).collect();
    let empty = ElementSet::empty(n);
    let ratio = |e: usize| v[e] / b[e];
    let guard = (1000.0 / opts.step).ceil() as usize + 10_000;

    let mut alloc = Allocation::zeros(n);
    let mut beta = vec![0.0; inst.parts.len()];
    let mut tl = thresholded_levels(f, &alloc.x, b, v)?;
    let mut gamma = gamma_from(&tl, n);
    let mut primal = 0.0;
    let mut dual = 0.0;
    let mut steps = 0;
    let mut reallocations = 0;
    let mut max_level = tl.base().max_level();
    let mut max_decrease: f64 = 0.0;
    let mut disposal_error: f64 = 0.0;
    let mut tracking: Option<f64> = None;
    let mut trace = Vec::new();

    for (j, part) in inst.parts.iter().enumerate() {
        alloc.revealed = j + 1;
        let mut members = part.clone();
        members.sort_unstable();
        let mut saturated = vec![false; n];
        let mut part_steps = 0;
        loop {
            let remaining = 1.0 - alloc.part_total(inst, j);
            if remaining <= MIN_STEP {
                break;
            }
            let mut best: Option<(usize, f64, f64)> = None;
            for &e in members.iter().filter(|&&e| !saturated[e]) {
                let p = price(inst, &tl, e);
                let u = v[e] - p;
                let better = match (dispatch, best) {
                    (_, None) => true,
                    (Dispatch::MaxUtility, Some((_, bu, _))) => u > bu,
                    (Dispatch::MinLevel, Some((be, _, _))) => tl.base().w[e] < tl.base().w[be],
                };
                if better {
                    best = Some((e, u, p));
                }
            }
            let Some((e, utility, p_e)) = best else { break };
            if utility <= UTILITY_FLOOR {
                break;
            }
            part_steps += 1;
            if part_steps > guard {
                return Err(Error::invariant(format!("part {j} made no progress after {guard} micro-steps")));
            }

            let load = inst.load(&alloc.x);
            let comp = &comps[index[e]];
            let problem = ShiftedProblem::new(f, 1.0, &load, &empty, comp);
            let through_e = sfm_min_constrained(&problem, &[e], &[], Backend::Auto)?;
            let mut delta = opts.step;
            let mut alt = None;
            if through_e.value > comp_caps[index[e]] {
                delta = delta.min(through_e.value / b[e]).min(remaining);
            } else {
                let a = *through_e
                    .minimal
                    .iter()
                    .min_by(|&&p, &&q| ratio(p).total_cmp(&ratio(q)).then(p.cmp(&q)))
                    .expect("tight set through e contains e");
                if a == e || ratio(a) >= ratio(e) - 1e-12 * ratio(e).max(1.0) {
                    saturated[e] = true;
                    continue;
                }
                let freed = sfm_min_constrained(&problem, &[e], &[a], Backend::Auto)?.value.max(0.0);
                delta = delta.min(alloc.x[a] * b[a] / b[e]).min(freed / b[e]);
                let growth = if inst.part_of(a) == j { 1.0 - b[e] / b[a] } else { 1.0 };
                if growth > 0.0 {
                    delta = delta.min(remaining / growth);
                }
                alt = Some(a);
            }
            if delta < MIN_STEP {
                saturated[e] = true;
                continue;
            }

            alloc.x[e] += delta;
            if let Some(a) = alt {
                alloc.x[a] = (alloc.x[a] - b[e] / b[a] * delta).max(0.0);
                reallocations += 1;
            }
            let new_primal = inst.primal(&alloc.x);
            if let Some(a) = alt {
                let expected = b[e] * (ratio(e) - ratio(a)) * delta;
                disposal_error = disposal_error.max((new_primal - primal - expected).abs());
            }
            let dprimal = new_primal - primal;
            primal = new_primal;
            beta[j] += utility * delta;
            debug_assert!(p_e >= 0.0);

            tl = thresholded_levels(f, &alloc.x, b, v)?;
            let level = tl.base().max_level();
            max_level = max_level.max(level);
            if level > LEVEL_LIMIT {
                return Err(Error::invariant(format!(
                    "water level {level} exceeds 1 after allocating {delta} to element {e} in part {j}"
                )));
            }
            let new_gamma = gamma_from(&tl, n);
            max_decrease = max_decrease.max(dual_decrease(&gamma, &new_gamma));
            gamma = new_gamma;
            steps += 1;

            if opts.trace {
                let new_dual = eval_lovasz(f, &gamma)? + beta.iter().sum::<f64>();
                if inst.is_unit() {
                    let c = ((dprimal - (new_dual - dual)) / (opts.step * opts.step)).abs();
                    tracking = Some(tracking.map_or(c, |t: f64| t.max(c)));
                }
                dual = new_dual;
                trace.push(TraceRow {
                    step: steps,
                    part: j,
                    element: e,
                    delta,
                    primal,
                    dual,
                    min_kappa: min_kappa(inst, &gamma, &beta, j + 1),
                });
            }
        }
    }

    let ratios = tl.ratios().count();
    let surrogate = if ratios > 1 { Some(surrogate_term(f, &tl)?) } else { None };
    let cert = DualCertificate { gamma, beta, scale: 1.0, surrogate };
    let mode = match dispatch {
        Dispatch::MaxUtility => SolveMode::Frac,
        Dispatch::MinLevel => SolveMode::Mi,
    };
    let report = finish_report(inst, &alloc, &cert, mode, opts.step, steps, reallocations, max_level)?;
    Ok((
        alloc,
        cert,
        SolveReport { max_dual_decrease: max_decrease, tracking_constant: tracking, disposal_error, trace, ..report },
    ))
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn finish_report(
    inst: &SapInstance,
    alloc: &Allocation,
    cert: &DualCertificate,
    mode: SolveMode,
    step: f64,
    micro_steps: usize,
    reallocations: usize,
    max_level: f64,
) -> Result<SolveReport> {
    let f = inst.oracle.as_ref();
    let c = certify(inst, &alloc.x, cert)?;
    Ok(SolveReport {
        mode,
        primal: inst.primal(&alloc.x),
        dual: cert.objective(f)?,
        dual_bound: c.dual_bound,
        kappa: c.kappa,
        opt_upper_bound: c.opt_upper_bound,
        certified_ratio: c.ratio,
        step,
        epsilon: None,
        micro_steps,
        reallocations,
        max_level,
        max_dual_decrease: 0.0,
        tracking_constant: None,
        disposal_error: 0.0,
        warnings: Vec::new(),
        trace: Vec::new(),
    })
}
