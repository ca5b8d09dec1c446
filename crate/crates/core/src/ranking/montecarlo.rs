use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{ranking_run, OswmInstance};
use crate::error::{Error, Result};
use crate::offline::oswm_opt;

/// SplitMix64 finalizer applied to `master + (trial + 1)·φ`; distinct trials
/// get decorrelated seeds independent of scheduling.
pub fn trial_seed(master: u64, trial: u64) -> u64 {
    let mut z = master.wrapping_add(trial.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Uniform agent seeds for one trial.
pub fn trial_seeds(agents: usize, master: u64, trial: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(master, trial));
    (0..agents).map(|_| rng.gen::<f64>()).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRow {
    pub trial: u64,
    pub seed_hash: u64,
    pub welfare: f64,
    pub opt: f64,
    pub ratio: f64,
}

impl TrialRow {
    pub const CSV_HEADER: &'static str = "trial,seed_hash,welfare,opt,ratio";

    pub fn csv(&self) -> String {
        format!("{},{:016x},{:.17e},{:.17e},{:.17e}", self.trial, self.seed_hash, self.welfare, self.opt, self.ratio)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonteCarlo {
    pub trials: u64,
    pub master_seed: u64,
    pub opt: f64,
    pub mean_ratio: f64,
    pub std_error: f64,
    #[serde(skip)]
    pub rows: Vec<TrialRow>,
}

pub fn monte_carlo_ratio(inst: &OswmInstance, trials: u64, seed: u64) -> Result<MonteCarlo> {
    let (_, opt) = oswm_opt(inst)?;
    monte_carlo_with_opt(inst, trials, seed, opt)
}

/// Mean and standard error of `welfare / opt` over independent trials; an
/// instance with `opt = 0` has ratio 1 in every trial.
pub fn monte_carlo_with_opt(inst: &OswmInstance, trials: u64, seed: u64, opt: f64) -> Result<MonteCarlo> {
    if trials == 0 {
        return Err(Error::input("at least one trial is needed"));
    }
    let rows = (0..trials)
        .into_par_iter()
        .map(|t| {
            let seeds = trial_seeds(inst.agents.len(), seed, t);
            let run = ranking_run(inst, &seeds)?;
            let ratio = if opt > 0.0 { run.welfare / opt } else { 1.0 };
            Ok(TrialRow { trial: t, seed_hash: trial_seed(seed, t), welfare: run.welfare, opt, ratio })
        })
        .collect::<Result<Vec<_>>>()?;
    let k = rows.len() as f64;
    let mean = rows.iter().map(|r| r.ratio).sum::<f64>() / k;
    let var = if rows.len() > 1 { rows.iter().map(|r| (r.ratio - mean).powi(2)).sum::<f64>() / (k - 1.0) } else { 0.0 };
    Ok(MonteCarlo { trials, master_seed: seed, opt, mean_ratio: mean, std_error: (var / k).sqrt(), rows })
}
