//! Solver-by-instance experiment runs.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::instance::InstanceFile;
use super::json::to_canonical;
use crate::error::{Error, Result};
use crate::offline::{lp_opt_fractional, oswm_opt};
use crate::ranking::monte_carlo_with_opt;
use crate::solvers::{solve_fractional, solve_matroid_intersection, solve_small_bids, SapInstance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Solver {
    Frac,
    Mi,
    SmallBids,
    Ranking,
}

impl Solver {
    pub const ALL: [Solver; 4] = [Solver::Frac, Solver::Mi, Solver::SmallBids, Solver::Ranking];

    pub fn name(self) -> &'static str {
        match self {
            Solver::Frac => "frac",
            Solver::Mi => "mi",
            Solver::SmallBids => "small-bids",
            Solver::Ranking => "ranking",
        }
    }
}

impl std::str::FromStr for Solver {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Solver::ALL.into_iter().find(|v| v.name() == s).ok_or_else(|| Error::input(format!("unknown solver `{s}`")))
    }
}

impl std::fmt::Display for Solver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

fn default_step() -> f64 {
    1e-3
}
fn default_eps() -> f64 {
    0.05
}
fn default_trials() -> u64 {
    2000
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteEntry {
    pub id: String,
    /// Relative paths resolve against the manifest's directory.
    pub path: PathBuf,
}

/// Suite manifest: instances plus the minimum ratio each solver must reach.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Suite {
    #[serde(default)]
    pub instances: Vec<SuiteEntry>,
    #[serde(default)]
    pub thresholds: BTreeMap<Solver, f64>,
    #[serde(default = "default_step")]
    pub step: f64,
    #[serde(default = "default_eps")]
    pub eps: f64,
    #[serde(default = "default_trials")]
    pub trials: u64,
    #[serde(default)]
    pub seed: u64,
}

impl Suite {
    pub fn read(path: &Path) -> Result<(Self, PathBuf)> {
        let suite: Suite = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok((suite, base))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub instance: String,
    pub solver: Solver,
    pub parameters: String,
    pub primal: f64,
    pub opt: f64,
    pub ratio: f64,
    pub certified_ratio: Option<f64>,
    pub std_error: Option<f64>,
    pub wall_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Default)]
pub struct ExperimentReport {
    pub rows: Vec<BenchRow>,
    /// Rows whose ratio fell below the suite threshold.
    pub failures: Vec<String>,
    /// Solver/instance pairs that do not fit together.
    pub skipped: Vec<String>,
}

impl ExperimentReport {
    pub const CSV_HEADER: &'static str =
        "instance,solver,parameters,primal,opt,ratio,certified_ratio,std_error,wall_ms";

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn to_csv(&self) -> String {
        let opt = |v: Option<f64>| v.map_or(String::new(), |x| x.to_string());
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{:.3}\n",
                r.instance,
                r.solver,
                r.parameters,
                r.primal,
                r.opt,
                r.ratio,
                opt(r.certified_ratio),
                opt(r.std_error),
                r.wall_ms
            ));
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        to_canonical(self)
    }
}

enum Loaded {
    Sap(SapInstance),
    Oswm(crate::ranking::OswmInstance),
}

fn fits(solver: Solver, inst: &Loaded) -> bool {
    match (solver, inst) {
        (Solver::Frac, Loaded::Sap(_)) => true,
        (Solver::Mi, Loaded::Sap(s)) => s.is_unit(),
        (Solver::SmallBids, Loaded::Sap(s)) => s.values == s.costs,
        (Solver::Ranking, Loaded::Oswm(_)) => true,
        _ => false,
    }
}

fn run_one(suite: &Suite, id: &str, inst: &Loaded, opt: f64, solver: Solver) -> Result<BenchRow> {
    let start = Instant::now();
    let (parameters, primal, certified, stderr) = match (solver, inst) {
        (Solver::Frac, Loaded::Sap(s)) => {
            let r = solve_fractional(s, suite.step)?.2;
            (format!("step={}", suite.step), r.primal, Some(r.certified_ratio), None)
        }
        (Solver::Mi, Loaded::Sap(s)) => {
            let r = solve_matroid_intersection(s, suite.step)?.2;
            (format!("step={}", suite.step), r.primal, Some(r.certified_ratio), None)
        }
        (Solver::SmallBids, Loaded::Sap(s)) => {
            let r = solve_small_bids(s, suite.eps)?.2;
            (format!("eps={}", suite.eps), r.primal, Some(r.certified_ratio), None)
        }
        (Solver::Ranking, Loaded::Oswm(o)) => {
            let mc = monte_carlo_with_opt(o, suite.trials, suite.seed, opt)?;
            (format!("trials={} seed={}", suite.trials, suite.seed), mc.mean_ratio * opt, None, Some(mc.std_error))
        }
        _ => unreachable!("pairs are filtered by fits()"),
    };
    let ratio = if opt > 0.0 { primal / opt } else { 1.0 };
    Ok(BenchRow {
        instance: id.to_string(),
        solver,
        parameters,
        primal,
        opt,
        ratio,
        certified_ratio: certified,
        std_error: stderr,
        wall_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

/// Runs every fitting solver on every instance, computing offline optima
/// once per instance. Rows come out sorted by instance id, then solver.
pub fn bench(suite: &Suite, base: &Path, solvers: &[Solver]) -> Result<ExperimentReport> {
    let loaded = suite
        .instances
        .par_iter()
        .map(|entry| {
            let path = if entry.path.is_absolute() { entry.path.clone() } else { base.join(&entry.path) };
            let inst = match InstanceFile::read(&path)? {
                InstanceFile::Sap(s) => Loaded::Sap(s.build()?),
                InstanceFile::Oswm(o) => Loaded::Oswm(o.build()?),
            };
            let opt = match &inst {
                Loaded::Sap(s) => lp_opt_fractional(s)?.objective,
                Loaded::Oswm(o) => oswm_opt(o)?.1,
            };
            Ok((entry.id.clone(), inst, opt))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut report = ExperimentReport::default();
    let mut jobs = Vec::new();
    for (k, (id, inst, _)) in loaded.iter().enumerate() {
        for &s in solvers {
            if fits(s, inst) {
                jobs.push((k, s));
            } else {
                report.skipped.push(format!("{id}/{s}"));
            }
        }
    }
    let mut rows = jobs
        .par_iter()
        .map(|&(k, s)| {
            let (id, inst, opt) = &loaded[k];
            run_one(suite, id, inst, *opt, s)
        })
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by(|a, b| a.instance.cmp(&b.instance).then(a.solver.cmp(&b.solver)));
    for r in &rows {
        if let Some(&min) = suite.thresholds.get(&r.solver) {
            if r.ratio < min {
                report.failures.push(format!("{}/{}: ratio {:.6} below {min}", r.instance, r.solver, r.ratio));
            }
        }
    }
    report.rows = rows;
    report.skipped.sort();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::gen::{generate, Family};

    #[test]
    fn empty_suite() {
        let suite: Suite = serde_json::from_str("{}").unwrap();
        let report = bench(&suite, Path::new("."), &Solver::ALL).unwrap();
        assert!(report.rows.is_empty() && report.passed());
        assert_eq!(report.to_csv().lines().count(), 1);
    }

    #[test]
    fn small_suite_with_threshold() {
        let dir = tempfile::tempdir().unwrap();
        let mut instances = Vec::new();
        for n in [2, 3] {
            let name = format!("ut{n}.json");
            generate(&Family::UpperTriangular { n }).unwrap().write(&dir.path().join(&name)).unwrap();
            instances.push(SuiteEntry { id: format!("ut-{n}"), path: name.into() });
        }
        generate(&Family::RankingUpperTriangular { n: 3 }).unwrap().write(&dir.path().join("rk.json")).unwrap();
        instances.push(SuiteEntry { id: "rk-3".into(), path: "rk.json".into() });
        let mut suite = Suite {
            instances,
            thresholds: BTreeMap::from([(Solver::Frac, 0.6221)]),
            step: 1e-3,
            eps: 0.05,
            trials: 50,
            seed: 3,
        };
        let report = bench(&suite, dir.path(), &[Solver::Frac, Solver::Mi, Solver::Ranking]).unwrap();
        assert!(report.passed(), "{:?}", report.failures);
        let keys: Vec<(String, Solver)> = report.rows.iter().map(|r| (r.instance.clone(), r.solver)).collect();
        assert_eq!(
            keys,
            vec![
                ("rk-3".into(), Solver::Ranking),
                ("ut-2".into(), Solver::Frac),
                ("ut-2".into(), Solver::Mi),
                ("ut-3".into(), Solver::Frac),
                ("ut-3".into(), Solver::Mi),
            ]
        );
        assert_eq!(report.skipped, vec!["rk-3/frac", "rk-3/mi", "ut-2/ranking", "ut-3/ranking"]);
        for r in &report.rows {
            assert!((r.ratio - r.primal / r.opt).abs() < 1e-9);
        }
        suite.thresholds.insert(Solver::Frac, 0.9);
        assert!(!bench(&suite, dir.path(), &[Solver::Frac]).unwrap().passed());
    }
}
