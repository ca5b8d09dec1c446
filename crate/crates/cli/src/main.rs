//! `polyflow` command-line front end.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use polyflow::harness::{
    bench, generate, run_check, CheckConfig, ExperimentReport, Family, Graph, InstanceFile, Solver, Suite, CHECK_IDS,
};
use polyflow::offline::{lp_opt_fractional_with, oswm_opt, LpBackend};
use polyflow::ranking::{monte_carlo_with_opt, TrialRow};
use polyflow::solvers::{
    solve_fractional_with, solve_matroid_intersection_with, solve_small_bids, SapInstance, SolveMode, SolveOptions,
    TraceRow,
};
use polyflow::submodular::eval_lovasz;
use polyflow::waterlevel::{verify_sua_kkt, water_levels_alg1, water_levels_alg2, water_levels_brute, BRUTE_MAX_N};
use polyflow::Error;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "polyflow", version, about = "Water levels and online assignment over polymatroids")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a generated instance as canonical JSON.
    Gen {
        #[command(subcommand)]
        family: GenFamily,
        /// Output path; stdout when omitted.
        #[arg(long, global = true)]
        out: Option<PathBuf>,
    },
    /// Water levels of a load vector under an instance's oracle.
    Waterlevels {
        #[arg(long)]
        instance: PathBuf,
        /// JSON array with one load per element.
        #[arg(long)]
        loads: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Alg1)]
        method: Method,
    },
    /// Run an online solver on an assignment instance.
    Solve {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::Frac)]
        mode: Mode,
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
        #[arg(long, default_value_t = 0.05)]
        eps: f64,
        /// Per-step CSV trace (fractional modes only).
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Monte Carlo estimate of the ranking algorithm's ratio.
    Ranking {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, default_value_t = 2000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        dump_runs: Option<PathBuf>,
    },
    /// Exact offline optimum.
    Offline {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, value_enum)]
        problem: Problem,
        #[arg(long, value_enum, default_value_t = Backend::Auto)]
        backend: Backend,
    },
    /// Run solvers over a suite manifest and check its thresholds.
    Bench {
        suite: PathBuf,
        /// Comma-separated solvers; all by default.
        #[arg(long, value_delimiter = ',')]
        solvers: Vec<String>,
        /// Report path; `.csv` selects CSV, anything else JSON. Stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the acceptance checks.
    Verify {
        #[arg(long, default_value_t = CheckConfig::default().seed)]
        seed: u64,
        /// Reduced sample counts.
        #[arg(long)]
        quick: bool,
        /// Comma-separated subset of checks, e.g. `A1,A5`.
        #[arg(long, value_delimiter = ',')]
        only: Vec<String>,
    },
}

#[derive(Subcommand)]
enum GenFamily {
    UpperTriangular {
        #[arg(long)]
        n: usize,
    },
    AdwordsLaminar {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        depth: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    AdwordsUpperTriangular {
        #[arg(long)]
        bidders: usize,
        #[arg(long)]
        budget: usize,
    },
    MatroidColoring {
        /// `triangle`, `complete:K`, `path:K`, `cycle:K` or `0-1,1-2,...`.
        #[arg(long)]
        graph: String,
        #[arg(long)]
        delta: usize,
    },
    RandomPolymatroid {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    RankingUpperTriangular {
        #[arg(long)]
        n: usize,
    },
    RandomOswm {
        #[arg(long)]
        agents: usize,
        #[arg(long)]
        items: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Alg1,
    Alg2,
    Brute,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Frac,
    Mi,
    SmallBids,
}

#[derive(Clone, Copy, ValueEnum)]
enum Problem {
    Sap,
    Oswm,
}

#[derive(Clone, Copy, ValueEnum)]
enum Backend {
    Auto,
    Exhaustive,
    CuttingPlane,
}

/// Failure that maps to exit code 2 without being a library error.
#[derive(Debug)]
struct ChecksFailed(String);

impl std::fmt::Display for ChecksFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ChecksFailed {}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    if e.downcast_ref::<ChecksFailed>().is_some() {
        return 2;
    }
    match e.chain().find_map(|c| c.downcast_ref::<Error>()) {
        Some(Error::Invariant(_)) => 2,
        Some(Error::Capability(_)) => 3,
        _ => 1,
    }
}

fn emit(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            if !text.ends_with('\n') {
                println!();
            }
            Ok(())
        }
    }
}

fn pretty(v: &Value) -> anyhow::Result<String> {
    Ok(polyflow::harness::to_canonical(v)?)
}

fn read_instance(path: &Path) -> anyhow::Result<InstanceFile> {
    InstanceFile::read(path).with_context(|| format!("reading {}", path.display()))
}

fn read_sap(path: &Path) -> anyhow::Result<SapInstance> {
    match read_instance(path)? {
        InstanceFile::Sap(s) => Ok(s.build()?),
        InstanceFile::Oswm(_) => Err(Error::input("expected an assignment instance, got a welfare instance").into()),
    }
}

fn run(command: Command) -> anyhow::Result<()> {
    match command {
        Command::Gen { family, out } => {
            let family = match family {
                GenFamily::UpperTriangular { n } => Family::UpperTriangular { n },
                GenFamily::AdwordsLaminar { n, depth, seed } => Family::AdwordsLaminar { n, depth, seed },
                GenFamily::AdwordsUpperTriangular { bidders, budget } => {
                    Family::AdwordsUpperTriangular { bidders, budget }
                }
                GenFamily::MatroidColoring { graph, delta } => {
                    Family::MatroidColoring { graph: Graph::parse(&graph)?, delta }
                }
                GenFamily::RandomPolymatroid { n, seed } => Family::RandomPolymatroid { n, seed },
                GenFamily::RankingUpperTriangular { n } => Family::RankingUpperTriangular { n },
                GenFamily::RandomOswm { agents, items, seed } => Family::RandomOswm { agents, items, seed },
            };
            emit(out.as_deref(), &generate(&family)?.to_canonical()?)
        }
        Command::Waterlevels { instance, loads, method } => waterlevels(&instance, &loads, method),
        Command::Solve { instance, mode, step, eps, trace } => solve(&instance, mode, step, eps, trace.as_deref()),
        Command::Ranking { instance, trials, seed, dump_runs } => {
            let inst = match read_instance(&instance)? {
                InstanceFile::Oswm(o) => o.build()?,
                InstanceFile::Sap(_) => bail!(Error::input("expected a welfare instance, got an assignment instance")),
            };
            let (_, opt) = oswm_opt(&inst)?;
            let mc = monte_carlo_with_opt(&inst, trials, seed, opt)?;
            if let Some(path) = dump_runs {
                let mut csv = format!("{}\n", TrialRow::CSV_HEADER);
                for row in &mc.rows {
                    csv.push_str(&row.csv());
                    csv.push('\n');
                }
                emit(Some(&path), &csv)?;
            }
            emit(None, &polyflow::harness::to_canonical(&mc)?)
        }
        Command::Offline { instance, problem, backend } => offline(&instance, problem, backend),
        Command::Bench { suite, solvers, out } => {
            let solvers = if solvers.is_empty() {
                Solver::ALL.to_vec()
            } else {
                solvers.iter().map(|s| s.parse()).collect::<Result<Vec<Solver>, _>>()?
            };
            let (suite, base) = Suite::read(&suite).with_context(|| format!("reading {}", suite.display()))?;
            let report = bench(&suite, &base, &solvers)?;
            let csv = out.as_ref().is_some_and(|p| p.extension().is_some_and(|x| x == "csv"));
            emit(out.as_deref(), &if csv { report.to_csv() } else { report.to_json()? })?;
            bench_verdict(&report)
        }
        Command::Verify { seed, quick, only } => {
            let cfg = CheckConfig { seed, quick };
            let ids: Vec<String> =
                if only.is_empty() { CHECK_IDS.iter().map(|s| s.to_string()).collect() } else { only };
            let mut failed = Vec::new();
            for id in &ids {
                let outcome = run_check(id, &cfg)?;
                println!("{outcome}");
                if !outcome.passed {
                    failed.push(id.clone());
                }
            }
            if failed.is_empty() {
                Ok(())
            } else {
                Err(ChecksFailed(format!("failing checks: {}", failed.join(", "))).into())
            }
        }
    }
}

fn bench_verdict(report: &ExperimentReport) -> anyhow::Result<()> {
    for s in &report.skipped {
        eprintln!("skipped {s}");
    }
    if report.passed() {
        Ok(())
    } else {
        Err(ChecksFailed(format!("thresholds missed: {}", report.failures.join("; "))).into())
    }
}

fn waterlevels(instance: &Path, loads: &Path, method: Method) -> anyhow::Result<()> {
    let inst = read_sap(instance)?;
    let text = std::fs::read_to_string(loads).with_context(|| format!("reading {}", loads.display()))?;
    let x: Vec<f64> =
        serde_json::from_str(&text).map_err(|e| Error::input(format!("loads must be a JSON array ({e})")))?;
    let f = inst.oracle.as_ref();
    let total: f64 = x.iter().sum();

    let (primary, mut checks) = match method {
        Method::Alg1 | Method::All => (water_levels_alg1(f, &x)?, serde_json::Map::new()),
        Method::Alg2 => (water_levels_alg2(f, &x)?, serde_json::Map::new()),
        Method::Brute => {
            let brute = water_levels_brute(f, &x)?;
            let w: Vec<f64> = brute.iter().map(|b| b.max_min).collect();
            let gap = brute.iter().map(|b| (b.max_min - b.min_max).abs()).fold(0.0, f64::max);
            return emit(
                None,
                &pretty(&json!({
                    "w": w,
                    "checks": { "saddle_gap": gap, "duality_gap": (eval_lovasz(f, &w)? - total).abs() },
                }))?,
            );
        }
    };
    checks.insert("duality_gap".into(), json!((eval_lovasz(f, &primary.w)? - total).abs()));
    checks.insert("kkt".into(), json!(verify_sua_kkt(f, &x, &primary)?.passed()));
    if matches!(method, Method::All) {
        let alg2 = water_levels_alg2(f, &x)?;
        let gap = |w: &[f64]| primary.w.iter().zip(w).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        checks.insert("alg2_gap".into(), json!(gap(&alg2.w)));
        if x.len() <= BRUTE_MAX_N {
            let brute = water_levels_brute(f, &x)?;
            let w: Vec<f64> = brute.iter().map(|b| b.max_min).collect();
            let saddle = brute.iter().map(|b| (b.max_min - b.min_max).abs()).fold(0.0, f64::max);
            checks.insert("brute_gap".into(), json!(gap(&w)));
            checks.insert("saddle_gap".into(), json!(saddle));
        }
    }
    emit(
        None,
        &pretty(&json!({
            "w": primary.w,
            "chain": primary.chain,
            "densities": primary.densities,
            "alpha": primary.alpha,
            "checks": checks,
        }))?,
    )
}

fn solve(instance: &Path, mode: Mode, step: f64, eps: f64, trace: Option<&Path>) -> anyhow::Result<()> {
    let inst = read_sap(instance)?;
    let opts = SolveOptions { trace: trace.is_some(), ..SolveOptions::with_step(step) };
    let (_, _, report) = match mode {
        Mode::Frac => solve_fractional_with(&inst, opts)?,
        Mode::Mi => solve_matroid_intersection_with(&inst, opts)?,
        Mode::SmallBids => {
            if trace.is_some() {
                bail!(Error::input(format!("--trace is not available in {} mode", SolveMode::SmallBids)));
            }
            solve_small_bids(&inst, eps)?
        }
    };
    if let Some(path) = trace {
        let mut csv = format!("{}\n", TraceRow::CSV_HEADER);
        for row in &report.trace {
            csv.push_str(&row.csv());
            csv.push('\n');
        }
        emit(Some(path), &csv)?;
    }
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    emit(None, &polyflow::harness::to_canonical(&report)?)
}

fn offline(instance: &Path, problem: Problem, backend: Backend) -> anyhow::Result<()> {
    let value = match (problem, read_instance(instance)?) {
        (Problem::Sap, InstanceFile::Sap(s)) => {
            let backend = match backend {
                Backend::Auto => LpBackend::Auto,
                Backend::Exhaustive => LpBackend::Exhaustive,
                Backend::CuttingPlane => LpBackend::CuttingPlane,
            };
            let sol = lp_opt_fractional_with(&s.build()?, backend)?;
            json!({
                "opt": sol.objective,
                "x": sol.x,
                "backend": sol.backend.to_string(),
                "separation_slack": sol.separation_slack,
            })
        }
        (Problem::Oswm, InstanceFile::Oswm(o)) => {
            let (assignment, opt) = oswm_opt(&o.build()?)?;
            json!({ "opt": opt, "x": assignment, "backend": "exhaustive" })
        }
        (Problem::Sap, _) => bail!(Error::input("--problem sap needs an assignment instance")),
        (Problem::Oswm, _) => bail!(Error::input("--problem oswm needs a welfare instance")),
    };
    emit(None, &pretty(&value)?)
}
