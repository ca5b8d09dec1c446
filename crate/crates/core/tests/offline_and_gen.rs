use polyflow::harness::{generate, Family, Graph, InstanceFile};
use polyflow::offline::{lp_opt_fractional_with, LpBackend};
use polyflow::random::{random_sap, rng};
use polyflow::solvers::solve_fractional;
use polyflow::submodular::{build_oracle, verify_submodular, VerifyMode};
use rand::Rng;

#[test]
fn lp_backends_agree_on_random_instances() {
    let mut r = rng(5);
    for k in 0..50 {
        let n = r.gen_range(1..=12);
        let unit = r.gen_bool(0.3);
        let inst = random_sap(&mut r, n, unit);
        let a = lp_opt_fractional_with(&inst, LpBackend::Exhaustive).unwrap();
        let b = lp_opt_fractional_with(&inst, LpBackend::CuttingPlane).unwrap();
        assert!((a.objective - b.objective).abs() <= 1e-7 * a.objective.max(1.0), "instance {k}: {a:?} vs {b:?}");
        assert!(b.separation_slack >= -1e-8, "instance {k}: slack {}", b.separation_slack);
    }
}

#[test]
fn online_value_never_exceeds_the_lp_optimum() {
    let mut r = rng(6);
    for _ in 0..20 {
        let n = r.gen_range(1..=8);
        let inst = random_sap(&mut r, n, false);
        let opt = lp_opt_fractional_with(&inst, LpBackend::Exhaustive).unwrap().objective;
        let (_, _, report) = solve_fractional(&inst, 1e-2).unwrap();
        assert!(report.primal <= opt * (1.0 + 1e-9));
        assert!(report.opt_upper_bound >= opt * (1.0 - 1e-6), "{} < {opt}", report.opt_upper_bound);
    }
}

fn families() -> Vec<Family> {
    vec![
        Family::UpperTriangular { n: 4 },
        Family::AdwordsLaminar { n: 10, depth: 3, seed: 1 },
        Family::AdwordsUpperTriangular { bidders: 3, budget: 2 },
        Family::MatroidColoring { graph: Graph::parse("triangle").unwrap(), delta: 2 },
        Family::MatroidColoring { graph: Graph::parse("0-1,1-2,2-3,3-0").unwrap(), delta: 3 },
        Family::RandomPolymatroid { n: 9, seed: 2 },
        Family::RankingUpperTriangular { n: 4 },
        Family::RandomOswm { agents: 3, items: 6, seed: 3 },
    ]
}

#[test]
fn generated_instances_round_trip_byte_identically() {
    for family in families() {
        let text = generate(&family).unwrap().to_canonical().unwrap();
        let again = InstanceFile::parse(&text).unwrap().to_canonical().unwrap();
        assert_eq!(text, again, "{family:?}");
        assert_eq!(text, generate(&family).unwrap().to_canonical().unwrap());
    }
}

#[test]
fn generated_oracles_are_submodular() {
    for family in families() {
        let oracles = match generate(&family).unwrap() {
            InstanceFile::Sap(s) => vec![build_oracle(&s.oracle, s.ground).unwrap()],
            InstanceFile::Oswm(o) => o.agents.iter().map(|a| build_oracle(&a.oracle, o.items).unwrap()).collect(),
        };
        for f in oracles {
            let mode = if f.ground_size() <= 14 {
                VerifyMode::Exhaustive
            } else {
                VerifyMode::Sampled { pairs: 4000, seed: 9 }
            };
            assert!(verify_submodular(f.as_ref(), mode).unwrap().passed, "{family:?}");
        }
    }
}
