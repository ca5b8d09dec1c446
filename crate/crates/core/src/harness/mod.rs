//! Instance files, generators, benchmarks and the acceptance checks.

pub mod bench;
pub mod checks;
pub mod gen;
pub mod instance;
pub mod json;

pub use bench::{bench, BenchRow, ExperimentReport, Solver, Suite, SuiteEntry};
pub use checks::{run_all, run_check, CheckConfig, CheckOutcome, CHECK_IDS};
pub use gen::{generate, Family, Graph};
pub use instance::{AgentFile, InstanceFile, OswmFile, SapFile};
pub use json::{canonicalize, to_canonical};
