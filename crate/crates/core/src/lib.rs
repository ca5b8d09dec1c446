//! Polymatroid water levels and online submodular assignment.

pub mod error;
pub mod harness;
pub mod offline;
pub mod random;
pub mod ranking;
pub mod set;
pub mod solvers;
pub mod submodular;
pub mod tol;
pub mod waterlevel;

pub use error::{Error, Result};
pub use set::ElementSet;
pub use submodular::{DynOracle, GroundSet, OracleKind, SetFunction};
