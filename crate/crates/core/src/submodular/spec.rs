//! Serializable oracle descriptions.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{
    Contraction, Coverage, DirectSum, DynOracle, Graphic, LaminarBudget, LaminarSet, Partition, Restriction, Scaled,
    Table, Transversal, Uniform,
};
use crate::error::{Error, Result};
use crate::set::ElementSet;
use crate::submodular::{verify_submodular, LaminarBudgetSpec, VerifyMode};

/// One block of a direct sum: an oracle over `ground` consecutive ids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SumBlock {
    pub ground: usize,
    pub oracle: OracleSpec,
}

/// JSON form of an oracle, tagged by `kind`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum OracleSpec {
    Uniform { rank: f64 },
    Partition { parts: Vec<Vec<usize>>, capacities: Vec<f64> },
    Graphic { vertices: usize, edges: Vec<(usize, usize)> },
    Transversal { right: usize, adjacency: Vec<Vec<usize>> },
    Laminar { sets: Vec<LaminarSet> },
    Coverage { weights: Vec<f64>, covers: Vec<Vec<usize>> },
    Table { values: BTreeMap<String, f64> },
    Scale { factor: f64, oracle: Box<OracleSpec> },
    DirectSum { blocks: Vec<SumBlock> },
    Contract { set: Vec<usize>, oracle: Box<OracleSpec> },
    Restrict { base_ground: usize, elements: Vec<usize>, oracle: Box<OracleSpec> },
}

fn expect_size(kind: &str, got: usize, n: usize) -> Result<()> {
    if got != n {
        return Err(Error::input(format!("{kind} oracle describes {got} elements but the ground set has {n}")));
    }
    Ok(())
}

/// Builds the oracle described by `spec` over the ground set `0..n`.
pub fn build_oracle(spec: &OracleSpec, n: usize) -> Result<DynOracle> {
    let oracle: DynOracle = match spec {
        OracleSpec::Uniform { rank } => Arc::new(Uniform::new(n, *rank)?),
        OracleSpec::Partition { parts, capacities } => Arc::new(Partition::new(n, parts.clone(), capacities.clone())?),
        OracleSpec::Graphic { vertices, edges } => {
            expect_size("graphic", edges.len(), n)?;
            Arc::new(Graphic::new(*vertices, edges.clone())?)
        }
        OracleSpec::Transversal { right, adjacency } => {
            expect_size("transversal", adjacency.len(), n)?;
            Arc::new(Transversal::new(*right, adjacency.clone())?)
        }
        OracleSpec::Laminar { sets } => Arc::new(LaminarBudget::new(n, &LaminarBudgetSpec { sets: sets.clone() })?),
        OracleSpec::Coverage { weights, covers } => {
            expect_size("coverage", covers.len(), n)?;
            Arc::new(Coverage::new(weights.clone(), covers.clone())?)
        }
        OracleSpec::Table { values } => {
            let table = Table::from_keyed(n, values)?;
            let report = verify_submodular(&table, VerifyMode::Exhaustive)?;
            if let Some(v) = report.violation {
                return Err(Error::input(format!("table is not a polymatroid rank function: {v}")));
            }
            Arc::new(table)
        }
        OracleSpec::Scale { factor, oracle } => Arc::new(Scaled::new(*factor, build_oracle(oracle, n)?)?),
        OracleSpec::DirectSum { blocks } => {
            let total: usize = blocks.iter().map(|b| b.ground).sum();
            expect_size("direct-sum", total, n)?;
            let built = blocks.iter().map(|b| build_oracle(&b.oracle, b.ground)).collect::<Result<Vec<_>>>()?;
            Arc::new(DirectSum::new(built))
        }
        OracleSpec::Contract { set, oracle } => {
            if let Some(&e) = set.iter().find(|&&e| e >= n) {
                return Err(Error::input(format!("contracted element {e} out of range")));
            }
            let base = build_oracle(oracle, n)?;
            Arc::new(Contraction::new(base, ElementSet::from_elements(n, set.iter().copied()))?)
        }
        OracleSpec::Restrict { base_ground, elements, oracle } => {
            expect_size("restrict", elements.len(), n)?;
            Arc::new(Restriction::new(build_oracle(oracle, *base_ground)?, elements.clone())?)
        }
    };
    Ok(oracle)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_partition_json() {
        let spec: OracleSpec =
            serde_json::from_str(r#"{"kind":"partition","parts":[[0,1],[2]],"capacities":[1,1]}"#).unwrap();
        let f = build_oracle(&spec, 3).unwrap();
        assert_eq!(f.eval(&ElementSet::full(3)), 2.0);
    }

    #[test]
    fn parses_nested_wrappers() {
        let json = r#"{"kind":"direct-sum","blocks":[
            {"ground":2,"oracle":{"kind":"scale","factor":2.0,"oracle":{"kind":"uniform","rank":1}}},
            {"ground":3,"oracle":{"kind":"graphic","vertices":3,"edges":[[0,1],[1,2],[0,2]]}}]}"#;
        let spec: OracleSpec = serde_json::from_str(json).unwrap();
        let f = build_oracle(&spec, 5).unwrap();
        assert_eq!(f.eval(&ElementSet::full(5)), 4.0);
        assert!(build_oracle(&spec, 4).is_err());
    }

    #[test]
    fn parses_laminar_and_table() {
        let lam: OracleSpec = serde_json::from_str(
            r#"{"kind":"laminar","sets":[{"members":[0],"budget":1.0},{"members":[1],"budget":1.0},{"members":[0,1],"budget":1.5}]}"#,
        )
        .unwrap();
        assert_eq!(build_oracle(&lam, 2).unwrap().eval(&ElementSet::full(2)), 1.5);
        let table: OracleSpec = serde_json::from_str(r#"{"kind":"table","values":{"0":1,"1":1,"0,1":1.5}}"#).unwrap();
        assert_eq!(build_oracle(&table, 2).unwrap().eval(&ElementSet::full(2)), 1.5);
    }

    #[test]
    fn contraction_spec() {
        let spec: OracleSpec =
            serde_json::from_str(r#"{"kind":"contract","set":[0],"oracle":{"kind":"uniform","rank":2}}"#).unwrap();
        let f = build_oracle(&spec, 3).unwrap();
        assert_eq!(f.eval(&ElementSet::from_elements(3, [1, 2])), 1.0);
    }
}
