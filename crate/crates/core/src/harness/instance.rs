//! JSON instance files.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::json::to_canonical;
use crate::error::{Error, Result};
use crate::ranking::{Agent, OswmInstance};
use crate::solvers::SapInstance;
use crate::submodular::{build_oracle, OracleSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SapFile {
    pub ground: usize,
    pub oracle: OracleSpec,
    pub values: Vec<f64>,
    pub costs: Vec<f64>,
    pub parts: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentFile {
    pub oracle: OracleSpec,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OswmFile {
    pub agents: Vec<AgentFile>,
    pub items: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InstanceFile {
    Sap(SapFile),
    Oswm(OswmFile),
}

impl SapFile {
    pub fn build(&self) -> Result<SapInstance> {
        let oracle = build_oracle(&self.oracle, self.ground)?;
        SapInstance::new(oracle, self.values.clone(), self.costs.clone(), self.parts.clone())
    }
}

impl OswmFile {
    pub fn build(&self) -> Result<OswmInstance> {
        let agents = self
            .agents
            .iter()
            .map(|a| Ok(Agent { oracle: build_oracle(&a.oracle, self.items)?, weight: a.weight }))
            .collect::<Result<Vec<_>>>()?;
        OswmInstance::new(self.items, agents)
    }
}

impl InstanceFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text)
            .map_err(|e| Error::input(format!("instance is neither an assignment nor a welfare instance ({e})")))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    pub fn to_canonical(&self) -> Result<String> {
        to_canonical(self)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_canonical()?)?;
        Ok(())
    }

    pub fn sap(&self) -> Result<&SapFile> {
        match self {
            InstanceFile::Sap(s) => Ok(s),
            InstanceFile::Oswm(_) => Err(Error::input("expected an assignment instance, found a welfare instance")),
        }
    }

    pub fn oswm(&self) -> Result<&OswmFile> {
        match self {
            InstanceFile::Oswm(o) => Ok(o),
            InstanceFile::Sap(_) => Err(Error::input("expected a welfare instance, found an assignment instance")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_both_kinds() {
        let sap = r#"{"ground": 2, "oracle": {"kind": "uniform", "rank": 1}, "values": [1, 1], "costs": [1, 1], "parts": [[0], [1]]}"#;
        let f = InstanceFile::parse(sap).unwrap();
        assert!((f.sap().unwrap().build().unwrap().primal(&[1.0, 0.0]) - 1.0).abs() < 1e-15);
        let oswm = r#"{"agents": [{"oracle": {"kind": "uniform", "rank": 1}, "weight": 1}], "items": 2}"#;
        let f = InstanceFile::parse(oswm).unwrap();
        assert_eq!(f.oswm().unwrap().build().unwrap().agents.len(), 1);
        assert!(InstanceFile::parse(r#"{"ground": 2}"#).is_err());
        assert!(InstanceFile::parse(r#"{"agents": [], "items": 1, "extra": 0}"#).is_err());
    }

    #[test]
    fn canonical_round_trip() {
        let sap = r#"{"parts": [[1], [0]], "ground": 2, "costs": [1, 0.5], "values": [2, 1], "oracle": {"rank": 1, "kind": "uniform"}}"#;
        let text = InstanceFile::parse(sap).unwrap().to_canonical().unwrap();
        let again = InstanceFile::parse(&text).unwrap().to_canonical().unwrap();
        assert_eq!(text, again);
        assert!(text.contains("\"rank\": 1.0000000000000000e0"));
    }
}
