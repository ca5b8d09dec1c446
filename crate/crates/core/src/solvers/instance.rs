use serde::Serialize;

use crate::error::{Error, Result};
use crate::submodular::{dead_elements, DynOracle, GroundSet};

/// Online submodular assignment instance: elements arrive in parts, each
/// part receives at most one unit of mass, and the load `b ∘ x` must stay in
/// the polymatroid of `f`.
#[derive(Clone)]
pub struct SapInstance {
    pub ground: GroundSet,
    pub oracle: DynOracle,
    pub values: Vec<f64>,
    pub costs: Vec<f64>,
    pub parts: Vec<Vec<usize>>,
    part_of: Vec<usize>,
}

impl std::fmt::Debug for SapInstance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SapInstance")
            .field("ground", &self.ground.len())
            .field("oracle", &self.oracle.kind())
            .field("values", &self.values)
            .field("costs", &self.costs)
            .field("parts", &self.parts)
            .finish()
    }
}

impl SapInstance {
    pub fn new(oracle: DynOracle, values: Vec<f64>, costs: Vec<f64>, parts: Vec<Vec<usize>>) -> Result<Self> {
        let ground = GroundSet::new(oracle.ground_size());
        Self::with_ground(ground, oracle, values, costs, parts)
    }

    pub fn with_ground(
        ground: GroundSet,
        oracle: DynOracle,
        values: Vec<f64>,
        costs: Vec<f64>,
        parts: Vec<Vec<usize>>,
    ) -> Result<Self> {
        let n = oracle.ground_size();
        if ground.len() != n {
            return Err(Error::input(format!("ground set has {} elements, oracle has {n}", ground.len())));
        }
        if values.len() != n || costs.len() != n {
            return Err(Error::input(format!("values and costs must have length {n}")));
        }
        for (name, vec) in [("value", &values), ("cost", &costs)] {
            if let Some(e) = vec.iter().position(|v| !(v.is_finite() && *v > 0.0)) {
                return Err(Error::input(format!("{name} of element {e} must be positive")));
            }
        }
        let mut part_of = vec![usize::MAX; n];
        for (j, q) in parts.iter().enumerate() {
            if q.is_empty() {
                return Err(Error::input(format!("part {j} is empty")));
            }
            for &e in q {
                if e >= n {
                    return Err(Error::input(format!("part {j} lists element {e} outside the ground set")));
                }
                if part_of[e] != usize::MAX {
                    return Err(Error::input(format!("element {e} appears in parts {} and {j}", part_of[e])));
                }
                part_of[e] = j;
            }
        }
        if let Some(e) = part_of.iter().position(|&j| j == usize::MAX) {
            return Err(Error::input(format!("element {e} belongs to no part")));
        }
        if let Some(&e) = dead_elements(oracle.as_ref()).first() {
            return Err(Error::input(format!("element {e} has f({{e}}) = 0")));
        }
        Ok(SapInstance { ground, oracle, values, costs, parts, part_of })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn part_of(&self, e: usize) -> usize {
        self.part_of[e]
    }

    /// All values and costs equal to 1.
    pub fn is_unit(&self) -> bool {
        self.values.iter().chain(&self.costs).all(|&v| v == 1.0)
    }

    pub fn primal(&self, x: &[f64]) -> f64 {
        x.iter().zip(&self.values).map(|(x, v)| x * v).sum()
    }

    pub fn load(&self, x: &[f64]) -> Vec<f64> {
        x.iter().zip(&self.costs).map(|(x, b)| x * b).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Allocation {
    pub x: Vec<f64>,
    /// Number of parts processed so far.
    pub revealed: usize,
}

impl Allocation {
    pub fn zeros(n: usize) -> Self {
        Allocation { x: vec![0.0; n], revealed: 0 }
    }

    pub fn part_total(&self, inst: &SapInstance, j: usize) -> f64 {
        inst.parts[j].iter().map(|&e| self.x[e]).sum()
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::submodular::Uniform;

    fn rank1() -> DynOracle {
        Arc::new(Uniform::new(2, 1.0).unwrap())
    }

    #[test]
    fn parts_must_partition() {
        assert!(SapInstance::new(rank1(), vec![1.0; 2], vec![1.0; 2], vec![vec![0], vec![1]]).is_ok());
        assert!(SapInstance::new(rank1(), vec![1.0; 2], vec![1.0; 2], vec![vec![0]]).is_err());
        assert!(SapInstance::new(rank1(), vec![1.0; 2], vec![1.0; 2], vec![vec![0, 1], vec![1]]).is_err());
        assert!(SapInstance::new(rank1(), vec![1.0; 2], vec![1.0; 2], vec![vec![0, 1], vec![]]).is_err());
    }

    #[test]
    fn positive_data_required() {
        assert!(SapInstance::new(rank1(), vec![1.0, 0.0], vec![1.0; 2], vec![vec![0, 1]]).is_err());
        assert!(SapInstance::new(rank1(), vec![1.0; 2], vec![1.0, -1.0], vec![vec![0, 1]]).is_err());
    }

    #[test]
    fn dead_elements_rejected() {
        let f: DynOracle =
            Arc::new(crate::submodular::Partition::new(2, vec![vec![0], vec![1]], vec![1.0, 0.0]).unwrap());
        assert!(SapInstance::new(f, vec![1.0; 2], vec![1.0; 2], vec![vec![0, 1]]).is_err());
    }
}
