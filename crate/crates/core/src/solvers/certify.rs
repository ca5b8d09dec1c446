use serde::Serialize;

use super::{min_kappa, DualCertificate, SapInstance};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Certification {
    /// `min_e (b_e γ_e + β_{j(e)}) / v_e`.
    pub kappa: f64,
    pub dual_bound: f64,
    /// `dual_bound / (κ · scale)`: dividing the duals by `κ` makes them
    /// feasible, and shrinking capacities by `scale` shrinks the optimum by
    /// at most that factor.
    pub opt_upper_bound: f64,
    /// `primal / opt_upper_bound`.
    pub ratio: f64,
}

pub fn certify(inst: &SapInstance, x: &[f64], cert: &DualCertificate) -> Result<Certification> {
    if cert.gamma.len() != inst.len() || cert.beta.len() != inst.parts.len() || x.len() != inst.len() {
        return Err(Error::input("certificate does not match the instance"));
    }
    if cert.gamma.iter().chain(&cert.beta).any(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(Error::input("dual variables must be nonnegative"));
    }
    let kappa = min_kappa(inst, &cert.gamma, &cert.beta, inst.parts.len());
    let dual_bound = cert.bound(inst.oracle.as_ref())?;
    let opt_upper_bound =
        if kappa > 0.0 && cert.scale > 0.0 { dual_bound / (kappa * cert.scale) } else { f64::INFINITY };
    let primal = inst.primal(x);
    let ratio = if opt_upper_bound.is_finite() && opt_upper_bound > 0.0 {
        primal / opt_upper_bound
    } else if primal == 0.0 && opt_upper_bound == 0.0 {
        1.0
    } else {
        0.0
    };
    Ok(Certification { kappa, dual_bound, opt_upper_bound, ratio })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::submodular::Partition;

    #[test]
    fn greedy_beta_certificate() {
        // Two elements in one part, each its own slot; β = max v covers all.
        let f = Arc::new(Partition::new(2, vec![vec![0], vec![1]], vec![1.0, 1.0]).unwrap());
        let inst = SapInstance::new(f, vec![2.0, 1.0], vec![1.0, 1.0], vec![vec![0, 1]]).unwrap();
        let cert = DualCertificate { gamma: vec![0.0; 2], beta: vec![2.0], scale: 1.0, surrogate: None };
        let c = certify(&inst, &[1.0, 0.0], &cert).unwrap();
        assert_eq!(c.kappa, 1.0);
        assert_eq!(c.opt_upper_bound, 2.0);
        assert_eq!(c.ratio, 1.0);
        let c = certify(&inst, &[0.0, 1.0], &cert).unwrap();
        assert_eq!(c.ratio, 0.5);
    }
}
