use super::SetFunction;
use crate::error::{Error, Result};
use crate::set::ElementSet;

/// Lovász extension `L_f(w) = Σ_k (τ_k − τ_{k+1}) f({e : w_e ≥ τ_k})` over
/// the distinct positive levels of `w`.
pub fn eval_lovasz(f: &dyn SetFunction, w: &[f64]) -> Result<f64> {
    let n = f.ground_size();
    if w.len() != n {
        return Err(Error::input(format!("weight vector has length {}, expected {n}", w.len())));
    }
    if let Some(e) = w.iter().position(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(Error::input(format!("weight of element {e} is negative or not finite")));
    }
    let mut order: Vec<usize> = (0..n).filter(|&e| w[e] > 0.0).collect();
    order.sort_by(|&a, &b| w[b].total_cmp(&w[a]).then(a.cmp(&b)));
    let mut level = ElementSet::empty(n);
    let mut total = 0.0;
    let mut i = 0;
    while i < order.len() {
        let tau = w[order[i]];
        while i < order.len() && w[order[i]] == tau {
            level.insert(order[i]);
            i += 1;
        }
        let next = order.get(i).map_or(0.0, |&e| w[e]);
        total += (tau - next) * f.eval(&level);
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::submodular::{Partition, Uniform};

    #[test]
    fn rank_one_uniform_is_max() {
        let f = Uniform::new(2, 1.0).unwrap();
        assert!((eval_lovasz(&f, &[0.5, 0.9]).unwrap() - 0.9).abs() < 1e-12);
    }

    #[test]
    fn modular_is_sum() {
        let f = Uniform::new(2, 2.0).unwrap();
        assert!((eval_lovasz(&f, &[0.3, 0.7]).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn partition_level_sets() {
        let f = Partition::new(3, vec![vec![0, 1], vec![2]], vec![1.0, 1.0]).unwrap();
        // Level sets {c} on (0.5, 0.9], {a,b,c} on (0, 0.5]: 0.4·1 + 0.5·2.
        assert!((eval_lovasz(&f, &[0.5, 0.5, 0.9]).unwrap() - 1.4).abs() < 1e-12);
    }

    #[test]
    fn negative_weight_rejected() {
        let f = Uniform::new(2, 1.0).unwrap();
        assert!(eval_lovasz(&f, &[-0.1, 0.2]).is_err());
    }
}
