//! Dense dictionary simplex for `max cᵀx, Ax ≤ b, x ≥ 0` with `b ≥ 0`, so
//! the slack basis is feasible from the start. Bland's rule throughout.

use crate::error::{Error, Result};

const PIVOT_EPS: f64 = 1e-11;
const COST_EPS: f64 = 1e-10;
const MAX_PIVOTS: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct SimplexSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    /// Optimal multiplier of each row.
    pub duals: Vec<f64>,
    pub pivots: usize,
}

pub fn maximize(c: &[f64], rows: &[Vec<f64>], rhs: &[f64]) -> Result<SimplexSolution> {
    let n = c.len();
    let m = rows.len();
    if rhs.len() != m || rows.iter().any(|r| r.len() != n) {
        return Err(Error::input("simplex: inconsistent dimensions"));
    }
    if rhs.iter().any(|b| !(b.is_finite() && *b >= 0.0)) {
        return Err(Error::input("simplex: right-hand sides must be nonnegative"));
    }
    // basic_i = beta_i − Σ_k d[i][k] · nonbasic_k ;  z = z0 + Σ_k cbar_k · nonbasic_k
    let mut d: Vec<Vec<f64>> = rows.to_vec();
    let mut beta = rhs.to_vec();
    let mut cbar = c.to_vec();
    let mut z0 = 0.0;
    let mut basis: Vec<usize> = (n..n + m).collect();
    let mut nonbasis: Vec<usize> = (0..n).collect();
    let mut pivots = 0;

    while let Some(k) = (0..n).filter(|&k| cbar[k] > COST_EPS).min_by_key(|&k| nonbasis[k]) {
        let mut leave: Option<(usize, f64)> = None;
        for i in 0..m {
            if d[i][k] > PIVOT_EPS {
                let r = beta[i] / d[i][k];
                leave = match leave {
                    Some((l, best)) if r > best || (r == best && basis[l] < basis[i]) => Some((l, best)),
                    _ => Some((i, r)),
                };
            }
        }
        let Some((r, _)) = leave else {
            return Err(Error::invariant("simplex: objective unbounded"));
        };
        pivots += 1;
        if pivots > MAX_PIVOTS {
            return Err(Error::invariant("simplex: pivot limit reached"));
        }

        let p = d[r][k];
        let mut row_r = std::mem::take(&mut d[r]);
        for (l, v) in row_r.iter_mut().enumerate() {
            *v = if l == k { 1.0 / p } else { *v / p };
        }
        beta[r] = (beta[r] / p).max(0.0);
        for i in 0..m {
            if i == r {
                continue;
            }
            let q = d[i][k];
            if q == 0.0 {
                continue;
            }
            for (l, v) in d[i].iter_mut().enumerate() {
                if l != k {
                    *v -= q * row_r[l];
                }
            }
            d[i][k] = -q * row_r[k];
            beta[i] = (beta[i] - q * beta[r]).max(0.0);
        }
        let q = cbar[k];
        for (l, v) in cbar.iter_mut().enumerate() {
            if l != k {
                *v -= q * row_r[l];
            }
        }
        cbar[k] = -q * row_r[k];
        z0 += q * beta[r];
        d[r] = row_r;
        std::mem::swap(&mut basis[r], &mut nonbasis[k]);
    }

    let mut x = vec![0.0; n];
    for (i, &v) in basis.iter().enumerate() {
        if v < n {
            x[v] = beta[i];
        }
    }
    let mut duals = vec![0.0; m];
    for (k, &v) in nonbasis.iter().enumerate() {
        if v >= n {
            duals[v - n] = (-cbar[k]).max(0.0);
        }
    }
    let objective: f64 = c.iter().zip(&x).map(|(c, x)| c * x).sum();
    debug_assert!((objective - z0).abs() <= 1e-6 * objective.abs().max(1.0));
    Ok(SimplexSolution { x, objective, duals, pivots })
}
