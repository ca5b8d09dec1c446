//! Numerical tolerances shared across the crate.

use std::sync::OnceLock;

/// Default absolute tolerance for tightness and equality tests.
pub const DEFAULT_TOL: f64 = 1e-9;

static TOL: OnceLock<f64> = OnceLock::new();

/// The global tolerance, `POLYFLOW_TOL` if set to a positive float, else 1e-9.
pub fn tolerance() -> f64 {
    *TOL.get_or_init(|| {
        std::env::var("POLYFLOW_TOL")
            .ok()
            .and_then(|s| s.trim().parse::<f64>().ok())
            .filter(|t| t.is_finite() && *t > 0.0)
            .unwrap_or(DEFAULT_TOL)
    })
}

/// Slack threshold under which a set counts as tight: `tol * max(1, |f(S)|)`.
pub fn tight_slack(fval: f64) -> f64 {
    tolerance() * fval.abs().max(1.0)
}
