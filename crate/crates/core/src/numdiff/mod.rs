//! Numeric difference quotients and Seip variations of black-box maps
//! `ℝⁿ → ℝᵐ`.
//!
//! The variation `δf(x, u) = lim_{t→0} t⁻¹(f(x + tu) − f(x))` is estimated
//! from symmetric quotients on the geometric steps `t₀ rʲ`, refined by a
//! Richardson tableau. A non-shrinking gap between the `+t` and `−t`
//! quotients is reported as [`NumError::NotDifferentiable`].

mod extrap;
pub(crate) use extrap::richardson;
mod smooth;
mod suite;

use thiserror::Error;

pub use extrap::{
    bgn_difq_num, difq_fn, difq_num, seip_var, seip_var_est, seip_var_k, variation_fn, Estimate,
    JetTensor, MAX_NUMERIC_ORDER,
};
pub use smooth::{ScalarMap, SmoothFn};
pub use suite::{
    calculus_rule_suite, check_linearity, dual_crosscheck_suite, oracle_agreement_suite,
    standard_test_set, CONDITION_LIMIT,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumError {
    #[error("point {point:?} outside the domain box")]
    DomainError { point: Vec<f64> },
    #[error("non-finite value at {point:?}")]
    NonFinite { point: Vec<f64> },
    #[error("no convergence at level {level}, component {component}: error estimate {error:e}")]
    NoConvergence {
        level: usize,
        component: usize,
        error: f64,
    },
    #[error("not differentiable: one-sided quotients differ by {gap:e}")]
    NotDifferentiable { gap: f64 },
    #[error("arity mismatch: expected {expected}, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("step t must be nonzero")]
    ZeroStep,
    #[error("numeric nesting order {0} exceeds the cap")]
    OrderCap(usize),
    #[error("invalid extrapolation config: {0}")]
    InvalidConfig(String),
}

/// Step sequence and stopping rule for the `t → 0` extrapolation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtrapConfig {
    pub t0: f64,
    pub ratio: f64,
    pub max_levels: usize,
    pub richardson_order: usize,
    pub tol_conv: f64,
}

impl Default for ExtrapConfig {
    fn default() -> Self {
        ExtrapConfig {
            t0: 0.1,
            ratio: 0.5,
            max_levels: 12,
            richardson_order: 4,
            tol_conv: 1e-9,
        }
    }
}

impl ExtrapConfig {
    pub fn validate(&self) -> Result<(), NumError> {
        let bad = |m: &str| Err(NumError::InvalidConfig(m.to_string()));
        if !(self.t0 > 0.0 && self.t0.is_finite()) {
            return bad("t0 must be positive");
        }
        if !(self.ratio > 0.0 && self.ratio < 1.0) {
            return bad("ratio must lie in (0, 1)");
        }
        if self.max_levels < 3 {
            return bad("max_levels must be at least 3");
        }
        if self.richardson_order < 1 {
            return bad("richardson_order must be at least 1");
        }
        if !(self.tol_conv > 0.0) {
            return bad("tol_conv must be positive");
        }
        Ok(())
    }
}

pub(crate) fn sup_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

pub(crate) fn sup_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

pub(crate) fn axpy(x: &[f64], t: f64, u: &[f64]) -> Vec<f64> {
    x.iter().zip(u).map(|(a, b)| a + t * b).collect()
}

/// Least-squares slope of `−log e` against `log n`.
pub(crate) fn fitted_order(rows: &[(usize, f64)]) -> f64 {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|(_, e)| *e > 0.0)
        .map(|(n, e)| ((*n as f64).ln(), e.ln()))
        .collect();
    if pts.len() < 2 {
        return f64::NAN;
    }
    let k = pts.len() as f64;
    let (mx, my) = (
        pts.iter().map(|p| p.0).sum::<f64>() / k,
        pts.iter().map(|p| p.1).sum::<f64>() / k,
    );
    let num: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = pts.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    -num / den
}
