use std::f64::consts::PI;

use super::{operator_var, GridError, GridFn, GridOperator, Support};
use crate::numdiff::ExtrapConfig;

/// Refinement study of the variation of `(x, y) ↦ x ∘ (ι + y)` on `[0, π]`
/// with `x = sin`, `y = sin/10` along `u = sin 2t`, `v = sin/2`.
#[derive(Debug, Clone)]
pub struct ShiftStudy {
    /// `(N, sup error)` against `u∘(ι+y) + (x′∘(ι+y))·v`.
    pub rows: Vec<(usize, f64)>,
    pub order: f64,
    /// Variation on the finest grid.
    pub variation: GridFn,
}

/// Convergence tolerance for the samplewise extrapolation; the spline is
/// only piecewise cubic in the shift.
pub const SHIFT_TOL_CONV: f64 = 1e-7;

pub fn shift_variation_study(ns: &[usize]) -> Result<ShiftStudy, GridError> {
    let cfg = ExtrapConfig {
        tol_conv: SHIFT_TOL_CONV,
        ..ExtrapConfig::default()
    };
    let op = GridOperator::composition();
    let mut rows = Vec::with_capacity(ns.len());
    let mut last = None;
    for &n in ns {
        let g = |f: fn(f64) -> f64| GridFn::sample(0.0, PI, n, Support::Interval, f);
        let x = g(f64::sin)?;
        let y = g(|t| 0.1 * t.sin())?;
        let u = g(|t| (2.0 * t).sin())?;
        let v = g(|t| 0.5 * t.sin())?;
        let d = operator_var(&op, &[x, y], &[u, v], &cfg)?;
        let exact = d.map(|t, _| {
            let s = t + 0.1 * t.sin();
            (2.0 * s).sin() + s.cos() * 0.5 * t.sin()
        })?;
        rows.push((n, d.sup_dist(&exact)?));
        last = Some(d);
    }
    let order = crate::numdiff::fitted_order(&rows);
    let variation = last.ok_or(GridError::TooFewCells(0))?;
    Ok(ShiftStudy {
        rows,
        order,
        variation,
    })
}
