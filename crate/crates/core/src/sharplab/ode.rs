use std::cell::RefCell;
use std::collections::HashMap;

use super::{coefficient_a, SharpConfig, SharpError};
use crate::funcgrid::{GridFn, Support};

/// `|A|` at or below this along the trajectory aborts the solve.
pub const SINGULAR_THRESHOLD: f64 = 1e-6;
const MEMO_QUANTUM: f64 = 1e-12;

/// `A(η)` with a memo on `η` quantized to `1e-12`.
struct Coefficient<'a> {
    cfg: &'a SharpConfig,
    memo: RefCell<HashMap<i64, f64>>,
}

impl<'a> Coefficient<'a> {
    fn new(cfg: &'a SharpConfig) -> Self {
        Coefficient {
            cfg,
            memo: RefCell::new(HashMap::new()),
        }
    }

    fn at(&self, eta: f64) -> Result<f64, SharpError> {
        let key = (eta / MEMO_QUANTUM).round() as i64;
        if let Some(v) = self.memo.borrow().get(&key) {
            return Ok(*v);
        }
        let v = coefficient_a(eta, self.cfg)?;
        self.memo.borrow_mut().insert(key, v);
        Ok(v)
    }

    fn nonsingular(&self, eta: f64) -> Result<f64, SharpError> {
        let a = self.at(eta)?;
        if a.abs() <= SINGULAR_THRESHOLD {
            return Err(SharpError::SingularCoefficient { eta, value: a });
        }
        Ok(a)
    }

    /// `u′ = (ε − u) / A(u)`.
    fn rhs(&self, u: f64) -> Result<f64, SharpError> {
        Ok((self.cfg.eps - u) / self.nonsingular(u)?)
    }
}

/// RK4 trajectory on `[0, 1]` with node slopes for Hermite dense output.
#[derive(Debug, Clone, PartialEq)]
pub struct OdeSolution {
    pub steps: usize,
    pub values: Vec<f64>,
    pub slopes: Vec<f64>,
    /// `max |χ(u, u′)|` over the step nodes, `u′` from the grid stencil.
    pub chi_residual: f64,
    /// Sup distance to the run with half as many steps.
    pub halving_diff: f64,
    /// `halving_diff / 15`.
    pub error_estimate: f64,
}

impl OdeSolution {
    /// Cubic Hermite interpolant at `t ∈ [0, 1]`.
    pub fn value(&self, t: f64) -> f64 {
        hermite(&self.values, &self.slopes, t)
    }

    /// Step nodes as a grid function.
    pub fn as_grid(&self) -> Result<GridFn, SharpError> {
        Ok(GridFn::new(
            0.0,
            1.0,
            self.values.clone(),
            Support::Interval,
        )?)
    }

    /// Dense output sampled on `n` cells.
    pub fn on_grid(&self, n: usize) -> Result<GridFn, SharpError> {
        Ok(GridFn::sample(0.0, 1.0, n, Support::Interval, |t| {
            self.value(t)
        })?)
    }
}

fn hermite(y: &[f64], m: &[f64], t: f64) -> f64 {
    let n = y.len() - 1;
    let h = 1.0 / n as f64;
    let p = (t / h).clamp(0.0, n as f64);
    let k = (p.floor() as usize).min(n - 1);
    let th = p - k as f64;
    if th == 0.0 {
        return y[k];
    }
    let (t2, t3) = (th * th, th * th * th);
    (2.0 * t3 - 3.0 * t2 + 1.0) * y[k]
        + (t3 - 2.0 * t2 + th) * h * m[k]
        + (-2.0 * t3 + 3.0 * t2) * y[k + 1]
        + (t3 - t2) * h * m[k + 1]
}

fn rk4(eta0: f64, steps: usize, a: &Coefficient) -> Result<(Vec<f64>, Vec<f64>), SharpError> {
    let h = 1.0 / steps as f64;
    let mut values = Vec::with_capacity(steps + 1);
    let mut slopes = Vec::with_capacity(steps + 1);
    let mut u = eta0;
    for _ in 0..steps {
        let k1 = a.rhs(u)?;
        let k2 = a.rhs(u + 0.5 * h * k1)?;
        let k3 = a.rhs(u + 0.5 * h * k2)?;
        let k4 = a.rhs(u + h * k3)?;
        values.push(u);
        slopes.push(k1);
        u += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    values.push(u);
    slopes.push(a.rhs(u)?);
    Ok((values, slopes))
}

fn chi_residual(values: &[f64], a: &Coefficient) -> Result<f64, SharpError> {
    let g = GridFn::new(0.0, 1.0, values.to_vec(), Support::Interval)?;
    let du = g.derivative(1)?;
    let mut worst = 0.0f64;
    for (u, d) in values.iter().zip(&du) {
        worst = worst.max((u - a.cfg.eps + d * a.at(*u)?).abs());
    }
    Ok(worst)
}

/// Solves `u′ = (ε − u)/A(u)`, `u(0) = η₀` on `[0, 1]` with `ode_steps` RK4
/// steps and checks the `χ` residual against `tol_demo`.
pub fn solve_ode(eta0: f64, cfg: &SharpConfig) -> Result<OdeSolution, SharpError> {
    cfg.validate()?;
    if !eta0.is_finite() {
        return Err(SharpError::InvalidConfig("eta0 must be finite".into()));
    }
    let a = Coefficient::new(cfg);
    a.nonsingular(cfg.eps)?;
    let steps = cfg.ode_steps;
    let (values, slopes) = rk4(eta0, steps, &a)?;
    let chi = chi_residual(&values, &a)?;
    let coarse_steps = steps / 2;
    let (coarse, _) = rk4(eta0, coarse_steps, &a)?;
    let halving_diff = coarse
        .iter()
        .enumerate()
        .map(|(k, c)| (c - hermite(&values, &slopes, k as f64 / coarse_steps as f64)).abs())
        .fold(0.0, f64::max);
    if !(chi < cfg.tol_demo) {
        return Err(SharpError::ResidualTooLarge {
            residual: chi,
            tol: cfg.tol_demo,
        });
    }
    Ok(OdeSolution {
        steps,
        values,
        slopes,
        chi_residual: chi,
        halving_diff,
        error_estimate: halving_diff / 15.0,
    })
}

/// Sup distance between RK4 runs with `n` and `2n` steps for each `n`, and
/// the fitted order of those distances.
pub fn rk4_order_study(
    eta0: f64,
    cfg: &SharpConfig,
    steps: &[usize],
) -> Result<(Vec<(usize, f64)>, f64), SharpError> {
    let a = Coefficient::new(cfg);
    a.nonsingular(cfg.eps)?;
    let mut rows = Vec::with_capacity(steps.len());
    for &n in steps {
        let n = n.max(1);
        let (c, _) = rk4(eta0, n, &a)?;
        let (f, _) = rk4(eta0, 2 * n, &a)?;
        let d = c
            .iter()
            .enumerate()
            .map(|(k, v)| (v - f[2 * k]).abs())
            .fold(0.0, f64::max);
        rows.push((n, d));
    }
    Ok((rows.clone(), crate::numdiff::fitted_order(&rows)))
}
