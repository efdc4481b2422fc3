use std::cell::RefCell;
use std::collections::HashMap;

use serde::Serialize;

use super::{axpy, sup_diff, sup_norm, ExtrapConfig, NumError, SmoothFn};

/// Highest nesting depth accepted by [`seip_var_k`].
pub const MAX_NUMERIC_ORDER: usize = 4;

const SAFE: f64 = 2.0;
const KINK_RATIO: f64 = 0.25;
const KINK_FLOOR: f64 = 1e-6;
/// Tolerance growth per nesting level.
const LEVEL_RELAX: f64 = 1e3;

/// Result of one extrapolated limit.
#[derive(Debug, Clone, PartialEq)]
pub struct Estimate {
    pub value: Vec<f64>,
    pub error: f64,
    /// Sup-norm gap between the `+t` and `−t` quotients at the last level.
    pub gap: f64,
    pub levels: usize,
}

/// Order-`k` variation `δᵏf(x)[u₁..u_k]` with its error estimate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JetTensor {
    pub order: usize,
    pub base: Vec<f64>,
    pub dirs: Vec<Vec<f64>>,
    pub value: Vec<f64>,
    pub error: f64,
    pub converged: bool,
}

/// Memoized evaluations of one map, confined to a single call.
struct Cached<'a> {
    f: &'a SmoothFn,
    memo: RefCell<HashMap<Vec<u64>, Vec<f64>>>,
}

impl<'a> Cached<'a> {
    fn new(f: &'a SmoothFn) -> Self {
        Cached {
            f,
            memo: RefCell::new(HashMap::new()),
        }
    }

    /// `None` outside the domain box.
    fn eval(&self, x: &[f64]) -> Result<Option<Vec<f64>>, NumError> {
        if !self.f.in_domain(x) {
            return Ok(None);
        }
        let key: Vec<u64> = x.iter().map(|v| v.to_bits()).collect();
        if let Some(v) = self.memo.borrow().get(&key) {
            return Ok(Some(v.clone()));
        }
        let v = self.f.call(x)?;
        self.memo.borrow_mut().insert(key, v.clone());
        Ok(Some(v))
    }
}

fn check_arity(f: &SmoothFn, v: &[f64]) -> Result<(), NumError> {
    if v.len() != f.arity_in() {
        return Err(NumError::ArityMismatch {
            expected: f.arity_in(),
            got: v.len(),
        });
    }
    Ok(())
}

/// Extrapolates symmetric quotients `side(±t₀rʲ)` to `t = 0`.
///
/// `side` returns `None` when the step leaves the domain; leading levels
/// may be skipped that way, later ones end the sequence. A returned
/// `DomainError` carries an empty point for the caller to fill in.
pub(crate) fn richardson(
    m: usize,
    cfg: &ExtrapConfig,
    tol: f64,
    level: usize,
    mut side: impl FnMut(f64) -> Result<Option<Vec<f64>>, NumError>,
) -> Result<Estimate, NumError> {
    let factor = cfg.ratio.powi(-2);
    let cols = cfg.richardson_order;
    let mut prev: Vec<Vec<f64>> = Vec::new();
    let mut best = vec![f64::NAN; m];
    let mut best_err = vec![f64::INFINITY; m];
    let mut settled = vec![false; m];
    let mut gaps = Vec::new();
    let mut rows = 0usize;

    for j in 0..cfg.max_levels {
        let h = cfg.t0 * cfg.ratio.powi(j as i32);
        let (qp, qm) = match (side(h)?, side(-h)?) {
            (Some(a), Some(b)) => (a, b),
            _ if rows == 0 => continue,
            _ => break,
        };
        gaps.push(sup_diff(&qp, &qm));
        let avg: Vec<f64> = qp.iter().zip(&qm).map(|(a, b)| 0.5 * (a + b)).collect();
        let ncol = (rows + 1).min(cols);
        let mut row = vec![avg];
        for i in 1..ncol {
            let d = factor.powi(i as i32) - 1.0;
            let next = row[i - 1]
                .iter()
                .zip(&prev[i - 1])
                .map(|(a, b)| a + (a - b) / d)
                .collect();
            row.push(next);
        }
        for c in 0..m {
            if settled[c] {
                continue;
            }
            if rows == 0 {
                best[c] = row[0][c];
                continue;
            }
            for i in 1..ncol {
                let e = (row[i][c] - row[i - 1][c])
                    .abs()
                    .max((row[i][c] - prev[i - 1][c]).abs());
                if e < best_err[c] {
                    best_err[c] = e;
                    best[c] = row[i][c];
                }
            }
            if rows >= cols {
                let last = ncol - 1;
                if (row[last][c] - prev[last][c]).abs() >= SAFE * best_err[c] {
                    settled[c] = true;
                }
            }
        }
        prev = row;
        rows += 1;
        if settled.iter().all(|&s| s) && rows >= 3 {
            break;
        }
    }

    if rows < 3 {
        return Err(NumError::DomainError { point: Vec::new() });
    }
    let scale = sup_norm(&best).max(1.0);
    let (first, last) = (gaps[0], gaps[gaps.len() - 1]);
    if last > KINK_RATIO * first && last > KINK_FLOOR * scale {
        return Err(NumError::NotDifferentiable { gap: last });
    }
    let error = best_err.iter().fold(0.0, |a: f64, &b| a.max(b));
    let worst = best
        .iter()
        .zip(&best_err)
        .position(|(v, e)| !(*e <= tol * v.abs().max(1.0)) || !v.is_finite());
    if let Some(component) = worst {
        return Err(NumError::NoConvergence {
            level,
            component,
            error,
        });
    }
    Ok(Estimate {
        value: best,
        error,
        gap: last,
        levels: rows,
    })
}

/// `δⁱf(x)[dirs]`, or `None` when `x` leaves the domain.
fn level_value(
    c: &Cached,
    x: &[f64],
    dirs: &[Vec<f64>],
    cfg: &ExtrapConfig,
) -> Result<Option<Estimate>, NumError> {
    let Some((u, inner)) = dirs.split_last() else {
        return Ok(c.eval(x)?.map(|v| Estimate {
            value: v,
            error: 0.0,
            gap: 0.0,
            levels: 0,
        }));
    };
    let Some(base) = level_value(c, x, inner, cfg)? else {
        return Ok(None);
    };
    let level = dirs.len();
    let tol = cfg.tol_conv * LEVEL_RELAX.powi(level as i32 - 1);
    let side = |h: f64| -> Result<Option<Vec<f64>>, NumError> {
        let moved = match level_value(c, &axpy(x, h, u), inner, cfg) {
            Ok(v) => v,
            Err(NumError::DomainError { .. }) => None,
            Err(e) => return Err(e),
        };
        Ok(moved.map(|m| {
            m.value
                .iter()
                .zip(&base.value)
                .map(|(a, b)| (a - b) / h)
                .collect()
        }))
    };
    match richardson(c.f.arity_out(), cfg, tol, level, side) {
        Ok(mut est) => {
            est.error = est.error.max(base.error);
            Ok(Some(est))
        }
        Err(NumError::DomainError { .. }) => Err(NumError::DomainError { point: x.to_vec() }),
        Err(e) => Err(e),
    }
}

/// `(f(x + tu) − f(x)) / t` for `t ≠ 0`.
pub fn difq_num(f: &SmoothFn, x: &[f64], u: &[f64], t: f64) -> Result<Vec<f64>, NumError> {
    check_arity(f, x)?;
    check_arity(f, u)?;
    if t == 0.0 {
        return Err(NumError::ZeroStep);
    }
    let fx = f.call(x)?;
    let fs = f.call(&axpy(x, t, u))?;
    Ok(fs.iter().zip(&fx).map(|(a, b)| (a - b) / t).collect())
}

/// First order variation with full extrapolation diagnostics.
pub fn seip_var_est(
    f: &SmoothFn,
    x: &[f64],
    u: &[f64],
    cfg: &ExtrapConfig,
) -> Result<Estimate, NumError> {
    cfg.validate()?;
    check_arity(f, x)?;
    check_arity(f, u)?;
    let c = Cached::new(f);
    level_value(&c, x, std::slice::from_ref(&u.to_vec()), cfg)?
        .ok_or_else(|| NumError::DomainError { point: x.to_vec() })
}

/// `δf(x, u)` and its error estimate.
pub fn seip_var(
    f: &SmoothFn,
    x: &[f64],
    u: &[f64],
    cfg: &ExtrapConfig,
) -> Result<(Vec<f64>, f64), NumError> {
    seip_var_est(f, x, u, cfg).map(|e| (e.value, e.error))
}

/// `δᵏf(x)[u₁..u_k]`: level `i + 1` differentiates level `i` in its base
/// point along `u_{i+1}`.
pub fn seip_var_k(
    f: &SmoothFn,
    x: &[f64],
    dirs: &[Vec<f64>],
    cfg: &ExtrapConfig,
) -> Result<JetTensor, NumError> {
    cfg.validate()?;
    if dirs.len() > MAX_NUMERIC_ORDER {
        return Err(NumError::OrderCap(dirs.len()));
    }
    check_arity(f, x)?;
    for d in dirs {
        check_arity(f, d)?;
    }
    let c = Cached::new(f);
    let est = level_value(&c, x, dirs, cfg)?
        .ok_or_else(|| NumError::DomainError { point: x.to_vec() })?;
    Ok(JetTensor {
        order: dirs.len(),
        base: x.to_vec(),
        dirs: dirs.to_vec(),
        value: est.value,
        error: est.error,
        converged: true,
    })
}

/// The quotient map extended to `t = 0` by the variation.
pub fn bgn_difq_num(
    f: &SmoothFn,
    x: &[f64],
    u: &[f64],
    t: f64,
    cfg: &ExtrapConfig,
) -> Result<Vec<f64>, NumError> {
    if t == 0.0 {
        seip_var(f, x, u, cfg).map(|(v, _)| v)
    } else {
        difq_num(f, x, u, t)
    }
}

/// `δf` as a map `(x, u) ↦ δf(x, u)` on `ℝ²ⁿ`; failures evaluate to NaN.
pub fn variation_fn(f: &SmoothFn, cfg: &ExtrapConfig) -> SmoothFn {
    let n = f.arity_in();
    let m = f.arity_out();
    let (g, cfg) = (f.clone(), *cfg);
    let out = SmoothFn::new(2 * n, m, move |xu| {
        seip_var(&g, &xu[..n], &xu[n..], &cfg)
            .map(|(v, _)| v)
            .unwrap_or_else(|_| vec![f64::NAN; m])
    })
    .with_label(&format!("δ{}", f.label()));
    match f.domain() {
        Some(d) => {
            let mut d = d.to_vec();
            d.extend(std::iter::repeat_n((f64::NEG_INFINITY, f64::INFINITY), n));
            out.with_domain(d)
        }
        None => out,
    }
}

/// `f^[1]` as a map `(x, u, t) ↦ bgn_difq_num(f, x, u, t)` on `ℝ²ⁿ⁺¹`.
pub fn difq_fn(f: &SmoothFn, cfg: &ExtrapConfig) -> SmoothFn {
    let n = f.arity_in();
    let m = f.arity_out();
    let (g, cfg) = (f.clone(), *cfg);
    SmoothFn::new(2 * n + 1, m, move |p| {
        bgn_difq_num(&g, &p[..n], &p[n..2 * n], p[2 * n], &cfg)
            .unwrap_or_else(|_| vec![f64::NAN; m])
    })
    .with_label(&format!("{}^[1]", f.label()))
}
