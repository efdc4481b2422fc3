use std::fmt;
use std::sync::Arc;

use super::{GridError, GridFn};
use crate::numdiff::{richardson, ExtrapConfig, NumError, SmoothFn};

/// `φ ∘ x` for a scalar map `φ`.
pub fn superpose(phi: &SmoothFn, x: &GridFn) -> Result<GridFn, GridError> {
    if phi.arity_in() != 1 || phi.arity_out() != 1 {
        return Err(GridError::ArityMismatch {
            expected: 1,
            got: phi.arity_in(),
        });
    }
    let s = x
        .samples()
        .iter()
        .map(|&v| match phi.call(&[v]) {
            Ok(r) => Ok(r[0]),
            Err(NumError::DomainError { .. }) => Err(GridError::DomainError { t: v }),
            Err(e) => Err(e.into()),
        })
        .collect::<Result<Vec<_>, _>>()?;
    x.with_samples(s)
}

/// `x ∘ (ι + y)`: the spline of `x` read at `t_j + y(t_j)`.
pub fn compose_shift(x: &GridFn, y: &GridFn) -> Result<GridFn, GridError> {
    if !x.same_grid(y) {
        return Err(GridError::GridMismatch);
    }
    let sp = x.spline();
    let s = y
        .samples()
        .iter()
        .enumerate()
        .map(|(j, &yj)| sp.eval_near(j, yj, x.support()))
        .collect::<Result<Vec<_>, _>>()?;
    x.with_samples(s)
}

type GridMap = dyn Fn(&[GridFn]) -> Result<GridFn, GridError> + Send + Sync;

/// An operator taking `arity` grid functions to one.
#[derive(Clone)]
pub struct GridOperator {
    arity: usize,
    label: String,
    f: Arc<GridMap>,
}

impl fmt::Debug for GridOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GridOperator({}, arity {})", self.label, self.arity)
    }
}

impl GridOperator {
    pub fn new(
        arity: usize,
        label: impl Into<String>,
        f: impl Fn(&[GridFn]) -> Result<GridFn, GridError> + Send + Sync + 'static,
    ) -> Self {
        GridOperator {
            arity,
            label: label.into(),
            f: Arc::new(f),
        }
    }

    /// `x ↦ φ ∘ x`.
    pub fn superposition(phi: SmoothFn) -> Self {
        let label = format!("superpose({})", phi.label());
        GridOperator::new(1, label, move |a| superpose(&phi, &a[0]))
    }

    /// `(x, y) ↦ x ∘ (ι + y)`.
    pub fn composition() -> Self {
        GridOperator::new(2, "compose_shift", |a| compose_shift(&a[0], &a[1]))
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn apply(&self, args: &[GridFn]) -> Result<GridFn, GridError> {
        if args.len() != self.arity {
            return Err(GridError::ArityMismatch {
                expected: self.arity,
                got: args.len(),
            });
        }
        (self.f)(args)
    }
}

/// Variation of `op` at `base` along `dir`, extrapolated sample by sample.
pub fn operator_var(
    op: &GridOperator,
    base: &[GridFn],
    dir: &[GridFn],
    cfg: &ExtrapConfig,
) -> Result<GridFn, GridError> {
    cfg.validate()?;
    if base.len() != op.arity() || dir.len() != op.arity() {
        return Err(GridError::ArityMismatch {
            expected: op.arity(),
            got: base.len().min(dir.len()),
        });
    }
    for (x, u) in base.iter().zip(dir) {
        if !x.same_grid(u) || !x.same_grid(&base[0]) {
            return Err(GridError::GridMismatch);
        }
    }
    let f0 = op.apply(base)?;
    let mut failure = None;
    let side = |t: f64| -> Result<Option<Vec<f64>>, NumError> {
        let moved = base
            .iter()
            .zip(dir)
            .map(|(x, u)| x.axpy(t, u))
            .collect::<Result<Vec<_>, _>>();
        let out = moved.and_then(|m| op.apply(&m));
        match out {
            Ok(v) => Ok(Some(
                v.samples()
                    .iter()
                    .zip(f0.samples())
                    .map(|(a, b)| (a - b) / t)
                    .collect(),
            )),
            Err(GridError::DomainError { .. }) => Ok(None),
            Err(e) => {
                failure = Some(e);
                Err(NumError::InvalidConfig("operator failed".into()))
            }
        }
    };
    let est = richardson(f0.samples().len(), cfg, cfg.tol_conv, 1, side);
    if let Some(e) = failure {
        return Err(e);
    }
    match est {
        Ok(e) => f0.with_samples(e.value),
        Err(NumError::NoConvergence {
            component, error, ..
        }) => Err(GridError::NoConvergence {
            sample: component,
            t: f0.t(component),
            error,
        }),
        Err(e) => Err(e.into()),
    }
}

/// `max |x⁽ᵐ⁾(t_j)|` over the nodes in `[c, d]`.
pub fn seminorm(x: &GridFn, m: usize, k: (f64, f64)) -> Result<f64, GridError> {
    let (c, d) = k;
    let slack = 1e-12 * (x.b() - x.a());
    if !(c <= d && c >= x.a() - slack && d <= x.b() + slack) {
        return Err(GridError::InvalidSubinterval { c, d });
    }
    let dm = x.derivative(m)?;
    Ok(dm
        .iter()
        .enumerate()
        .filter(|(j, _)| {
            let t = x.t(*j);
            t >= c - slack && t <= d + slack
        })
        .fold(0.0, |acc, (_, v)| acc.max(v.abs())))
}
