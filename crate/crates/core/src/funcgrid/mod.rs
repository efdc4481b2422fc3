//! Sampled functions on a uniform grid over `[a, b]` and the grid versions
//! of superposition, shifted composition, variations and seminorms.

mod fixed_point;
mod ops;
mod spline;
mod stencil;
mod study;

use std::fmt::Write as _;

use thiserror::Error;

use crate::numdiff::NumError;

pub use fixed_point::{
    iteration_bound, seip_norm_fixed_point, FixedPoint, GridSpec, LIPSCHITZ_BOUND,
};
pub use ops::{compose_shift, operator_var, seminorm, superpose, GridOperator};
pub use spline::CubicSpline;
pub use stencil::{fornberg_weights, MAX_STENCIL_ORDER};
pub use study::{shift_variation_study, ShiftStudy, SHIFT_TOL_CONV};

/// Fewest cells a [`GridFn`] may have.
pub const MIN_CELLS: usize = 8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GridError {
    #[error("grid needs at least {MIN_CELLS} cells, got {0}")]
    TooFewCells(usize),
    #[error("invalid interval [{a}, {b}]")]
    InvalidInterval { a: f64, b: f64 },
    #[error("expected {expected} samples, got {got}")]
    SampleCount { expected: usize, got: usize },
    #[error("non-finite sample at node {node}")]
    NonFinite { node: usize },
    #[error("grid functions live on different grids")]
    GridMismatch,
    #[error("point {t} outside the domain")]
    DomainError { t: f64 },
    #[error("derivative order {0} unsupported (max {MAX_STENCIL_ORDER})")]
    OrderUnsupported(usize),
    #[error("subinterval [{c}, {d}] not inside the grid")]
    InvalidSubinterval { c: f64, d: f64 },
    #[error("no convergence at sample {sample} (t = {t}): error estimate {error:e}")]
    NoConvergence { sample: usize, t: f64, error: f64 },
    #[error(
        "Lipschitz ratio {ratio} in the second argument exceeds 1/2 at s = {s}, t = ({t1}, {t2})"
    )]
    LipschitzViolated {
        ratio: f64,
        s: f64,
        t1: f64,
        t2: f64,
    },
    #[error("operator expects {expected} arguments, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Num(#[from] NumError),
}

/// How a grid function extends beyond `[a, b]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum Support {
    /// Defined on `[a, b]` only; evaluation outside is an error.
    Interval,
    /// Compactly supported in `[a, b]`, zero outside.
    Compact,
}

/// `N + 1` samples `x(t_j)`, `t_j = a + j (b − a) / N`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFn {
    a: f64,
    b: f64,
    samples: Vec<f64>,
    support: Support,
}

impl GridFn {
    pub fn new(a: f64, b: f64, samples: Vec<f64>, support: Support) -> Result<Self, GridError> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(GridError::InvalidInterval { a, b });
        }
        if samples.len() < MIN_CELLS + 1 {
            return Err(GridError::TooFewCells(samples.len().saturating_sub(1)));
        }
        if let Some(node) = samples.iter().position(|v| !v.is_finite()) {
            return Err(GridError::NonFinite { node });
        }
        Ok(GridFn {
            a,
            b,
            samples,
            support,
        })
    }

    /// Samples `f` at the `n + 1` nodes.
    pub fn sample(
        a: f64,
        b: f64,
        n: usize,
        support: Support,
        f: impl Fn(f64) -> f64,
    ) -> Result<Self, GridError> {
        if n < MIN_CELLS {
            return Err(GridError::TooFewCells(n));
        }
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(GridError::InvalidInterval { a, b });
        }
        let h = (b - a) / n as f64;
        let samples = (0..=n).map(|j| f(node(a, b, h, n, j))).collect();
        GridFn::new(a, b, samples, support)
    }

    pub fn constant(a: f64, b: f64, n: usize, support: Support, c: f64) -> Result<Self, GridError> {
        GridFn::sample(a, b, n, support, |_| c)
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// Number of cells `N`.
    pub fn cells(&self) -> usize {
        self.samples.len() - 1
    }

    pub fn h(&self) -> f64 {
        (self.b - self.a) / self.cells() as f64
    }

    pub fn support(&self) -> Support {
        self.support
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn t(&self, j: usize) -> f64 {
        node(self.a, self.b, self.h(), self.cells(), j)
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..=self.cells()).map(|j| self.t(j)).collect()
    }

    pub fn same_grid(&self, other: &GridFn) -> bool {
        self.a == other.a && self.b == other.b && self.samples.len() == other.samples.len()
    }

    fn check_grid(&self, other: &GridFn) -> Result<(), GridError> {
        if self.same_grid(other) {
            Ok(())
        } else {
            Err(GridError::GridMismatch)
        }
    }

    /// Same grid and support, new samples.
    pub fn with_samples(&self, samples: Vec<f64>) -> Result<Self, GridError> {
        if samples.len() != self.samples.len() {
            return Err(GridError::SampleCount {
                expected: self.samples.len(),
                got: samples.len(),
            });
        }
        GridFn::new(self.a, self.b, samples, self.support)
    }

    pub fn map(&self, f: impl Fn(f64, f64) -> f64) -> Result<Self, GridError> {
        let s = (0..self.samples.len())
            .map(|j| f(self.t(j), self.samples[j]))
            .collect();
        self.with_samples(s)
    }

    /// `self + t·other`.
    pub fn axpy(&self, t: f64, other: &GridFn) -> Result<Self, GridError> {
        self.check_grid(other)?;
        let s = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(x, u)| x + t * u)
            .collect();
        self.with_samples(s)
    }

    pub fn sub(&self, other: &GridFn) -> Result<Self, GridError> {
        self.axpy(-1.0, other)
    }

    pub fn sup_norm(&self) -> f64 {
        crate::numdiff::sup_norm(&self.samples)
    }

    pub fn sup_dist(&self, other: &GridFn) -> Result<f64, GridError> {
        self.check_grid(other)?;
        Ok(crate::numdiff::sup_diff(&self.samples, &other.samples))
    }

    /// `m`-th derivative at every node by fourth-order finite differences.
    pub fn derivative(&self, m: usize) -> Result<Vec<f64>, GridError> {
        stencil::derivative(&self.samples, self.h(), m)
    }

    /// The derivative as a grid function of the same support.
    pub fn derivative_fn(&self, m: usize) -> Result<GridFn, GridError> {
        self.with_samples(self.derivative(m)?)
    }

    pub fn spline(&self) -> CubicSpline {
        CubicSpline::new(self.a, self.b, &self.samples)
    }

    /// Spline value at `t`, zero outside for compact support.
    pub fn eval(&self, t: f64) -> Result<f64, GridError> {
        self.spline().eval_ext(t, self.support)
    }

    /// `t,value` rows under a header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,value\n");
        for (j, v) in self.samples.iter().enumerate() {
            let _ = writeln!(out, "{:.17e},{:.17e}", self.t(j), v);
        }
        out
    }

    /// Two whitespace-separated columns.
    pub fn to_dat(&self) -> String {
        let mut out = String::new();
        for (j, v) in self.samples.iter().enumerate() {
            let _ = writeln!(out, "{:.17e} {:.17e}", self.t(j), v);
        }
        out
    }
}

fn node(a: f64, b: f64, h: f64, n: usize, j: usize) -> f64 {
    if j == n {
        b
    } else {
        a + j as f64 * h
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction_validates() {
        assert_eq!(
            GridFn::sample(0.0, 1.0, 4, Support::Interval, |t| t),
            Err(GridError::TooFewCells(4))
        );
        assert!(matches!(
            GridFn::sample(1.0, 0.0, 16, Support::Interval, |t| t),
            Err(GridError::InvalidInterval { .. })
        ));
        assert_eq!(
            GridFn::sample(0.0, 1.0, 16, Support::Interval, |t| 1.0 / (t - 0.5)).map(|_| ()),
            Err(GridError::NonFinite { node: 8 })
        );
        let x = GridFn::sample(0.0, 2.0, 8, Support::Compact, |t| t).unwrap();
        assert_eq!(x.cells(), 8);
        assert_eq!(x.t(8), 2.0);
        assert_eq!(x.h(), 0.25);
    }

    #[test]
    fn mismatched_grids_are_rejected() {
        let x = GridFn::sample(0.0, 1.0, 16, Support::Interval, |t| t).unwrap();
        let y = GridFn::sample(0.0, 1.0, 32, Support::Interval, |t| t).unwrap();
        assert_eq!(x.axpy(1.0, &y), Err(GridError::GridMismatch));
    }

    #[test]
    fn csv_and_dat_layout() {
        let x = GridFn::sample(0.0, 1.0, 8, Support::Interval, |t| 2.0 * t).unwrap();
        let csv = x.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("t,value"));
        assert_eq!(csv.lines().count(), 10);
        let last: Vec<f64> = x
            .to_dat()
            .lines()
            .last()
            .unwrap()
            .split_whitespace()
            .map(|s| s.parse().unwrap())
            .collect();
        assert_eq!(last, vec![1.0, 2.0]);
    }
}
