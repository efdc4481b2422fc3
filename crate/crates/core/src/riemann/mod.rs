//! Riemann integration of curves `[a, b] → ℝᵐ` by tagged partitions, the
//! integral operators `Iᵏ`, and consistency checks linking integrals,
//! variations and difference quotients.

mod checks;
mod exact;
mod suite;

use std::fmt::Write as _;
use std::sync::Arc;

use thiserror::Error;

use crate::numdiff::NumError;

pub use checks::{
    integral_op_fn, integral_op_ik, lemma50_variation_residual, midpoint_error_slope,
    mvt_containment_check, thm52_identity_residual, under_integral_deriv_check, Family,
};
pub use exact::{integral_op_poly, lemma50_exact};
pub use suite::integral_identity_suite;

/// Cell cap for [`integrate`].
pub const MAX_CELLS: usize = 1 << 20;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RiemannError {
    #[error("partition spans [{pa}, {pb}] but the curve lives on [{ca}, {cb}]")]
    PartitionMismatch { pa: f64, pb: f64, ca: f64, cb: f64 },
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("need a < b, got [{0}, {1}]")]
    InvalidInterval(f64, f64),
    #[error("no convergence after {cells} cells: last difference {diff:e}")]
    NoConvergence { cells: usize, diff: f64 },
    #[error("segment leaves the domain box at s = {s}")]
    DomainError { s: f64 },
    #[error("not differentiable at sample s = {s}")]
    NotDifferentiable { s: f64 },
    #[error(transparent)]
    Num(#[from] NumError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TagRule {
    Left,
    Midpoint,
    Right,
}

/// Nodes `t₀ ≤ … ≤ t_k` with one tag `sᵢ ∈ [tᵢ, tᵢ₊₁]` per cell.
#[derive(Debug, Clone, PartialEq)]
pub struct TaggedPartition {
    nodes: Vec<f64>,
    tags: Vec<f64>,
}

impl TaggedPartition {
    pub fn new(nodes: Vec<f64>, tags: Vec<f64>) -> Result<Self, RiemannError> {
        let bad = |m: String| Err(RiemannError::InvalidPartition(m));
        if nodes.len() < 2 {
            return bad("need at least two nodes".into());
        }
        if tags.len() != nodes.len() - 1 {
            return bad(format!("{} cells but {} tags", nodes.len() - 1, tags.len()));
        }
        for (i, w) in nodes.windows(2).enumerate() {
            if !(w[0] <= w[1]) {
                return bad(format!("nodes decrease at index {i}"));
            }
            if !(w[0] <= tags[i] && tags[i] <= w[1]) {
                return bad(format!("tag {} outside cell [{}, {}]", tags[i], w[0], w[1]));
            }
        }
        Ok(TaggedPartition { nodes, tags })
    }

    pub fn uniform(a: f64, b: f64, cells: usize, rule: TagRule) -> Self {
        assert!(cells >= 1 && a <= b);
        let h = (b - a) / cells as f64;
        let mut nodes: Vec<f64> = (0..=cells).map(|i| a + i as f64 * h).collect();
        nodes[cells] = b;
        let tags = nodes
            .windows(2)
            .map(|w| match rule {
                TagRule::Left => w[0],
                TagRule::Midpoint => 0.5 * (w[0] + w[1]),
                TagRule::Right => w[1],
            })
            .collect();
        TaggedPartition { nodes, tags }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn tags(&self) -> &[f64] {
        &self.tags
    }

    pub fn cells(&self) -> usize {
        self.tags.len()
    }

    pub fn mesh(&self) -> f64 {
        self.nodes.windows(2).fold(0.0, |m, w| m.max(w[1] - w[0]))
    }

    pub fn start(&self) -> f64 {
        self.nodes[0]
    }

    pub fn end(&self) -> f64 {
        self.nodes[self.nodes.len() - 1]
    }
}

/// Curve `γ : [a, b] → ℝᵐ`.
#[derive(Clone)]
pub struct Curve {
    a: f64,
    b: f64,
    dim: usize,
    eval: Arc<dyn Fn(f64) -> Vec<f64> + Send + Sync>,
}

impl std::fmt::Debug for Curve {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Curve([{}, {}] → ℝ^{})", self.a, self.b, self.dim)
    }
}

impl Curve {
    pub fn new(
        a: f64,
        b: f64,
        dim: usize,
        f: impl Fn(f64) -> Vec<f64> + Send + Sync + 'static,
    ) -> Self {
        Curve {
            a,
            b,
            dim,
            eval: Arc::new(f),
        }
    }

    pub fn scalar(a: f64, b: f64, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Curve::new(a, b, 1, move |s| vec![f(s)])
    }

    pub fn start(&self) -> f64 {
        self.a
    }

    pub fn end(&self) -> f64 {
        self.b
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn at(&self, s: f64) -> Vec<f64> {
        (self.eval)(s)
    }

    /// The same evaluator on another interval.
    pub fn on(&self, a: f64, b: f64) -> Curve {
        Curve {
            a,
            b,
            ..self.clone()
        }
    }
}

/// `Σᵢ (tᵢ₊₁ − tᵢ) γ(sᵢ)`.
pub fn riemann_sum(gamma: &Curve, p: &TaggedPartition) -> Result<Vec<f64>, RiemannError> {
    if p.start() != gamma.a || p.end() != gamma.b {
        return Err(RiemannError::PartitionMismatch {
            pa: p.start(),
            pb: p.end(),
            ca: gamma.a,
            cb: gamma.b,
        });
    }
    Ok(sum_over(gamma, p))
}

fn sum_over(gamma: &Curve, p: &TaggedPartition) -> Vec<f64> {
    let mut acc = vec![0.0; gamma.dim];
    for (w, &s) in p.nodes.windows(2).zip(&p.tags) {
        let v = gamma.at(s);
        let dt = w[1] - w[0];
        for (a, x) in acc.iter_mut().zip(v) {
            *a += dt * x;
        }
    }
    acc
}

/// Uniform midpoint sum with `cells` cells on `[a, b]`.
pub(crate) fn midpoint_sum(gamma: &Curve, a: f64, b: f64, cells: usize) -> Vec<f64> {
    sum_over(
        gamma,
        &TaggedPartition::uniform(a, b, cells, TagRule::Midpoint),
    )
}

/// One refinement step of [`integrate`].
#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub cells: usize,
    pub sum: Vec<f64>,
    pub diff: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Integral {
    pub value: Vec<f64>,
    pub error: f64,
    pub cells: usize,
    pub table: Vec<TableRow>,
}

impl Integral {
    /// Convergence table with header `cells,sum_1..sum_m,diff`.
    pub fn to_csv(&self) -> String {
        let m = self.value.len();
        let mut out = String::from("cells");
        for i in 1..=m {
            let _ = write!(out, ",sum_{i}");
        }
        out.push_str(",diff\n");
        for row in &self.table {
            let _ = write!(out, "{}", row.cells);
            for v in &row.sum {
                let _ = write!(out, ",{v:.17e}");
            }
            match row.diff {
                Some(d) => {
                    let _ = writeln!(out, ",{d:.6e}");
                }
                None => out.push_str(",\n"),
            }
        }
        out
    }
}

const MIN_CELLS: usize = 8;

fn check_interval(a: f64, b: f64) -> Result<(), RiemannError> {
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(RiemannError::InvalidInterval(a, b));
    }
    Ok(())
}

/// Midpoint sums on uniformly doubled partitions until two successive
/// sums differ by less than `tol` in the sup-norm.
pub fn integrate_table(gamma: &Curve, a: f64, b: f64, tol: f64) -> Result<Integral, RiemannError> {
    check_interval(a, b)?;
    let mut cells = 1;
    let mut prev = midpoint_sum(gamma, a, b, cells);
    let mut table = vec![TableRow {
        cells,
        sum: prev.clone(),
        diff: None,
    }];
    while cells < MAX_CELLS {
        cells *= 2;
        let next = midpoint_sum(gamma, a, b, cells);
        let diff = crate::numdiff::sup_diff(&next, &prev);
        table.push(TableRow {
            cells,
            sum: next.clone(),
            diff: Some(diff),
        });
        if !diff.is_finite() {
            break;
        }
        if diff < tol && cells >= MIN_CELLS {
            return Ok(Integral {
                value: next,
                error: diff,
                cells,
                table,
            });
        }
        prev = next;
    }
    let diff = table.last().and_then(|r| r.diff).unwrap_or(f64::INFINITY);
    Err(RiemannError::NoConvergence { cells, diff })
}

/// `∫ₐᵇ γ` and the last successive difference.
pub fn integrate(gamma: &Curve, a: f64, b: f64, tol: f64) -> Result<(Vec<f64>, f64), RiemannError> {
    integrate_table(gamma, a, b, tol).map(|r| (r.value, r.error))
}

/// Midpoint sums extrapolated in the cell count (error `O(h⁴)` per column
/// for smooth integrands), stopped on successive extrapolants.
pub(crate) fn quad(gamma: &Curve, a: f64, b: f64, tol: f64) -> Result<Vec<f64>, RiemannError> {
    check_interval(a, b)?;
    let mut rows: Vec<Vec<Vec<f64>>> = Vec::new();
    let mut cells = 2;
    while cells <= MAX_CELLS {
        let mut row = vec![midpoint_sum(gamma, a, b, cells)];
        if let Some(prev) = rows.last() {
            for i in 1..=prev.len().min(5) {
                let f = 4f64.powi(i as i32);
                let v = row[i - 1]
                    .iter()
                    .zip(&prev[i - 1])
                    .map(|(x, y)| x + (x - y) / (f - 1.0))
                    .collect();
                row.push(v);
            }
            let last = row.len() - 1;
            let diff = crate::numdiff::sup_diff(&row[last], &prev[last.min(prev.len() - 1)]);
            let scale = crate::numdiff::sup_norm(&row[last]).max(1.0);
            if diff < tol * scale && cells >= 16 {
                return Ok(row.pop().unwrap());
            }
        }
        rows.push(row);
        cells *= 2;
    }
    Err(RiemannError::NoConvergence {
        cells: MAX_CELLS,
        diff: f64::NAN,
    })
}

/// `(4 M₂ₙ − Mₙ)/3` on fixed partitions: a smooth function of the
/// integrand's parameters, suitable for numeric differentiation.
pub(crate) fn fixed_quad(gamma: &Curve, a: f64, b: f64, cells: usize) -> Vec<f64> {
    let m1 = midpoint_sum(gamma, a, b, cells);
    let m2 = midpoint_sum(gamma, a, b, 2 * cells);
    m2.iter()
        .zip(&m1)
        .map(|(x, y)| (4.0 * x - y) / 3.0)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn sum_examples() {
        let id = Curve::scalar(0.0, 1.0, |s| s);
        let p = TaggedPartition::new(vec![0.0, 0.5, 1.0], vec![0.0, 0.5]).unwrap();
        assert_eq!(riemann_sum(&id, &p).unwrap(), vec![0.25]);
        let c = Curve::new(-1.0, 2.0, 2, |_| vec![2.0, -1.0]);
        let p = TaggedPartition::new(vec![-1.0, -0.3, 0.9, 2.0], vec![-1.0, 0.0, 2.0]).unwrap();
        let v = riemann_sum(&c, &p).unwrap();
        assert_abs_diff_eq!(v[0], 6.0, epsilon = 1e-14);
        assert_abs_diff_eq!(v[1], -3.0, epsilon = 1e-14);
        let sq = Curve::scalar(0.0, 1.0, |s| s * s);
        let p = TaggedPartition::uniform(0.0, 1.0, 1, TagRule::Midpoint);
        assert_eq!(riemann_sum(&sq, &p).unwrap(), vec![0.25]);
    }

    #[test]
    fn partition_validation() {
        assert!(TaggedPartition::new(vec![0.0, 1.0], vec![1.5]).is_err());
        assert!(TaggedPartition::new(vec![0.0, 1.0, 0.5], vec![0.5, 0.7]).is_err());
        assert!(TaggedPartition::new(vec![0.0, 1.0], vec![]).is_err());
        let id = Curve::scalar(0.0, 1.0, |s| s);
        let p = TaggedPartition::uniform(0.0, 2.0, 4, TagRule::Left);
        assert!(matches!(
            riemann_sum(&id, &p),
            Err(RiemannError::PartitionMismatch { .. })
        ));
        assert_eq!(p.mesh(), 0.5);
    }

    #[test]
    fn integrate_examples() {
        let tol = 1e-8;
        let (v, e) = integrate(&Curve::scalar(0.0, 1.0, |s| s), 0.0, 1.0, tol).unwrap();
        assert_abs_diff_eq!(v[0], 0.5, epsilon = tol);
        assert!(e < tol);
        let (v, _) = integrate(&Curve::scalar(0.0, 1.0, f64::exp), 0.0, 1.0, tol).unwrap();
        assert_abs_diff_eq!(v[0], std::f64::consts::E - 1.0, epsilon = tol);
        let (v, _) = integrate(&Curve::scalar(0.0, 1.0, |s| s * s), 0.0, 1.0, tol).unwrap();
        assert_abs_diff_eq!(v[0], 1.0 / 3.0, epsilon = tol);
        assert!(matches!(
            integrate(&Curve::scalar(0.0, 1.0, |s| s), 1.0, 1.0, tol),
            Err(RiemannError::InvalidInterval(..))
        ));
    }

    #[test]
    fn divergent_integrand_does_not_converge() {
        // Improper at 0: each doubling adds about ln 2.
        let pole = Curve::scalar(0.0, 1.0, |s| 1.0 / s);
        assert!(matches!(
            integrate(&pole, 0.0, 1.0, 1e-12),
            Err(RiemannError::NoConvergence { .. })
        ));
    }

    #[test]
    fn table_csv_has_header_and_rows() {
        let r = integrate_table(&Curve::scalar(0.0, 1.0, f64::exp), 0.0, 1.0, 1e-6).unwrap();
        let csv = r.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "cells,sum_1,diff");
        assert_eq!(lines.count(), r.table.len());
    }

    #[test]
    fn romberg_and_fixed_quadrature() {
        let e = Curve::scalar(0.0, 1.0, f64::exp);
        assert_abs_diff_eq!(
            quad(&e, 0.0, 1.0, 1e-13).unwrap()[0],
            std::f64::consts::E - 1.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            fixed_quad(&e, 0.0, 1.0, 256)[0],
            std::f64::consts::E - 1.0,
            epsilon = 1e-11
        );
    }

    #[test]
    fn integral_is_linear_and_contained() {
        let tol = 1e-9;
        let g1 = Curve::scalar(0.0, 1.0, f64::sin);
        let g2 = Curve::scalar(0.0, 1.0, |s| s.powi(3));
        let comb = Curve::scalar(0.0, 1.0, |s| 2.0 * s.sin() - 3.0 * s.powi(3));
        let i1 = integrate(&g1, 0.0, 1.0, tol).unwrap().0[0];
        let i2 = integrate(&g2, 0.0, 1.0, tol).unwrap().0[0];
        let ic = integrate(&comb, 0.0, 1.0, tol).unwrap().0[0];
        assert!((ic - (2.0 * i1 - 3.0 * i2)).abs() < 5.0 * tol);
        // sin maps [0, 1] into [0, sin 1].
        assert!((0.0..=1f64.sin() + tol).contains(&i1));
    }
}
