use rand::Rng;

use super::{GridError, GridFn, Support, MIN_CELLS};
use crate::numdiff::SmoothFn;

/// Contraction constant the solver requires in the second argument.
pub const LIPSCHITZ_BOUND: f64 = 0.5;
const LIPSCHITZ_SLACK: f64 = 1e-6;
const PROBE_RANGE: f64 = 10.0;
const PROBE_PAIRS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub a: f64,
    pub b: f64,
    pub n: usize,
}

impl GridSpec {
    pub fn new(a: f64, b: f64, n: usize) -> Result<Self, GridError> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(GridError::InvalidInterval { a, b });
        }
        if n < MIN_CELLS {
            return Err(GridError::TooFewCells(n));
        }
        Ok(GridSpec { a, b, n })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixedPoint {
    pub x: GridFn,
    pub iterations: usize,
    pub iteration_bound: usize,
    pub delta0: f64,
    /// Largest sampled difference ratio of `φ(s, ·)`.
    pub lipschitz_estimate: f64,
    /// Largest pointwise ratio between successive iterate gaps.
    pub contraction_ratio: f64,
    /// `‖x − φ(ι, x)‖∞`.
    pub residual: f64,
}

fn eval2(phi: &SmoothFn, s: f64, t: f64) -> Result<f64, GridError> {
    phi.call(&[s, t]).map(|v| v[0]).map_err(GridError::from)
}

/// Sampled check that `|φ(s, t₁) − φ(s, t₂)| ≤ ½ |t₁ − t₂|`.
fn lipschitz_probe(phi: &SmoothFn, nodes: &[f64]) -> Result<f64, GridError> {
    let mut rng = crate::seed::rng(0, "funcgrid/lipschitz");
    let stride = (nodes.len() / 32).max(1);
    let mut worst = 0.0f64;
    for &s in nodes.iter().step_by(stride).chain(nodes.last()) {
        for k in 0..PROBE_PAIRS {
            let t1 = rng.random_range(-PROBE_RANGE..PROBE_RANGE);
            let t2 = if k % 2 == 0 {
                t1 + 1e-4
            } else {
                rng.random_range(-PROBE_RANGE..PROBE_RANGE)
            };
            if t1 == t2 {
                continue;
            }
            let ratio = (eval2(phi, s, t1)? - eval2(phi, s, t2)?).abs() / (t1 - t2).abs();
            if ratio > LIPSCHITZ_BOUND + LIPSCHITZ_SLACK {
                return Err(GridError::LipschitzViolated { ratio, s, t1, t2 });
            }
            worst = worst.max(ratio);
        }
    }
    Ok(worst)
}

/// Bound on the iterations for `Δₙ ≤ ½ tol` given `Δ₀` and contraction ½.
pub fn iteration_bound(delta0: f64, tol: f64) -> usize {
    if delta0 <= 0.5 * tol {
        return 0;
    }
    ((0.5 * tol / delta0).ln() / LIPSCHITZ_BOUND.ln()).ceil() as usize
}

/// Solves `x(s) = φ(s, x(s))` on the grid by iteration from `x ≡ 0`.
pub fn seip_norm_fixed_point(
    phi: &SmoothFn,
    spec: GridSpec,
    tol: f64,
) -> Result<FixedPoint, GridError> {
    if phi.arity_in() != 2 || phi.arity_out() != 1 {
        return Err(GridError::ArityMismatch {
            expected: 2,
            got: phi.arity_in(),
        });
    }
    let spec = GridSpec::new(spec.a, spec.b, spec.n)?;
    let mut x = GridFn::constant(spec.a, spec.b, spec.n, Support::Interval, 0.0)?;
    let nodes = x.nodes();
    let lipschitz_estimate = lipschitz_probe(phi, &nodes)?;

    let step = |x: &GridFn| -> Result<GridFn, GridError> {
        let s = nodes
            .iter()
            .zip(x.samples())
            .map(|(&s, &v)| eval2(phi, s, v))
            .collect::<Result<Vec<_>, _>>()?;
        x.with_samples(s)
    };

    let mut next = step(&x)?;
    let delta0 = next.sup_dist(&x)?;
    let bound = iteration_bound(delta0, tol);
    let mut iterations = 0;
    let mut contraction_ratio = 0.0f64;
    let mut gap: Vec<f64> = diff(&next, &x);
    while crate::numdiff::sup_norm(&gap) > 0.5 * tol {
        if iterations > bound {
            let (sample, error) = worst(&gap);
            return Err(GridError::NoConvergence {
                sample,
                t: nodes[sample],
                error,
            });
        }
        x = next;
        next = step(&x)?;
        iterations += 1;
        let new_gap = diff(&next, &x);
        for (j, (g1, g0)) in new_gap.iter().zip(&gap).enumerate() {
            if *g1 > LIPSCHITZ_BOUND * g0 * (1.0 + 1e-9) + 1e-15 {
                return Err(GridError::LipschitzViolated {
                    ratio: g1 / g0,
                    s: nodes[j],
                    t1: x.samples()[j],
                    t2: next.samples()[j],
                });
            }
            if *g0 > 1e-13 {
                contraction_ratio = contraction_ratio.max(g1 / g0);
            }
        }
        gap = new_gap;
    }
    let residual = step(&next)?.sup_dist(&next)?;
    Ok(FixedPoint {
        x: next,
        iterations,
        iteration_bound: bound,
        delta0,
        lipschitz_estimate,
        contraction_ratio,
        residual,
    })
}

fn diff(a: &GridFn, b: &GridFn) -> Vec<f64> {
    a.samples()
        .iter()
        .zip(b.samples())
        .map(|(p, q)| (p - q).abs())
        .collect()
}

fn worst(v: &[f64]) -> (usize, f64) {
    v.iter()
        .copied()
        .enumerate()
        .fold((0, 0.0), |acc, (j, e)| if e > acc.1 { (j, e) } else { acc })
}
