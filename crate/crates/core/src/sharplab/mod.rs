//! Numeric study of the map `h(u) = u + (ϱ(u))′` built from the remainder
//! `ϱ(u) = φ(ξ + u) − φ(ξ) − φ′(ξ) u` of a scalar function `φ`, and of two
//! distinct solutions of `h(u) = ε`.

mod demo;
mod ode;

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::funcgrid::{GridError, GridFn};

pub use demo::{noninjectivity_demo, SharpDemo};
pub use ode::{rk4_order_study, solve_ode, OdeSolution, SINGULAR_THRESHOLD};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SharpError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("quadrature did not settle: {nodes} nodes, error estimate {error:e}")]
    NoConvergence { nodes: usize, error: f64 },
    #[error("coefficient A({eta}) = {value:e} is too close to zero")]
    SingularCoefficient { eta: f64, value: f64 },
    #[error("residual {residual:e} exceeds {tol:e}")]
    ResidualTooLarge { residual: f64, tol: f64 },
    #[error("eta0 equals eps: both preimages would coincide")]
    DegenerateConfig,
    #[error("point {t} outside the domain of phi")]
    DomainError { t: f64 },
    #[error(transparent)]
    Grid(#[from] GridError),
}

type Scalar1 = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// `φ` with its first three derivatives.
#[derive(Clone)]
pub struct PhiPack {
    label: String,
    d: [Scalar1; 4],
}

impl fmt::Debug for PhiPack {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PhiPack({})", self.label)
    }
}

impl PhiPack {
    pub fn new(
        label: &str,
        phi: impl Fn(f64) -> f64 + Send + Sync + 'static,
        d1: impl Fn(f64) -> f64 + Send + Sync + 'static,
        d2: impl Fn(f64) -> f64 + Send + Sync + 'static,
        d3: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        PhiPack {
            label: label.to_string(),
            d: [Arc::new(phi), Arc::new(d1), Arc::new(d2), Arc::new(d3)],
        }
    }

    /// `t + eᵗ`.
    pub fn t_plus_exp() -> Self {
        PhiPack::new(
            "t + exp(t)",
            |t| t + t.exp(),
            |t| 1.0 + t.exp(),
            f64::exp,
            f64::exp,
        )
    }

    pub fn square() -> Self {
        PhiPack::new("t^2", |t| t * t, |t| 2.0 * t, |_| 2.0, |_| 0.0)
    }

    pub fn affine(a: f64, b: f64) -> Self {
        PhiPack::new("affine", move |t| a * t + b, move |_| a, |_| 0.0, |_| 0.0)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// `φ⁽ᵏ⁾(t)` for `k ≤ 3`.
    pub fn eval(&self, k: usize, t: f64) -> f64 {
        (self.d[k])(t)
    }
}

#[derive(Debug, Clone)]
pub struct SharpConfig {
    pub phi: PhiPack,
    pub xi: f64,
    pub eps: f64,
    pub eta0: f64,
    /// Cells of the output grid on `[0, 1]`.
    pub n: usize,
    pub ode_steps: usize,
    pub quad_nodes: usize,
    pub tol_demo: f64,
}

impl Default for SharpConfig {
    fn default() -> Self {
        SharpConfig {
            phi: PhiPack::t_plus_exp(),
            xi: 0.0,
            eps: 0.1,
            eta0: 0.12,
            n: 2000,
            ode_steps: 1000,
            quad_nodes: 33,
            tol_demo: 1e-5,
        }
    }
}

/// Absolute floor of the quadrature acceptance test.
const QUAD_TOL: f64 = 1e-8;

impl SharpConfig {
    pub fn validate(&self) -> Result<(), SharpError> {
        let bad = |m: &str| Err(SharpError::InvalidConfig(m.to_string()));
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return bad("eps must be positive");
        }
        if !self.xi.is_finite() || !self.eta0.is_finite() {
            return bad("xi and eta0 must be finite");
        }
        if self.n < 256 {
            return bad("grid needs at least 256 cells");
        }
        if self.ode_steps < 100 {
            return bad("ode_steps must be at least 100");
        }
        if self.quad_nodes < 17 || self.quad_nodes.is_multiple_of(2) {
            return bad("quad_nodes must be odd and at least 17");
        }
        if !(self.tol_demo > 0.0) {
            return bad("tol_demo must be positive");
        }
        Ok(())
    }

    fn phi_at(&self, k: usize, t: f64) -> Result<f64, SharpError> {
        let v = self.phi.eval(k, t);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(SharpError::DomainError { t })
        }
    }
}

/// Composite Simpson weights on `n` (odd) equispaced nodes of `[0, 1]`.
fn simpson_weights(n: usize) -> Vec<f64> {
    let h = 1.0 / (n - 1) as f64;
    (0..n)
        .map(|i| {
            let w = if i == 0 || i == n - 1 {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            w * h / 3.0
        })
        .collect()
}

/// `∫₀¹∫₀¹ g(s, s₁) ds ds₁` on `n` and `2n − 1` nodes per axis, sharing the
/// fine evaluations. Returns the extrapolated value and the difference.
fn nested_simpson(
    n: usize,
    g: impl Fn(f64, f64) -> Result<f64, SharpError>,
) -> Result<(f64, f64), SharpError> {
    let fine = 2 * n - 1;
    let h = 1.0 / (fine - 1) as f64;
    let mut vals = vec![0.0; fine * fine];
    for i in 0..fine {
        for j in 0..fine {
            vals[i * fine + j] = g(i as f64 * h, j as f64 * h)?;
        }
    }
    let (wf, wc) = (simpson_weights(fine), simpson_weights(n));
    let mut vf = 0.0;
    let mut vc = 0.0;
    for i in 0..fine {
        for j in 0..fine {
            vf += wf[i] * wf[j] * vals[i * fine + j];
        }
    }
    for i in 0..n {
        for j in 0..n {
            vc += wc[i] * wc[j] * vals[2 * i * fine + 2 * j];
        }
    }
    Ok((vf + (vf - vc) / 15.0, (vf - vc).abs()))
}

/// `A(η) = ∫₀¹∫₀¹ s₁s²φ‴(ξ + s₁sη)η² + 2sφ″(ξ + s₁sη)η ds ds₁`.
pub fn coefficient_a(eta: f64, cfg: &SharpConfig) -> Result<f64, SharpError> {
    let (xi, nodes) = (cfg.xi, cfg.quad_nodes.max(3) | 1);
    let (value, error) = nested_simpson(nodes, |s, s1| {
        let p = xi + s1 * s * eta;
        Ok(s1 * s * s * cfg.phi_at(3, p)? * eta * eta + 2.0 * s * cfg.phi_at(2, p)? * eta)
    })?;
    if !(error <= QUAD_TOL * value.abs().max(1.0)) {
        return Err(SharpError::NoConvergence {
            nodes: 2 * nodes - 1,
            error,
        });
    }
    Ok(value)
}

/// `ϱ(u) = φ(ξ + u) − φ(ξ) − φ′(ξ) u` samplewise.
pub fn remainder_rho(u: &GridFn, cfg: &SharpConfig) -> Result<GridFn, SharpError> {
    let (f0, d0) = (cfg.phi_at(0, cfg.xi)?, cfg.phi_at(1, cfg.xi)?);
    let s = u
        .samples()
        .iter()
        .map(|&v| Ok(cfg.phi_at(0, cfg.xi + v)? - f0 - d0 * v))
        .collect::<Result<Vec<_>, SharpError>>()?;
    Ok(u.with_samples(s)?)
}

/// `ϱ(u)` through `∫₀¹∫₀¹ sφ″(ξ + s₁su) u² ds ds₁`.
pub fn remainder_rho_integral(u: &GridFn, cfg: &SharpConfig) -> Result<GridFn, SharpError> {
    let nodes = cfg.quad_nodes.max(3) | 1;
    let s = u
        .samples()
        .iter()
        .map(|&v| {
            nested_simpson(nodes, |s, s1| {
                Ok(s * cfg.phi_at(2, cfg.xi + s1 * s * v)? * v * v)
            })
            .map(|(val, _)| val)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(u.with_samples(s)?)
}

/// `h(u) = u + (ϱ(u))′` with the grid derivative.
pub fn h_map(u: &GridFn, cfg: &SharpConfig) -> Result<GridFn, SharpError> {
    let rho = remainder_rho(u, cfg)?;
    let d = rho.derivative(1)?;
    let s = u.samples().iter().zip(&d).map(|(a, b)| a + b).collect();
    Ok(u.with_samples(s)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcgrid::Support;

    fn cfg() -> SharpConfig {
        SharpConfig::default()
    }

    fn grid(n: usize, f: impl Fn(f64) -> f64) -> GridFn {
        GridFn::sample(0.0, 1.0, n, Support::Interval, f).unwrap()
    }

    #[test]
    fn coefficient_matches_closed_form() {
        let c = cfg();
        for eta in [-0.3, 0.05, 0.1, 0.12, 0.5] {
            let a = coefficient_a(eta, &c).unwrap();
            // A(η) = φ′(ξ + η) − φ′(ξ) for the exponential pack.
            let exact = eta.exp() - 1.0;
            assert!((a - exact).abs() < 1e-12, "eta={eta}: {a} vs {exact}");
        }
        assert!((coefficient_a(0.1, &c).unwrap() - 0.105).abs() < 0.005);
        assert_eq!(coefficient_a(0.0, &c).unwrap(), 0.0);
        let affine = SharpConfig {
            phi: PhiPack::affine(2.0, 1.0),
            ..cfg()
        };
        assert_eq!(coefficient_a(0.7, &affine).unwrap(), 0.0);
    }

    #[test]
    fn coarse_quadrature_reports_no_convergence() {
        let c = SharpConfig {
            phi: PhiPack::new(
                "exp(40t)",
                |t| (40.0 * t).exp() / 1600.0,
                |t| (40.0 * t).exp() / 40.0,
                |t| (40.0 * t).exp(),
                |t| 40.0 * (40.0 * t).exp(),
            ),
            quad_nodes: 17,
            ..cfg()
        };
        assert!(matches!(
            coefficient_a(1.0, &c),
            Err(SharpError::NoConvergence { .. })
        ));
    }

    #[test]
    fn remainder_examples() {
        let c = cfg();
        let u = grid(256, |_| 0.1);
        let r = remainder_rho(&u, &c).unwrap();
        let expect = 0.1f64.exp() - 1.0 - 0.1;
        assert!(r.samples().iter().all(|v| (v - expect).abs() < 1e-15));
        assert!((expect - 0.0051709).abs() < 1e-7);
        let zero = grid(256, |_| 0.0);
        assert!(remainder_rho(&zero, &c)
            .unwrap()
            .samples()
            .iter()
            .all(|v| *v == 0.0));
        let sq = SharpConfig {
            phi: PhiPack::square(),
            ..cfg()
        };
        let u = grid(256, |t| t.sin() - 0.5);
        let r = remainder_rho(&u, &sq).unwrap();
        for (a, b) in r.samples().iter().zip(u.samples()) {
            assert!((a - b * b).abs() < 1e-15);
        }
    }

    #[test]
    fn remainder_forms_agree() {
        let c = cfg();
        let u = grid(256, |t| 0.3 * (3.0 * t).cos());
        let a = remainder_rho(&u, &c).unwrap();
        let b = remainder_rho_integral(&u, &c).unwrap();
        assert!(a.sup_dist(&b).unwrap() < 1e-12);
    }

    #[test]
    fn h_of_constants_and_lines() {
        let c = cfg();
        let u0 = grid(256, |_| c.eps);
        assert_eq!(h_map(&u0, &c).unwrap(), u0);
        let zero = grid(256, |_| 0.0);
        assert_eq!(h_map(&zero, &c).unwrap(), zero);
        let e = c.eps;
        let u = grid(256, |t| e * t);
        let h = h_map(&u, &c).unwrap();
        for j in 0..=256 {
            let t = u.t(j);
            let exact = e * t + e * ((e * t).exp() - 1.0);
            assert!((h.samples()[j] - exact).abs() < 1e-12);
        }
    }

    #[test]
    fn h_identity_with_coefficient() {
        let c = cfg();
        let u = grid(512, |t| 0.1 + 0.2 * (2.0 * t).sin());
        let h = h_map(&u, &c).unwrap();
        let du = u.derivative(1).unwrap();
        for ((uj, dj), hj) in u.samples().iter().zip(&du).zip(h.samples()) {
            let a = coefficient_a(*uj, &c).unwrap();
            assert!((hj - (uj + dj * a)).abs() < 1e-6);
        }
    }

    #[test]
    fn remainder_is_quadratic() {
        let c = cfg();
        let u = grid(256, |t| 1.0 + t * t);
        let q = |s: f64| {
            let su = u.map(|_, v| s * v).unwrap();
            remainder_rho(&su, &c).unwrap().sup_norm() / (s * s)
        };
        let (a, b) = (q(1e-2), q(1e-3));
        assert!(((a - b) / b).abs() < 0.1, "{a} {b}");
    }

    #[test]
    fn config_validation() {
        let mut c = cfg();
        c.quad_nodes = 18;
        assert!(c.validate().is_err());
        c = cfg();
        c.eps = 0.0;
        assert!(c.validate().is_err());
        c = cfg();
        c.n = 100;
        assert!(c.validate().is_err());
        assert!(cfg().validate().is_ok());
    }
}
