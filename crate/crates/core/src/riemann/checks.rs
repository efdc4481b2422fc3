use std::sync::Arc;

use super::{fixed_quad, midpoint_sum, quad, Curve, RiemannError};
use crate::numdiff::{axpy, bgn_difq_num, seip_var, sup_diff, ExtrapConfig, NumError, SmoothFn};
use crate::report::{Check, VerificationReport, Witness};

/// Relative stopping tolerance of the internal quadrature in the identity
/// checks.
const CHECK_QUAD_TOL: f64 = 1e-11;
/// Cells of the fixed quadrature that makes integrals differentiable in
/// their parameters.
const FIXED_CELLS: usize = 256;

/// A one-parameter family of scalar curves `(s, t) ↦ Γ(s)(t)`.
#[derive(Clone)]
pub struct Family(Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>);

impl Family {
    pub fn new(f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        Family(Arc::new(f))
    }

    pub fn at(&self, s: f64, t: f64) -> f64 {
        (self.0)(s, t)
    }
}

fn segment_check(g: &SmoothFn, x: &[f64], u: &[f64]) -> Result<(), RiemannError> {
    // Boxes are convex: the endpoints decide.
    for s in [0.0, 1.0] {
        if !g.in_domain(&axpy(x, s, u)) {
            return Err(RiemannError::DomainError { s });
        }
    }
    Ok(())
}

/// `∫₀¹ sᵏ g(x + su) ds` by [`super::integrate`].
pub fn integral_op_ik(
    g: &SmoothFn,
    k: u32,
    x: &[f64],
    u: &[f64],
    tol: f64,
) -> Result<Vec<f64>, RiemannError> {
    segment_check(g, x, u)?;
    let (g2, x2, u2) = (g.clone(), x.to_vec(), u.to_vec());
    let curve = Curve::new(0.0, 1.0, g.arity_out(), move |s| {
        let w = s.powi(k as i32);
        g2.raw(&axpy(&x2, s, &u2))
            .into_iter()
            .map(|v| w * v)
            .collect()
    });
    super::integrate(&curve, 0.0, 1.0, tol).map(|(v, _)| v)
}

/// `Iᵏg` as a map `(x, u) ↦ ∫₀¹ sᵏ g(x + su) ds` on `ℝ²ⁿ`, by a fixed
/// extrapolated midpoint rule; NaN where the segment leaves the box.
pub fn integral_op_fn(g: &SmoothFn, k: u32) -> SmoothFn {
    let n = g.arity_in();
    let m = g.arity_out();
    let g2 = g.clone();
    SmoothFn::new(2 * n, m, move |xu| {
        let (x, u) = xu.split_at(n);
        if segment_check(&g2, x, u).is_err() {
            return vec![f64::NAN; m];
        }
        let (g3, x3, u3) = (g2.clone(), x.to_vec(), u.to_vec());
        let curve = Curve::new(0.0, 1.0, m, move |s| {
            let w = s.powi(k as i32);
            g3.raw(&axpy(&x3, s, &u3))
                .into_iter()
                .map(|v| w * v)
                .collect()
        });
        fixed_quad(&curve, 0.0, 1.0, FIXED_CELLS)
    })
    .with_label(&format!("I^{k}{}", g.label()))
}

/// Mean value containment for a scalar curve: `c(b) − c(a)` lies in
/// `(b − a)·[min c′, max c′]` over the sampled derivatives, widened by `tol`.
pub fn mvt_containment_check(
    c: &Curve,
    sample_count: usize,
    tol: f64,
) -> Result<VerificationReport, RiemannError> {
    assert_eq!(c.dim(), 1, "scalar curve expected");
    let (a, b) = (c.start(), c.end());
    let c2 = c.clone();
    let f = SmoothFn::new(1, 1, move |s| c2.at(s[0])).with_domain(vec![(a, b)]);
    let cfg = ExtrapConfig::default();
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..sample_count {
        let s = a + (i as f64 + 0.5) * (b - a) / sample_count as f64;
        let d = match seip_var(&f, &[s], &[1.0], &cfg) {
            Ok((d, _)) => d[0],
            Err(NumError::NotDifferentiable { .. }) => {
                return Err(RiemannError::NotDifferentiable { s })
            }
            Err(e) => return Err(e.into()),
        };
        lo = lo.min(d);
        hi = hi.max(d);
    }
    let inc = c.at(b)[0] - c.at(a)[0];
    let (lo_b, hi_b) = ((b - a) * lo - tol, (b - a) * hi + tol);
    let mut check = Check::new("mvt_containment").with_tolerance(tol.max(f64::MIN_POSITIVE));
    let outside = (lo_b - inc).max(inc - hi_b).max(0.0);
    check.residual(outside, || {
        Witness::new(0)
            .with("increment", inc)
            .with("lo", lo)
            .with("hi", hi)
    });
    check.note(format!(
        "increment {inc:.10} in [{lo:.10}, {hi:.10}]·{}",
        b - a
    ));
    let mut r = VerificationReport::new("mean value containment", None);
    r.push(check);
    Ok(r)
}

/// `|c′(t) − ∫₀¹ ∂ₜΓ(s)(t) ds|` for `c(t) = ∫₀¹ Γ(s)(t) ds`.
pub fn under_integral_deriv_check(family: &Family, t: f64, tol: f64) -> Result<f64, RiemannError> {
    let cfg = ExtrapConfig::default();
    let fam = family.clone();
    let c = SmoothFn::new(1, 1, move |t| {
        let f2 = fam.clone();
        let tt = t[0];
        fixed_quad(
            &Curve::scalar(0.0, 1.0, move |s| f2.at(s, tt)),
            0.0,
            1.0,
            FIXED_CELLS,
        )
    });
    let (lhs, _) = seip_var(&c, &[t], &[1.0], &cfg)?;
    let fam = family.clone();
    let dgamma = Curve::scalar(0.0, 1.0, move |s| {
        let f2 = fam.clone();
        let g = SmoothFn::new(1, 1, move |t| vec![f2.at(s, t[0])]);
        seip_var(&g, &[t], &[1.0], &cfg).map_or(f64::NAN, |(v, _)| v[0])
    });
    let rhs = quad(&dgamma, 0.0, 1.0, tol)?;
    Ok((lhs[0] - rhs[0]).abs())
}

/// `‖f^[1](x, u, t) − ∫₀¹ δf(x + stu, u) ds‖∞`.
pub fn thm52_identity_residual(
    f: &SmoothFn,
    x: &[f64],
    u: &[f64],
    t: f64,
    cfg: &ExtrapConfig,
) -> Result<f64, RiemannError> {
    let tu: Vec<f64> = u.iter().map(|v| t * v).collect();
    segment_check(f, x, &tu)?;
    let lhs = bgn_difq_num(f, x, u, t, cfg)?;
    let (f2, x2, u2, tu2, cfg2) = (f.clone(), x.to_vec(), u.to_vec(), tu, *cfg);
    let integrand = Curve::new(0.0, 1.0, f.arity_out(), move |s| {
        seip_var(&f2, &axpy(&x2, s, &tu2), &u2, &cfg2)
            .map_or_else(|_| vec![f64::NAN; f2.arity_out()], |(v, _)| v)
    });
    let rhs = quad(&integrand, 0.0, 1.0, CHECK_QUAD_TOL)?;
    Ok(sup_diff(&lhs, &rhs))
}

/// `‖δ(Iᵏg)((x, u), (y, v)) − ∫₀¹ sᵏ δg(x + su, y) + sᵏ⁺¹ δg(x + su, v) ds‖∞`.
pub fn lemma50_variation_residual(
    g: &SmoothFn,
    k: u32,
    x: &[f64],
    u: &[f64],
    y: &[f64],
    v: &[f64],
    cfg: &ExtrapConfig,
) -> Result<f64, RiemannError> {
    segment_check(g, x, u)?;
    let ik = integral_op_fn(g, k);
    let xu: Vec<f64> = x.iter().chain(u).copied().collect();
    let yv: Vec<f64> = y.iter().chain(v).copied().collect();
    let (lhs, _) = seip_var(&ik, &xu, &yv, cfg)?;
    let (g2, x2, u2, y2, v2, cfg2) = (
        g.clone(),
        x.to_vec(),
        u.to_vec(),
        y.to_vec(),
        v.to_vec(),
        *cfg,
    );
    let m = g.arity_out();
    let integrand = Curve::new(0.0, 1.0, m, move |s| {
        let p = axpy(&x2, s, &u2);
        let dy = seip_var(&g2, &p, &y2, &cfg2);
        let dv = seip_var(&g2, &p, &v2, &cfg2);
        match (dy, dv) {
            (Ok((a, _)), Ok((b, _))) => {
                let (wk, wk1) = (s.powi(k as i32), s.powi(k as i32 + 1));
                a.iter().zip(&b).map(|(p, q)| wk * p + wk1 * q).collect()
            }
            _ => vec![f64::NAN; m],
        }
    });
    let rhs = quad(&integrand, 0.0, 1.0, CHECK_QUAD_TOL)?;
    Ok(sup_diff(&lhs, &rhs))
}

/// Fitted order `p` in `|Mₙ − exact| ≈ C n⁻ᵖ` for uniform midpoint sums of a
/// scalar curve, by least squares in log-log coordinates.
pub fn midpoint_error_slope(gamma: &Curve, exact: f64, cells: &[usize]) -> f64 {
    let pts: Vec<(f64, f64)> = cells
        .iter()
        .map(|&n| {
            let s = midpoint_sum(gamma, gamma.start(), gamma.end(), n)[0];
            ((n as f64).ln(), (s - exact).abs().ln())
        })
        .collect();
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    -sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn cfg() -> ExtrapConfig {
        ExtrapConfig::default()
    }

    #[test]
    fn integral_operator_examples() {
        let id = SmoothFn::unary(|x| x);
        assert_abs_diff_eq!(
            integral_op_ik(&id, 0, &[0.0], &[1.0], 1e-10).unwrap()[0],
            0.5,
            epsilon = 1e-10
        );
        let c = SmoothFn::constant(1, vec![3.0]);
        assert_abs_diff_eq!(
            integral_op_ik(&c, 1, &[0.2], &[-0.7], 1e-10).unwrap()[0],
            1.5,
            epsilon = 1e-10
        );
        let sq = SmoothFn::unary(|x| x * x);
        assert_abs_diff_eq!(
            integral_op_ik(&sq, 0, &[0.0], &[1.0], 1e-10).unwrap()[0],
            1.0 / 3.0,
            epsilon = 1e-10
        );
        let boxed = SmoothFn::unary(f64::ln).with_domain(vec![(0.5, 2.0)]);
        assert!(matches!(
            integral_op_ik(&boxed, 0, &[1.0], &[2.0], 1e-8),
            Err(RiemannError::DomainError { s }) if s == 1.0
        ));
    }

    #[test]
    fn mvt_examples() {
        let sq = Curve::scalar(0.0, 1.0, |s| s * s);
        assert!(mvt_containment_check(&sq, 32, 1e-9).unwrap().passed());
        let c = Curve::scalar(0.0, 1.0, |_| 4.0);
        assert!(mvt_containment_check(&c, 8, 1e-12).unwrap().passed());
        let sin = Curve::scalar(0.0, 1.0, f64::sin);
        assert!(mvt_containment_check(&sin, 32, 1e-9).unwrap().passed());
        // A curve whose increment escapes the sampled slopes is caught.
        let kinked = Curve::scalar(0.0, 1.0, |s| (s - 0.5).abs());
        assert!(matches!(
            mvt_containment_check(&kinked, 1, 1e-9),
            Err(RiemannError::NotDifferentiable { .. })
        ));
        let jump = Curve::scalar(0.0, 1.0, |s| if s == 1.0 { 5.0 } else { s });
        assert!(!mvt_containment_check(&jump, 16, 1e-9).unwrap().passed());
    }

    #[test]
    fn under_integral_examples() {
        let f1 = Family::new(|s, t| s * t * t);
        assert!(under_integral_deriv_check(&f1, 0.5, 1e-12).unwrap() < 1e-8);
        let f2 = Family::new(|s, t| (s * t).exp());
        assert!(under_integral_deriv_check(&f2, 0.5, 1e-12).unwrap() < 1e-6);
        // Independent closed form: d/dt (e^t − 1)/t = ((t − 1)e^t + 1)/t².
        let t: f64 = 0.5;
        let closed = ((t - 1.0) * t.exp() + 1.0) / (t * t);
        let quad_side = quad(
            &Curve::scalar(0.0, 1.0, move |s| s * (s * t).exp()),
            0.0,
            1.0,
            1e-13,
        )
        .unwrap()[0];
        assert_abs_diff_eq!(closed, quad_side, epsilon = 1e-12);
        let f3 = Family::new(|_, _| 2.5);
        assert!(under_integral_deriv_check(&f3, 0.3, 1e-12).unwrap() < 1e-12);
    }

    #[test]
    fn thm52_examples() {
        let l = SmoothFn::linear(1, 2, vec![2.0, -1.0]);
        assert!(
            thm52_identity_residual(&l, &[0.3, 0.2], &[1.0, 1.0], 0.7, &cfg()).unwrap() < 1e-12
        );
        let sq = SmoothFn::unary(|x| x * x);
        assert!(thm52_identity_residual(&sq, &[1.0], &[1.0], 1.0, &cfg()).unwrap() < 1e-9);
        let e = SmoothFn::unary(f64::exp);
        assert!(thm52_identity_residual(&e, &[0.0], &[1.0], 0.5, &cfg()).unwrap() < 1e-6);
        assert!(thm52_identity_residual(&e, &[0.0], &[1.0], 0.0, &cfg()).unwrap() < 1e-12);
    }

    #[test]
    fn lemma50_examples() {
        let sq = SmoothFn::unary(|x| x * x);
        let ones = [1.0];
        assert!(
            lemma50_variation_residual(&sq, 0, &ones, &ones, &ones, &ones, &cfg()).unwrap() < 1e-7
        );
        let ik = integral_op_fn(&sq, 0);
        let (d, _) = seip_var(&ik, &[1.0, 1.0], &[1.0, 1.0], &cfg()).unwrap();
        assert_abs_diff_eq!(d[0], 14.0 / 3.0, epsilon = 1e-8);
        let l = SmoothFn::linear(1, 2, vec![1.5, -0.5]);
        let r = lemma50_variation_residual(
            &l,
            2,
            &[0.1, 0.2],
            &[0.3, -0.4],
            &[1.0, 0.0],
            &[0.5, 0.5],
            &cfg(),
        )
        .unwrap();
        assert!(r < 1e-10);
        let e = SmoothFn::unary(f64::exp);
        assert!(
            lemma50_variation_residual(&e, 0, &[0.0], &ones, &ones, &ones, &cfg()).unwrap() < 1e-5
        );
    }

    #[test]
    fn midpoint_refinement_order_is_two() {
        let cells: Vec<usize> = (4..=12).map(|e| 1 << e).collect();
        let e = Curve::scalar(0.0, 1.0, f64::exp);
        let p = midpoint_error_slope(&e, std::f64::consts::E - 1.0, &cells);
        assert!((p - 2.0).abs() < 0.2, "order {p}");
        let c = Curve::scalar(0.0, 1.0, f64::cos);
        let p = midpoint_error_slope(&c, 1f64.sin(), &cells);
        assert!((p - 2.0).abs() < 0.2, "order {p}");
    }
}
