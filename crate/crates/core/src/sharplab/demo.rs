use serde_json::{json, Value};

use super::{coefficient_a, h_map, solve_ode, SharpConfig, SharpError, SINGULAR_THRESHOLD};
use crate::funcgrid::{GridFn, Support};
use crate::report::{Check, VerificationReport, Witness};

/// Two grid functions `u₀ ≡ ε` and `u₁` with `h(u₀) = h(u₁) = u₀`.
#[derive(Debug, Clone)]
pub struct SharpDemo {
    pub report: VerificationReport,
    pub a_eps: f64,
    pub u0: GridFn,
    pub u1: GridFn,
    pub h_u1: GridFn,
    pub sup_u1_u0: f64,
    pub sup_h_u1_u0: f64,
    pub chi_residual: f64,
    pub ode_error_estimate: f64,
}

impl SharpDemo {
    pub fn summary_json(&self, cfg: &SharpConfig) -> Value {
        json!({
            "phi": cfg.phi.label(),
            "xi": cfg.xi,
            "eps": cfg.eps,
            "eta0": cfg.eta0,
            "n": cfg.n,
            "ode_steps": cfg.ode_steps,
            "quad_nodes": cfg.quad_nodes,
            "tol_demo": cfg.tol_demo,
            "a_eps": self.a_eps,
            "sup_u1_minus_u0": self.sup_u1_u0,
            "sup_h_u1_minus_u0": self.sup_h_u1_u0,
            "chi_residual": self.chi_residual,
            "ode_error_estimate": self.ode_error_estimate,
            "passed": self.report.passed(),
        })
    }
}

/// Builds `u₀ ≡ ε` and the ODE solution `u₁` from `η₀` and checks that `h`
/// sends both to `u₀`.
pub fn noninjectivity_demo(cfg: &SharpConfig) -> Result<SharpDemo, SharpError> {
    cfg.validate()?;
    if cfg.eta0 == cfg.eps {
        return Err(SharpError::DegenerateConfig);
    }
    let a_eps = coefficient_a(cfg.eps, cfg)?;
    if a_eps.abs() <= SINGULAR_THRESHOLD {
        return Err(SharpError::SingularCoefficient {
            eta: cfg.eps,
            value: a_eps,
        });
    }
    let sol = solve_ode(cfg.eta0, cfg)?;
    let u0 = GridFn::constant(0.0, 1.0, cfg.n, Support::Interval, cfg.eps)?;
    let u1 = sol.on_grid(cfg.n)?;
    let h_u0 = h_map(&u0, cfg)?;
    let h_u1 = h_map(&u1, cfg)?;
    let sup_u1_u0 = u1.sup_dist(&u0)?;
    let sup_h_u1_u0 = h_u1.sup_dist(&u0)?;

    let mut report = VerificationReport::new("sharp differentiability counterexample", None);
    let mut c = Check::new("coefficient_nonzero").with_tolerance(SINGULAR_THRESHOLD);
    c.pass();
    c.note(format!("A(eps) = {a_eps:.12e}"));
    report.push(c);

    let gap = (cfg.eta0 - cfg.eps).abs();
    let mut c = Check::new("distinct_preimages").with_tolerance(gap);
    if sup_u1_u0 >= gap {
        c.pass();
    } else {
        c.fail(Witness::new(0).with("sup_u1_minus_u0", sup_u1_u0));
    }
    report.push(c);

    let mut c = Check::new("h_fixes_u0");
    if h_u0 == u0 {
        c.pass();
    } else {
        let d = h_u0.sup_dist(&u0)?;
        c.fail(Witness::new(0).with("sup_h_u0_minus_u0", d));
    }
    report.push(c);

    let mut c = Check::new("h_u1_hits_u0").with_tolerance(cfg.tol_demo);
    c.residual(sup_h_u1_u0, || Witness::new(0).with("sup", sup_h_u1_u0));
    report.push(c);

    let mut c = Check::new("chi_residual").with_tolerance(cfg.tol_demo);
    c.residual(sol.chi_residual, || {
        Witness::new(0).with("chi", sol.chi_residual)
    });
    report.push(c);

    Ok(SharpDemo {
        report,
        a_eps,
        u0,
        u1,
        h_u1,
        sup_u1_u0,
        sup_h_u1_u0,
        chi_residual: sol.chi_residual,
        ode_error_estimate: sol.error_estimate,
    })
}
