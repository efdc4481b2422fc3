use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::time::{SystemTime, UNIX_EPOCH};

use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde_json::{json, Value};

use super::output::{json_bytes, write_atomic};
use super::{CliError, DemoKind, Opts, Suite, EXIT_FAIL, EXIT_PASS, REPORT_SCHEMA};
use crate::axioms::{axiom_suite, postulate_json};
use crate::expr::{parse_constant, parse_expr_arity, Parsed};
use crate::funcgrid::{seip_norm_fixed_point, shift_variation_study, GridSpec};
use crate::numdiff::{
    bgn_difq_num, calculus_rule_suite, dual_crosscheck_suite, oracle_agreement_suite, seip_var,
    seip_var_k, standard_test_set, ExtrapConfig, SmoothFn,
};
use crate::report::{Check, VerificationReport, Witness};
use crate::riemann::{integral_identity_suite, integrate_table, Curve};
use crate::rings::{ring_axiom_suite, RingElem, RingId};
use crate::sharplab::{noninjectivity_demo, SharpConfig};
use crate::symcalc::{exact_division_suite, formal_var, sym_difq1};

const DEFAULT_OUT: &str = "difq-out";
const DEFAULT_TRIALS: usize = 100;

pub(crate) struct Ctx {
    verb: &'static str,
    opts: Opts,
    seed: u64,
    out: PathBuf,
}

fn usage(m: impl Into<String>) -> CliError {
    CliError::Usage(m.into())
}

impl Ctx {
    pub(crate) fn new(verb: &'static str, opts: Opts) -> Result<Self, CliError> {
        let seed = match opts.map.get("seed") {
            Some(s) => s
                .trim()
                .parse::<u64>()
                .map_err(|_| usage(format!("--seed expects an unsigned integer, got {s:?}")))?,
            None => 0,
        };
        let out = PathBuf::from(opts.map.get("out").map_or(DEFAULT_OUT, String::as_str));
        Ok(Ctx {
            verb,
            opts,
            seed,
            out,
        })
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.opts.map.get(key).map(String::as_str)
    }

    fn require(&self, key: &str) -> Result<&str, CliError> {
        self.get(key)
            .ok_or_else(|| usage(format!("{} needs --{key}", self.verb)))
    }

    fn f64_or(&self, key: &str, default: f64) -> Result<f64, CliError> {
        match self.get(key) {
            Some(s) => parse_real(key, s),
            None => Ok(default),
        }
    }

    fn usize_or(&self, key: &str, default: usize) -> Result<usize, CliError> {
        match self.get(key) {
            Some(s) => s
                .trim()
                .parse()
                .map_err(|_| usage(format!("--{key} expects a nonnegative integer, got {s:?}"))),
            None => Ok(default),
        }
    }

    /// Inputs echoed into report.json; output location is left out.
    fn inputs(&self) -> Value {
        let mut m: BTreeMap<String, Value> = self
            .opts
            .map
            .iter()
            .filter(|(k, _)| k.as_str() != "out")
            .map(|(k, v)| (k.clone(), Value::String(v.clone())))
            .collect();
        if !self.opts.dirs.is_empty() {
            m.insert("dir".into(), json!(self.opts.dirs));
        }
        json!(m)
    }

    fn write(&self, name: &str, bytes: &[u8]) -> Result<PathBuf, CliError> {
        write_atomic(&self.out, name, bytes)
    }

    fn extrap(&self) -> Result<ExtrapConfig, CliError> {
        let d = ExtrapConfig::default();
        let cfg = ExtrapConfig {
            t0: self.f64_or("t0", d.t0)?,
            tol_conv: self.f64_or("tol", d.tol_conv)?,
            ..d
        };
        cfg.validate().map_err(CliError::from)?;
        Ok(cfg)
    }

    /// Writes report.json and its timestamp sidecar.
    fn finish(
        &self,
        command: &str,
        results: Value,
        report: Option<&VerificationReport>,
        out: &mut dyn Write,
    ) -> Result<i32, CliError> {
        let passed = report.is_none_or(VerificationReport::passed);
        let mut doc = json!({
            "schema": REPORT_SCHEMA,
            "version": env!("CARGO_PKG_VERSION"),
            "command": command,
            "seed": self.seed,
            "inputs": self.inputs(),
            "results": results,
            "passed": passed,
        });
        if let Some(r) = report {
            doc["report"] = serde_json::to_value(r).map_err(|e| CliError::Io(e.to_string()))?;
        }
        let path = self.write("report.json", &json_bytes(&doc))?;
        let stamp = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map_or(0, |d| d.as_secs());
        let meta = json!({ "created_unix": stamp, "report": "report.json" });
        self.write("report.meta.json", &json_bytes(&meta))?;
        let _ = writeln!(out, "report: {}", path.display());
        Ok(if passed { EXIT_PASS } else { EXIT_FAIL })
    }
}

fn parse_real(key: &str, s: &str) -> Result<f64, CliError> {
    let s = s.trim();
    if let Ok(v) = s.parse::<f64>() {
        if v.is_finite() {
            return Ok(v);
        }
    }
    parse_constant(s)
        .ok()
        .and_then(|q| q.to_f64())
        .ok_or_else(|| usage(format!("--{key} expects a number, got {s:?}")))
}

fn parse_rationals(key: &str, s: &str) -> Result<Vec<BigRational>, CliError> {
    s.split(',')
        .map(|p| {
            let p = p.trim();
            parse_constant(p).or_else(|_| {
                p.parse::<f64>()
                    .ok()
                    .and_then(BigRational::from_float)
                    .ok_or_else(|| usage(format!("--{key}: cannot read {p:?} as a number")))
            })
        })
        .collect()
}

fn to_f64s(v: &[BigRational]) -> Vec<f64> {
    v.iter().map(|q| q.to_f64().unwrap_or(f64::NAN)).collect()
}

fn check_len(key: &str, v: &[BigRational], n: usize) -> Result<(), CliError> {
    if v.len() != n {
        return Err(usage(format!(
            "--{key} has {} components but the map has arity {n}",
            v.len()
        )));
    }
    Ok(())
}

fn fmt_vec(v: &[f64]) -> String {
    v.iter().map(f64::to_string).collect::<Vec<_>>().join(", ")
}

fn elems(v: &[BigRational]) -> Vec<RingElem> {
    v.iter().cloned().map(RingElem::Rational).collect()
}

/// `Q`, `rational`, `F7`, `Fp:7`, `f64` or `dual`.
pub(crate) fn parse_ring(s: &str) -> Result<RingId, CliError> {
    let t = s.trim();
    let lower = t.to_ascii_lowercase();
    let bad = || usage(format!("unknown ring {t:?}; use Q, F<p>, f64 or dual"));
    match lower.as_str() {
        "q" | "rational" => return Ok(RingId::Rational),
        "f64" | "float" => return Ok(RingId::Float64),
        "dual" => return Ok(RingId::Dual),
        _ => {}
    }
    let p = lower
        .strip_prefix("fp:")
        .or_else(|| lower.strip_prefix('f'))
        .and_then(|p| p.parse::<u64>().ok())
        .ok_or_else(bad)?;
    RingId::prime_field(p).map_err(|e| usage(e.to_string()))
}

pub(crate) fn difq(ctx: &Ctx, out: &mut dyn Write) -> Result<i32, CliError> {
    let parsed = parse_expr_arity(ctx.require("expr")?, 1)?;
    let n = parsed.arity_in();
    let x = parse_rationals("at", ctx.require("at")?)?;
    let u = parse_rationals("dir", ctx.require("dir")?)?;
    let t = parse_rationals("t", ctx.require("t")?)?;
    check_len("at", &x, n)?;
    check_len("dir", &u, n)?;
    check_len("t", &t, 1)?;
    let mut results = json!({ "arity_in": n, "arity_out": parsed.arity_out() });
    let value = match &parsed {
        Parsed::Poly(p) => {
            let q = sym_difq1(p);
            let mut point = elems(&x);
            point.extend(elems(&u));
            point.extend(elems(&t));
            let exact = q.eval(&point)?;
            results["exact"] = json!(exact.iter().map(|e| e.to_string()).collect::<Vec<_>>());
            results["method"] = json!("symbolic");
            exact.iter().map(RingElem::to_f64).collect::<Vec<_>>()
        }
        Parsed::Smooth(_) => {
            let f = parsed.to_smooth();
            let cfg = ctx.extrap()?;
            results["method"] = json!("numeric");
            bgn_difq_num(&f, &to_f64s(&x), &to_f64s(&u), to_f64s(&t)[0], &cfg)?
        }
    };
    let _ = writeln!(out, "{}", fmt_vec(&value));
    results["value"] = json!(value);
    ctx.finish("difq", results, None, out)
}

pub(crate) fn var(ctx: &Ctx, out: &mut dyn Write) -> Result<i32, CliError> {
    let parsed = parse_expr_arity(ctx.require("expr")?, 1)?;
    let n = parsed.arity_in();
    let x = parse_rationals("at", ctx.require("at")?)?;
    check_len("at", &x, n)?;
    if ctx.opts.dirs.is_empty() {
        return Err(usage("var needs at least one --dir"));
    }
    let dirs = ctx
        .opts
        .dirs
        .iter()
        .map(|d| {
            let v = parse_rationals("dir", d)?;
            check_len("dir", &v, n)?;
            Ok(v)
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let f = parsed.to_smooth();
    let cfg = ctx.extrap()?;
    let xf = to_f64s(&x);
    let mut results = json!({ "order": dirs.len() });
    let (value, error) = if dirs.len() == 1 {
        seip_var(&f, &xf, &to_f64s(&dirs[0]), &cfg)?
    } else {
        let df: Vec<Vec<f64>> = dirs.iter().map(|d| to_f64s(d)).collect();
        let jet = seip_var_k(&f, &xf, &df, &cfg)?;
        (jet.value, jet.error)
    };
    if let (Parsed::Poly(p), 1) = (&parsed, dirs.len()) {
        let mut point = elems(&x);
        point.extend(elems(&dirs[0]));
        let exact = formal_var(p).eval(&point)?;
        results["exact"] = json!(exact.iter().map(|e| e.to_string()).collect::<Vec<_>>());
    }
    let _ = writeln!(out, "{}", fmt_vec(&value));
    let _ = writeln!(out, "error estimate: {error:e}");
    results["value"] = json!(value);
    results["error_estimate"] = json!(error);
    ctx.finish("var", results, None, out)
}

pub(crate) fn integrate(ctx: &Ctx, out: &mut dyn Write) -> Result<i32, CliError> {
    let parsed = parse_expr_arity(ctx.require("expr")?, 1)?;
    if parsed.arity_in() != 1 {
        return Err(usage("integrate takes a curve in the single variable x1"));
    }
    let a = ctx.f64_or("a", 0.0)?;
    let b = ctx.f64_or("b", 1.0)?;
    let tol = ctx.f64_or("tol", 1e-10)?;
    if !(tol > 0.0) {
        return Err(usage("--tol must be positive"));
    }
    let f: SmoothFn = parsed.to_smooth();
    let m = f.arity_out();
    let gamma = Curve::new(a, b, m, move |s| {
        f.call(&[s]).unwrap_or_else(|_| vec![f64::NAN; m])
    });
    let res = integrate_table(&gamma, a, b, tol)?;
    ctx.write("convergence.csv", res.to_csv().as_bytes())?;
    let _ = writeln!(out, "{}", fmt_vec(&res.value));
    let _ = writeln!(
        out,
        "cells: {}, last difference: {:e}",
        res.cells, res.error
    );
    let results = json!({
        "value": res.value,
        "error_estimate": res.error,
        "cells": res.cells,
    });
    ctx.finish("integrate", results, None, out)
}

fn exact_ring(ctx: &Ctx) -> Result<RingId, CliError> {
    let ring = parse_ring(ctx.get("ring").unwrap_or("Q"))?;
    if !ring.is_exact() {
        return Err(usage(format!("this suite needs an exact ring, got {ring}")));
    }
    Ok(ring)
}

pub(crate) fn verify(ctx: &Ctx, suite: Suite, out: &mut dyn Write) -> Result<i32, CliError> {
    let trials = ctx.usize_or("trials", DEFAULT_TRIALS)?;
    let seed = ctx.seed;
    let cfg = ExtrapConfig::default();
    let numeric = || {
        let fns = standard_test_set();
        let mut r = calculus_rule_suite(&fns, trials, seed, &cfg);
        r.merge(dual_crosscheck_suite(&fns, trials, seed, &cfg));
        r.merge(oracle_agreement_suite(trials, seed, &cfg));
        r
    };
    let mut results = json!({ "suite": format!("{suite:?}").to_lowercase(), "trials": trials });
    let report = match suite {
        Suite::Axioms => {
            let r = axiom_suite(exact_ring(ctx)?, trials, seed)?;
            results["postulates"] = postulate_json(&r);
            r
        }
        Suite::Rings => ring_axiom_suite(parse_ring(ctx.get("ring").unwrap_or("Q"))?, trials, seed),
        Suite::Division => exact_division_suite(exact_ring(ctx)?, trials, seed),
        Suite::Calculus => numeric(),
        Suite::Integrals => integral_identity_suite(trials, seed, &cfg),
        Suite::All => {
            let ring = exact_ring(ctx)?;
            let mut r = VerificationReport::new("all", Some(seed));
            r.merge(ring_axiom_suite(ring, trials, seed));
            r.merge(exact_division_suite(ring, trials, seed));
            let ax = axiom_suite(ring, trials, seed)?;
            results["postulates"] = postulate_json(&ax);
            r.merge(ax);
            r.merge(numeric());
            r.merge(integral_identity_suite(trials, seed, &cfg));
            r
        }
    };
    if ctx.get("ring").is_some() || matches!(suite, Suite::Axioms | Suite::Division | Suite::All) {
        results["ring"] = json!(parse_ring(ctx.get("ring").unwrap_or("Q"))?.to_string());
    }
    let _ = write!(out, "{report}");
    ctx.finish("verify", results, Some(&report), out)
}

fn sharp_config(ctx: &Ctx) -> Result<SharpConfig, CliError> {
    let d = SharpConfig::default();
    let cfg = SharpConfig {
        xi: ctx.f64_or("xi", d.xi)?,
        eps: ctx.f64_or("eps", d.eps)?,
        eta0: ctx.f64_or("eta0", d.eta0)?,
        n: ctx.usize_or("n", d.n)?,
        ode_steps: ctx.usize_or("steps", d.ode_steps)?,
        quad_nodes: ctx.usize_or("quad-nodes", d.quad_nodes)?,
        tol_demo: ctx.f64_or("tol", d.tol_demo)?,
        ..d
    };
    cfg.validate()?;
    Ok(cfg)
}

pub(crate) fn demo(ctx: &Ctx, kind: DemoKind, out: &mut dyn Write) -> Result<i32, CliError> {
    match kind {
        DemoKind::Sharp => demo_sharp(ctx, out),
        DemoKind::Shift => demo_shift(ctx, out),
        DemoKind::FixedPoint => demo_fixed_point(ctx, out),
    }
}

fn demo_sharp(ctx: &Ctx, out: &mut dyn Write) -> Result<i32, CliError> {
    let cfg = sharp_config(ctx)?;
    let d = noninjectivity_demo(&cfg)?;
    ctx.write("u0.dat", d.u0.to_dat().as_bytes())?;
    ctx.write("u1.dat", d.u1.to_dat().as_bytes())?;
    ctx.write("h_u1.dat", d.h_u1.to_dat().as_bytes())?;
    let summary = d.summary_json(&cfg);
    ctx.write("summary.json", &json_bytes(&summary))?;
    let _ = writeln!(out, "A(eps) = {:.6}", d.a_eps);
    let _ = writeln!(out, "|u1 - u0| = {:.6e}", d.sup_u1_u0);
    let _ = writeln!(out, "|h(u1) - u0| = {:.6e}", d.sup_h_u1_u0);
    let _ = write!(out, "{}", d.report);
    ctx.finish("demo sharp", summary, Some(&d.report), out)
}

const SHIFT_SUP_TOL: f64 = 1e-5;
const SHIFT_MIN_ORDER: f64 = 3.5;

fn demo_shift(ctx: &Ctx, out: &mut dyn Write) -> Result<i32, CliError> {
    let n = ctx.usize_or("n", 1024)?;
    if n < 64 {
        return Err(usage("demo shift needs --n of at least 64"));
    }
    let ns = [n / 8, n / 4, n / 2, n];
    let study = shift_variation_study(&ns)?;
    ctx.write("shift_var.dat", study.variation.to_dat().as_bytes())?;
    let mut csv = String::from("n,sup_error\n");
    for (k, e) in &study.rows {
        csv.push_str(&format!("{k},{e:.6e}\n"));
    }
    ctx.write("shift_convergence.csv", csv.as_bytes())?;

    let finest = study.rows.last().map_or(f64::INFINITY, |r| r.1);
    let mut report = VerificationReport::new("shift variation", None);
    let mut sup = Check::new("shift_sup_error").with_tolerance(SHIFT_SUP_TOL);
    sup.residual(finest, || Witness::new(0).with("n", n));
    report.push(sup);
    let mut order = Check::new("shift_order");
    if study.order >= SHIFT_MIN_ORDER {
        order.pass();
    } else {
        order.fail(Witness::new(0).with("order", study.order));
    }
    report.push(order);

    for (k, e) in &study.rows {
        let _ = writeln!(out, "N = {k:5}  sup error {e:.3e}");
    }
    let _ = writeln!(out, "fitted order {:.3}", study.order);
    let results = json!({
        "rows": study.rows.iter().map(|(k, e)| json!({"n": k, "sup_error": e})).collect::<Vec<_>>(),
        "order": study.order,
    });
    ctx.finish("demo shift", results, Some(&report), out)
}

fn demo_fixed_point(ctx: &Ctx, out: &mut dyn Write) -> Result<i32, CliError> {
    let n = ctx.usize_or("n", 200)?;
    let tol = ctx.f64_or("tol", 1e-10)?;
    let phi = SmoothFn::new(2, 1, |st| vec![st[0] + 0.5 * st[1].sin()]).with_label("s + sin(t)/2");
    let spec = GridSpec::new(0.0, 2.0, n)?;
    let fp = seip_norm_fixed_point(&phi, spec, tol)?;
    let x1 = fp.x.eval(1.0)?;
    ctx.write("x.dat", fp.x.to_dat().as_bytes())?;

    let mut report = VerificationReport::new("fixed point", None);
    let mut res = Check::new("residual").with_tolerance(tol);
    res.residual(fp.residual, || Witness::new(fp.iterations));
    report.push(res);
    let mut bound = Check::new("iteration_bound");
    if fp.iterations <= fp.iteration_bound {
        bound.pass();
    } else {
        bound.fail(
            Witness::new(fp.iterations)
                .with("iterations", fp.iterations)
                .with("bound", fp.iteration_bound),
        );
    }
    report.push(bound);

    let _ = writeln!(out, "x(1) = {x1:.6}");
    let _ = writeln!(
        out,
        "iterations {} (bound {}), residual {:.3e}",
        fp.iterations, fp.iteration_bound, fp.residual
    );
    let results = json!({
        "x_at_1": x1,
        "iterations": fp.iterations,
        "iteration_bound": fp.iteration_bound,
        "delta0": fp.delta0,
        "lipschitz_estimate": fp.lipschitz_estimate,
        "contraction_ratio": fp.contraction_ratio,
        "residual": fp.residual,
    });
    ctx.finish("demo fixed-point", results, Some(&report), out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ring_names() {
        assert_eq!(parse_ring("Q").unwrap(), RingId::Rational);
        assert_eq!(parse_ring("rational").unwrap(), RingId::Rational);
        assert_eq!(parse_ring("F7").unwrap(), RingId::PrimeField(7));
        assert_eq!(parse_ring("Fp:11").unwrap(), RingId::PrimeField(11));
        assert_eq!(parse_ring("f64").unwrap(), RingId::Float64);
        assert!(parse_ring("F8").is_err());
        assert!(parse_ring("Z").is_err());
    }

    #[test]
    fn reals_accept_fractions() {
        assert_eq!(parse_real("a", "1/4").unwrap(), 0.25);
        assert_eq!(parse_real("a", "-2.5").unwrap(), -2.5);
        assert!(parse_real("a", "inf").is_err());
    }
}
