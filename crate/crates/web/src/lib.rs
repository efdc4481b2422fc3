//! Browser bindings: each call returns a JSON string for `www/index.html`.

use difq::expr::parse_expr_arity;
use difq::numdiff::{bgn_difq_num, ExtrapConfig};
use difq::riemann::{integrate_table, Curve};
use difq::rings::RingElem;
use difq::sharplab::{noninjectivity_demo, SharpConfig};
use difq::symcalc::sym_difq1;
use num_rational::BigRational;
use serde::Serialize;
use wasm_bindgen::prelude::*;

const MAX_SAMPLES: usize = 2001;

fn parse_vec(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| format!("cannot read {p:?} as a number"))
        })
        .collect()
}

#[derive(Serialize)]
struct Profile {
    label: String,
    exact: bool,
    t: Vec<f64>,
    value: Vec<f64>,
    variation: f64,
}

/// `t ↦ f^[1](x, u, t)` on `samples` points of `[-t_max, t_max]`.
pub fn difq_profile_json(
    expr: &str,
    x: &str,
    u: &str,
    t_max: f64,
    samples: usize,
) -> Result<String, String> {
    let parsed = parse_expr_arity(expr, 1).map_err(|e| e.to_string())?;
    let n = parsed.arity_in();
    if parsed.arity_out() != 1 {
        return Err("enter a scalar expression".into());
    }
    let (x, u) = (parse_vec(x)?, parse_vec(u)?);
    if x.len() != n || u.len() != n {
        return Err(format!("point and direction need {n} components"));
    }
    if !(t_max > 0.0 && t_max.is_finite()) {
        return Err("t range must be positive".into());
    }
    let samples = samples.clamp(3, MAX_SAMPLES) | 1;
    let f = parsed.to_smooth();
    let cfg = ExtrapConfig::default();
    let exact = |t: f64| -> Option<f64> {
        let p = parsed.as_poly()?;
        let mut pt: Vec<RingElem> = x
            .iter()
            .chain(&u)
            .map(|v| to_q(*v))
            .collect::<Option<_>>()?;
        pt.push(to_q(t)?);
        Some(sym_difq1(p).eval(&pt).ok()?[0].to_f64())
    };
    let mut t = Vec::with_capacity(samples);
    let mut value = Vec::with_capacity(samples);
    for i in 0..samples {
        let s = -t_max + 2.0 * t_max * i as f64 / (samples - 1) as f64;
        let v = match exact(s) {
            Some(v) => v,
            None => bgn_difq_num(&f, &x, &u, s, &cfg).map_or(f64::NAN, |v| v[0]),
        };
        t.push(s);
        value.push(v);
    }
    let variation = match exact(0.0) {
        Some(v) => v,
        None => bgn_difq_num(&f, &x, &u, 0.0, &cfg).map_err(|e| e.to_string())?[0],
    };
    let out = Profile {
        label: f.label().to_string(),
        exact: parsed.as_poly().is_some(),
        t,
        value,
        variation,
    };
    serde_json::to_string(&out).map_err(|e| e.to_string())
}

fn to_q(v: f64) -> Option<RingElem> {
    BigRational::from_float(v).map(RingElem::Rational)
}

#[derive(Serialize)]
struct Sharp {
    t: Vec<f64>,
    u0: Vec<f64>,
    u1: Vec<f64>,
    h_u1: Vec<f64>,
    summary: serde_json::Value,
}

/// Two distinct grid functions with the same image under `h`.
pub fn sharp_demo_json(eps: f64, eta0: f64, n: usize) -> Result<String, String> {
    let cfg = SharpConfig {
        eps,
        eta0,
        n,
        ..SharpConfig::default()
    };
    let d = noninjectivity_demo(&cfg).map_err(|e| e.to_string())?;
    let out = Sharp {
        t: d.u0.nodes(),
        u0: d.u0.samples().to_vec(),
        u1: d.u1.samples().to_vec(),
        h_u1: d.h_u1.samples().to_vec(),
        summary: d.summary_json(&cfg),
    };
    serde_json::to_string(&out).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct Table {
    value: f64,
    cells: Vec<usize>,
    sum: Vec<f64>,
    diff: Vec<Option<f64>>,
}

/// Midpoint refinement table for `∫ₐᵇ f(x1) dx1`.
pub fn riemann_table_json(expr: &str, a: f64, b: f64) -> Result<String, String> {
    let parsed = parse_expr_arity(expr, 1).map_err(|e| e.to_string())?;
    if parsed.arity_in() != 1 || parsed.arity_out() != 1 {
        return Err("enter a scalar expression in x1".into());
    }
    let f = parsed.to_smooth();
    let gamma = Curve::new(a, b, 1, move |s| {
        f.call(&[s]).unwrap_or_else(|_| vec![f64::NAN])
    });
    let res = integrate_table(&gamma, a, b, 1e-10).map_err(|e| e.to_string())?;
    let out = Table {
        value: res.value[0],
        cells: res.table.iter().map(|r| r.cells).collect(),
        sum: res.table.iter().map(|r| r.sum[0]).collect(),
        diff: res.table.iter().map(|r| r.diff).collect(),
    };
    serde_json::to_string(&out).map_err(|e| e.to_string())
}

#[wasm_bindgen]
pub fn difq_profile(
    expr: &str,
    x: &str,
    u: &str,
    t_max: f64,
    samples: usize,
) -> Result<String, JsError> {
    difq_profile_json(expr, x, u, t_max, samples).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn sharp_demo(eps: f64, eta0: f64, n: usize) -> Result<String, JsError> {
    sharp_demo_json(eps, eta0, n).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn riemann_table(expr: &str, a: f64, b: f64) -> Result<String, JsError> {
    riemann_table_json(expr, a, b).map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    #[test]
    fn profile_of_square_is_linear_in_t() {
        let v: Value =
            serde_json::from_str(&difq_profile_json("x1^2", "1", "1", 1.0, 5).unwrap()).unwrap();
        // (1 + t)² − 1 over t is 2 + t.
        let t = v["t"].as_array().unwrap();
        let q = v["value"].as_array().unwrap();
        for (t, q) in t.iter().zip(q) {
            assert!((q.as_f64().unwrap() - 2.0 - t.as_f64().unwrap()).abs() < 1e-12);
        }
        assert_eq!(v["variation"], 2.0);
        assert_eq!(v["exact"], true);
    }

    #[test]
    fn profile_rejects_bad_input() {
        assert!(difq_profile_json("x1*x2", "1", "1", 1.0, 5).is_err());
        assert!(difq_profile_json("sin(x1", "1", "1", 1.0, 5).is_err());
    }

    #[test]
    fn smooth_profile_is_continuous_at_zero() {
        let v: Value =
            serde_json::from_str(&difq_profile_json("sin(x1)", "0", "1", 0.5, 101).unwrap())
                .unwrap();
        assert!((v["variation"].as_f64().unwrap() - 1.0).abs() < 1e-9);
        let q = v["value"].as_array().unwrap();
        assert!((q[50].as_f64().unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn sharp_demo_passes() {
        let v: Value = serde_json::from_str(&sharp_demo_json(0.1, 0.12, 400).unwrap()).unwrap();
        assert_eq!(v["summary"]["passed"], true);
        assert_eq!(v["u1"].as_array().unwrap().len(), 401);
        assert!(sharp_demo_json(0.1, 0.1, 400).is_err());
    }

    #[test]
    fn riemann_table_converges() {
        let v: Value =
            serde_json::from_str(&riemann_table_json("exp(x1)", 0.0, 1.0).unwrap()).unwrap();
        assert!((v["value"].as_f64().unwrap() - (std::f64::consts::E - 1.0)).abs() < 1e-8);
        assert!(v["diff"][0].is_null());
    }
}
