use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{
    seip_var, seip_var_k, sup_diff, sup_norm, variation_fn, ExtrapConfig, NumError, ScalarMap,
    SmoothFn,
};
use crate::report::{Check, VerificationReport, Witness};
use crate::rings::{RingElem, RingId, Scalar};
use crate::seed;
use crate::symcalc::{formal_var, random_poly, PolyMap};

/// Condition number above which a symbolic–numeric disagreement is
/// attributed to cancellation rather than to the engine.
pub const CONDITION_LIMIT: f64 = 1e8;

fn vec_text(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:?}")).collect();
    format!("[{}]", parts.join(", "))
}

fn uniform(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(lo..hi)).collect()
}

/// Sampled point inside `f`'s box (or `[-1, 1]ⁿ`), kept away from its edges.
fn sample_point(f: &SmoothFn, rng: &mut ChaCha8Rng) -> Vec<f64> {
    match f.domain() {
        None => uniform(rng, f.arity_in(), -1.0, 1.0),
        Some(b) => b
            .iter()
            .map(|&(lo, hi)| {
                let (lo, hi) = (lo.max(-1.0), hi.min(1.0));
                let pad = 0.2 * (hi - lo);
                rng.random_range(lo + pad..hi - pad)
            })
            .collect(),
    }
}

fn rel(a: &[f64], b: &[f64]) -> f64 {
    sup_diff(a, b) / sup_norm(b).max(1.0)
}

/// The elementary maps used as the smooth test set.
#[derive(Debug, Clone, Copy)]
struct Elementary(usize);

const ELEMENTARY: [(&str, usize, usize); 7] = [
    ("exp(x1)", 1, 1),
    ("sin(x1)*cos(x2)", 2, 1),
    ("x1^3 - 2*x1*x2 + x2^2", 2, 1),
    ("(exp(x1*x2), sin(x1) + x2^2)", 2, 2),
    ("log(1 + x1^2) + x1*x2*x3", 3, 1),
    ("exp(sin(x1))", 1, 1),
    ("1/(1 + x1^2 + x2^2)", 2, 1),
];

impl ScalarMap for Elementary {
    fn arity_in(&self) -> usize {
        ELEMENTARY[self.0].1
    }
    fn arity_out(&self) -> usize {
        ELEMENTARY[self.0].2
    }
    fn apply<S: Scalar>(&self, x: &[S]) -> Vec<S> {
        let c = S::from_f64;
        match self.0 {
            0 => vec![x[0].exp()],
            1 => vec![x[0].sin() * x[1].cos()],
            2 => vec![x[0].powi(3) - c(2.0) * x[0] * x[1] + x[1] * x[1]],
            3 => vec![(x[0] * x[1]).exp(), x[0].sin() + x[1] * x[1]],
            4 => vec![(c(1.0) + x[0] * x[0]).ln() + x[0] * x[1] * x[2]],
            5 => vec![x[0].sin().exp()],
            _ => vec![c(1.0) / (c(1.0) + x[0] * x[0] + x[1] * x[1])],
        }
    }
}

/// Smooth maps with forward-mode evaluators, for the rule suites.
pub fn standard_test_set() -> Vec<SmoothFn> {
    (0..ELEMENTARY.len())
        .map(|i| SmoothFn::from_map(Elementary(i)).with_label(ELEMENTARY[i].0))
        .collect()
}

/// Componentwise `y ↦ sin(y) + y²/2`, an outer map for chain-rule trials.
fn outer_map(m: usize) -> SmoothFn {
    SmoothFn::new(m, m, |y| y.iter().map(|v| v.sin() + 0.5 * v * v).collect())
        .with_dual(|y| {
            y.iter()
                .map(|&v| v.sin() + crate::rings::Dual::constant(0.5) * v * v)
                .collect()
        })
        .with_label("sin+sq/2")
}

/// Checks `δf(x, αu + βv) = αδf(x, u) + βδf(x, v)` on seeded directions.
pub fn check_linearity(
    f: &SmoothFn,
    x: &[f64],
    trials: usize,
    seed: u64,
    cfg: &ExtrapConfig,
) -> VerificationReport {
    let mut rng = seed::rng(seed, "numdiff/linearity");
    let mut check = Check::new("linearity").with_tolerance(1e-6);
    let n = f.arity_in();
    for trial in 0..trials {
        let u = uniform(&mut rng, n, -1.0, 1.0);
        let v = uniform(&mut rng, n, -1.0, 1.0);
        let a = rng.random_range(-2.0..2.0);
        let b = rng.random_range(-2.0..2.0);
        let w: Vec<f64> = u.iter().zip(&v).map(|(p, q)| a * p + b * q).collect();
        let witness = |extra: &str| {
            Witness::new(trial)
                .with("x", vec_text(x))
                .with("u", vec_text(&u))
                .with("v", vec_text(&v))
                .with("alpha", a)
                .with("beta", b)
                .with("outcome", extra)
        };
        let all = (|| -> Result<(Vec<f64>, Vec<f64>), NumError> {
            let (dw, _) = seip_var(f, x, &w, cfg)?;
            let (du, _) = seip_var(f, x, &u, cfg)?;
            let (dv, _) = seip_var(f, x, &v, cfg)?;
            let rhs = du.iter().zip(&dv).map(|(p, q)| a * p + b * q).collect();
            Ok((dw, rhs))
        })();
        match all {
            Ok((lhs, rhs)) => {
                check.residual(rel(&lhs, &rhs), || witness("residual"));
            }
            Err(e) => check.fail(witness(&e.to_string())),
        }
    }
    let mut r = VerificationReport::new(&format!("linearity of δ{}", f.label()), Some(seed));
    r.push(check);
    r
}

/// Instance checks of the first and second order calculus rules on the
/// maps `fns`, cycling through them over `trials` trials.
pub fn calculus_rule_suite(
    fns: &[SmoothFn],
    trials: usize,
    seed: u64,
    cfg: &ExtrapConfig,
) -> VerificationReport {
    let mut rng = seed::rng(seed, "numdiff/rules");
    let mut chain = Check::new("chain_rule").with_tolerance(1e-6);
    let mut constant = Check::new("constant_map").with_tolerance(f64::MIN_POSITIVE);
    let mut linear = Check::new("linear_map").with_tolerance(1e-10);
    let mut bilinear = Check::new("bilinear_map").with_tolerance(1e-8);
    let mut pairing = Check::new("pairing").with_tolerance(1e-9);
    let mut product = Check::new("product").with_tolerance(1e-9);
    let mut padding = Check::new("zero_padding").with_tolerance(1e-5);
    let mut symmetry = Check::new("symmetry").with_tolerance(1e-6);
    if fns.is_empty() {
        let mut r = VerificationReport::new("calculus rules", Some(seed));
        r.notes.push("empty test set".into());
        return r;
    }

    for trial in 0..trials {
        let f = &fns[trial % fns.len()];
        let g = &fns[(trial + 1) % fns.len()];
        let (n, m) = (f.arity_in(), f.arity_out());
        let x = sample_point(f, &mut rng);
        let u = uniform(&mut rng, n, -1.0, 1.0);
        let v = uniform(&mut rng, n, -1.0, 1.0);
        let base = || {
            Witness::new(trial)
                .with("f", f.label())
                .with("x", vec_text(&x))
                .with("u", vec_text(&u))
        };
        let fail_with = |c: &mut Check, e: NumError| c.fail(base().with("error", e));

        // δ(g ∘ f)(x, u) = δg(f(x), δf(x, u)), for the fixed outer map and,
        // when arities allow, for the next member of the set.
        let mut outers = vec![outer_map(m)];
        if g.arity_in() == m && g.domain().is_none() {
            outers.push(g.clone());
        }
        for outer in &outers {
            let r = (|| {
                let gf = outer.compose(f);
                let (lhs, _) = seip_var(&gf, &x, &u, cfg)?;
                let (df, _) = seip_var(f, &x, &u, cfg)?;
                let fx = f.call(&x)?;
                let (rhs, _) = seip_var(outer, &fx, &df, cfg)?;
                Ok::<_, NumError>(rel(&lhs, &rhs))
            })();
            match r {
                Ok(res) => {
                    chain.residual(res, || base().with("g", outer.label()));
                }
                Err(e) => fail_with(&mut chain, e),
            }
        }

        let c = SmoothFn::constant(n, uniform(&mut rng, m, -5.0, 5.0));
        match seip_var(&c, &x, &u, cfg) {
            Ok((d, _)) => {
                if d.iter().all(|&v| v == 0.0) {
                    constant.residual(0.0, base);
                } else {
                    constant.residual(sup_norm(&d), base);
                }
            }
            Err(e) => fail_with(&mut constant, e),
        }

        let a = uniform(&mut rng, m * n, -2.0, 2.0);
        let l = SmoothFn::linear(m, n, a.clone());
        let lu = l.raw(&u);
        let y = uniform(&mut rng, n, -3.0, 3.0);
        match (seip_var(&l, &x, &u, cfg), seip_var(&l, &y, &u, cfg)) {
            (Ok((d1, _)), Ok((d2, _))) => {
                linear.residual(rel(&d1, &lu).max(rel(&d2, &lu)), base);
            }
            (Err(e), _) | (_, Err(e)) => fail_with(&mut linear, e),
        }

        // b(x, y) = Σ xᵢyᵢ on ℝⁿ × ℝⁿ.
        let b = SmoothFn::new(2 * n, 1, move |p| {
            vec![(0..n).map(|i| p[i] * p[n + i]).sum()]
        });
        let dot = |p: &[f64], q: &[f64]| p.iter().zip(q).map(|(s, t)| s * t).sum::<f64>();
        let xy: Vec<f64> = x.iter().chain(&y).copied().collect();
        let uv: Vec<f64> = u.iter().chain(&v).copied().collect();
        match seip_var(&b, &xy, &uv, cfg) {
            Ok((d, _)) => {
                let expect = dot(&x, &v) + dot(&u, &y);
                bilinear.residual(rel(&d, &[expect]), base);
            }
            Err(e) => fail_with(&mut bilinear, e),
        }

        let other = outer_map(m).compose(f);
        let r = (|| {
            let (dp, _) = seip_var(&f.pair(&other), &x, &u, cfg)?;
            let (d1, _) = seip_var(f, &x, &u, cfg)?;
            let (d2, _) = seip_var(&other, &x, &u, cfg)?;
            let expect: Vec<f64> = d1.into_iter().chain(d2).collect();
            Ok::<_, NumError>(rel(&dp, &expect))
        })();
        match r {
            Ok(res) => {
                pairing.residual(res, base);
            }
            Err(e) => fail_with(&mut pairing, e),
        }

        let yg = sample_point(g, &mut rng);
        let vg = uniform(&mut rng, g.arity_in(), -1.0, 1.0);
        let r = (|| {
            let fg = f.product(g);
            let p: Vec<f64> = x.iter().chain(&yg).copied().collect();
            let dir: Vec<f64> = u.iter().chain(&vg).copied().collect();
            let (dp, _) = seip_var(&fg, &p, &dir, cfg)?;
            let (d1, _) = seip_var(f, &x, &u, cfg)?;
            let (d2, _) = seip_var(g, &yg, &vg, cfg)?;
            let expect: Vec<f64> = d1.into_iter().chain(d2).collect();
            Ok::<_, NumError>(rel(&dp, &expect))
        })();
        match r {
            Ok(res) => {
                product.residual(res, || base().with("g", g.label()));
            }
            Err(e) => fail_with(&mut product, e),
        }

        // δ²f(x)[u, v] against δ(δf)((x, u))[(v, 0)] and against δ²f(x)[v, u].
        let r = (|| {
            let uv = seip_var_k(f, &x, &[u.clone(), v.clone()], cfg)?;
            let vu = seip_var_k(f, &x, &[v.clone(), u.clone()], cfg)?;
            let df = variation_fn(f, cfg);
            let xu: Vec<f64> = x.iter().chain(&u).copied().collect();
            let v0: Vec<f64> = v
                .iter()
                .copied()
                .chain(std::iter::repeat_n(0.0, n))
                .collect();
            let (dd, _) = seip_var(&df, &xu, &v0, cfg)?;
            Ok::<_, NumError>((rel(&uv.value, &dd), rel(&uv.value, &vu.value)))
        })();
        match r {
            Ok((pad, sym)) => {
                padding.residual(pad, || base().with("v", vec_text(&v)));
                symmetry.residual(sym, || base().with("v", vec_text(&v)));
            }
            Err(e) => {
                fail_with(&mut padding, e.clone());
                fail_with(&mut symmetry, e);
            }
        }
    }

    let mut r = VerificationReport::new("calculus rules", Some(seed));
    for c in [
        chain, constant, linear, bilinear, pairing, product, padding, symmetry,
    ] {
        r.push(c);
    }
    r
}

/// First order numeric variations against the dual-number derivative.
pub fn dual_crosscheck_suite(
    fns: &[SmoothFn],
    trials: usize,
    seed: u64,
    cfg: &ExtrapConfig,
) -> VerificationReport {
    let mut rng = seed::rng(seed, "numdiff/dual");
    let mut check = Check::new("dual_crosscheck").with_tolerance(1e-9);
    let usable: Vec<&SmoothFn> = fns.iter().filter(|f| f.has_dual()).collect();
    for trial in 0..trials {
        let Some(f) = usable.get(trial % usable.len().max(1)) else {
            break;
        };
        let x = sample_point(f, &mut rng);
        let u = uniform(&mut rng, f.arity_in(), -1.0, 1.0);
        let w = || {
            Witness::new(trial)
                .with("f", f.label())
                .with("x", vec_text(&x))
                .with("u", vec_text(&u))
        };
        let exact = f.dual_derivative(&x, &u).expect("filtered on dual");
        match seip_var(f, &x, &u, cfg) {
            Ok((d, _)) => {
                check.residual(rel(&d, &exact), w);
            }
            Err(e) => check.fail(w().with("error", e)),
        }
    }
    let mut r = VerificationReport::new("dual-number cross-check", Some(seed));
    r.push(check);
    r
}

fn grid_rational(rng: &mut ChaCha8Rng) -> RingElem {
    RingElem::rational(rng.random_range(-8..=8), 8)
}

/// Seeded random polynomial maps over the rationals: the numeric variation
/// against the exactly evaluated formal variation. Disagreements at
/// condition number above [`CONDITION_LIMIT`] are noted, not failed.
pub fn oracle_agreement_suite(cases: usize, seed: u64, cfg: &ExtrapConfig) -> VerificationReport {
    let mut rng = seed::rng(seed, "numdiff/oracle");
    let mut check = Check::new("oracle_agreement").with_tolerance(1e-7);
    let mut conditioned = 0usize;
    let r = RingId::Rational;
    for trial in 0..cases {
        let n = rng.random_range(1..=3);
        let deg = rng.random_range(1..=5);
        let f = PolyMap::scalar(random_poly(r, n, deg, 6, &mut rng));
        let x: Vec<RingElem> = (0..n).map(|_| grid_rational(&mut rng)).collect();
        let u: Vec<RingElem> = (0..n).map(|_| grid_rational(&mut rng)).collect();
        let xf: Vec<f64> = x.iter().map(RingElem::to_f64).collect();
        let uf: Vec<f64> = u.iter().map(RingElem::to_f64).collect();
        let var = formal_var(&f);
        let mut point = x.clone();
        point.extend(u.iter().cloned());
        let exact = var.eval(&point).expect("consistent arity")[0].to_f64();
        // Sum of absolute term values over the absolute result.
        let spread: f64 = var.components()[0]
            .terms()
            .iter()
            .map(|(m, c)| {
                m.exps()
                    .iter()
                    .zip(&point)
                    .fold(c.to_f64().abs(), |a, (&e, p)| {
                        a * p.to_f64().abs().powi(e as i32)
                    })
            })
            .sum();
        let cond = if exact == 0.0 {
            if spread == 0.0 {
                1.0
            } else {
                f64::INFINITY
            }
        } else {
            spread / exact.abs()
        };
        let w = || {
            Witness::new(trial)
                .with("f", f.to_text())
                .with("x", vec_text(&xf))
                .with("u", vec_text(&uf))
                .with("exact", exact)
                .with("condition", cond)
        };
        let g = SmoothFn::from_poly(&f);
        match seip_var(&g, &xf, &uf, cfg) {
            Ok((d, _)) => {
                let err = if exact == 0.0 {
                    d[0].abs()
                } else {
                    (d[0] - exact).abs() / exact.abs()
                };
                if err >= 1e-7 && cond > CONDITION_LIMIT {
                    conditioned += 1;
                    check.note(format!("trial {trial}: condition {cond:e}, error {err:e}"));
                    check.pass();
                } else {
                    check.residual(err, w);
                }
            }
            Err(e) => check.fail(w().with("error", e)),
        }
    }
    check.note(format!("{conditioned} conditioning-flagged cases excluded"));
    let mut rep = VerificationReport::new("symbolic-numeric oracle agreement", Some(seed));
    rep.push(check);
    rep
}
