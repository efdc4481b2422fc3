use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{
    integrate, lemma50_exact, lemma50_variation_residual, midpoint_error_slope,
    thm52_identity_residual, under_integral_deriv_check, Curve, Family,
};
use crate::numdiff::{standard_test_set, ExtrapConfig, SmoothFn};
use crate::report::{Check, VerificationReport, Witness};
use crate::rings::{RingElem, RingId};
use crate::symcalc::{random_poly, Poly, PolyMap};

fn vec_in(rng: &mut ChaCha8Rng, n: usize, r: f64) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-r..r)).collect()
}

fn show(v: &[f64]) -> String {
    format!("{v:?}")
}

/// Integral identities on seeded cases: the difference quotient as an
/// integral of variations, the variation of `Iᵏg`, differentiation under
/// the integral, midpoint refinement order and `∫₀¹ eˢ ds`.
pub fn integral_identity_suite(trials: usize, seed: u64, cfg: &ExtrapConfig) -> VerificationReport {
    let mut rng = crate::seed::rng(seed, "riemann/suite");
    let mut report = VerificationReport::new("integral identities", Some(seed));
    let fns = standard_test_set();

    let mut thm = Check::new("thm52_identity").with_tolerance(1e-6);
    for trial in 0..trials {
        let f = &fns[trial % fns.len()];
        let n = f.arity_in();
        let (x, u) = (vec_in(&mut rng, n, 0.8), vec_in(&mut rng, n, 0.8));
        let t = if trial % 5 == 0 {
            0.0
        } else {
            rng.random_range(-1.0..1.0)
        };
        let r = thm52_identity_residual(f, &x, &u, t, cfg).unwrap_or(f64::INFINITY);
        thm.residual(r, || {
            Witness::new(trial)
                .with("f", f.label())
                .with("x", show(&x))
                .with("u", show(&u))
                .with("t", t)
        });
    }
    report.push(thm);

    let mut lem = Check::new("lemma50_formula").with_tolerance(1e-5);
    for trial in 0..trials {
        let k = (trial % 3) as u32;
        let g = if trial % 2 == 0 {
            let n = rng.random_range(1..=2);
            let p = PolyMap::scalar(random_poly(RingId::Rational, n, 3, 4, &mut rng));
            SmoothFn::from_poly(&p)
        } else {
            SmoothFn::unary(f64::exp).with_label("exp")
        };
        let n = g.arity_in();
        let v: Vec<Vec<f64>> = (0..4).map(|_| vec_in(&mut rng, n, 1.0)).collect();
        let r = lemma50_variation_residual(&g, k, &v[0], &v[1], &v[2], &v[3], cfg)
            .unwrap_or(f64::INFINITY);
        lem.residual(r, || {
            Witness::new(trial)
                .with("g", g.label())
                .with("k", k)
                .with("x", show(&v[0]))
                .with("u", show(&v[1]))
        });
    }
    report.push(lem);

    let mut wit = Check::new("lemma50_exact_witness");
    let sq = PolyMap::scalar(Poly::var(RingId::Rational, 1, 0).pow(2));
    let ones = vec![RingElem::from_int(RingId::Rational, 1); 4];
    let exact = lemma50_exact(&sq, 0).ok().and_then(|(lhs, rhs)| {
        let a = lhs.eval(&ones).ok()?;
        let b = rhs.eval(&ones).ok()?;
        Some((a, b))
    });
    match exact {
        Some((a, b)) if a == b && a == vec![RingElem::rational(14, 3)] => wit.pass(),
        other => wit.fail(Witness::new(0).with("values", format!("{other:?}"))),
    }
    report.push(wit);

    let mut p41 = Check::new("prop41_under_integral").with_tolerance(1e-6);
    let families = [
        ("s*t^2", Family::new(|s, t| s * t * t)),
        ("exp(s*t)", Family::new(|s, t| (s * t).exp())),
    ];
    for trial in 0..trials {
        let (name, fam) = &families[trial % 2];
        let t = rng.random_range(-1.0..1.0);
        let r = under_integral_deriv_check(fam, t, 1e-12).unwrap_or(f64::INFINITY);
        p41.residual(r, || Witness::new(trial).with("family", name).with("t", t));
    }
    report.push(p41);

    let exp = Curve::scalar(0.0, 1.0, f64::exp);
    let e1 = std::f64::consts::E - 1.0;
    let cells: Vec<usize> = (4..=12).map(|k| 1usize << k).collect();
    let slope = midpoint_error_slope(&exp, e1, &cells);
    let mut sl = Check::new("midpoint_order").with_tolerance(0.2);
    sl.residual((slope - 2.0).abs(), || Witness::new(0).with("slope", slope));
    sl.note(format!("fitted slope {slope:.6}"));
    report.push(sl);

    let mut ie = Check::new("integral_exp").with_tolerance(1e-8);
    let got = integrate(&exp, 0.0, 1.0, 1e-10).map(|(v, _)| v[0]);
    let err = got.as_ref().map_or(f64::INFINITY, |v| (v - e1).abs());
    ie.residual(err, || Witness::new(0).with("value", format!("{got:?}")));
    report.push(ie);
    report
}
