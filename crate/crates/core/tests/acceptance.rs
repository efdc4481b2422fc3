//! End-to-end acceptance run: one line per criterion, nonzero exit if any
//! criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use difq::axioms::axiom_suite;
use difq::funcgrid::{seip_norm_fixed_point, shift_variation_study, GridSpec, LIPSCHITZ_BOUND};
use difq::numdiff::{
    calculus_rule_suite, dual_crosscheck_suite, oracle_agreement_suite, seip_var,
    standard_test_set, ExtrapConfig, SmoothFn,
};
use difq::report::{Status, VerificationReport};
use difq::riemann::{
    integral_identity_suite, integral_op_ik, integrate, lemma50_exact, midpoint_error_slope,
    thm52_identity_residual, under_integral_deriv_check, Curve, Family,
};
use difq::rings::{RingElem, RingId};
use difq::seed;
use difq::sharplab::{coefficient_a, h_map, noninjectivity_demo, rk4_order_study, SharpConfig};
use difq::symcalc::{exact_division_suite, random_poly, sym_difq1, Poly, PolyMap};
use rand::Rng;

const SEED: u64 = 20_240_601;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn check_passed(r: &VerificationReport, name: &str) -> Result<(), String> {
    let c = r
        .check(name)
        .ok_or_else(|| format!("report has no check {name}"))?;
    ensure(c.status != Status::Fail, || {
        format!(
            "{name}: {} of {} trials failed, worst {:?}, e.g. {:?}",
            c.failures.len(),
            c.trials,
            c.worst_residual,
            c.witness.first()
        )
    })
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, f64) {
    let start = Instant::now();
    let v = f();
    (v, start.elapsed().as_secs_f64())
}

fn q(n: i64) -> RingElem {
    RingElem::from_int(RingId::Rational, n)
}

/// `t·f^[1](x, u, t) = f(x + tu) − f(x)` at random exact points, evaluated
/// straight from the polynomial.
fn division_oracle(ring: RingId, cases: usize) -> Result<(), String> {
    let mut rng = seed::rng(SEED, "acceptance/division-oracle");
    for case in 0..cases {
        let n = rng.random_range(1..=3);
        let p = random_poly(ring, n, 6, 6, &mut rng);
        let f1 = sym_difq1(&PolyMap::scalar(p.clone()));
        let el =
            |rng: &mut rand_chacha::ChaCha8Rng| RingElem::from_int(ring, rng.random_range(-9..=9));
        let x: Vec<RingElem> = (0..n).map(|_| el(&mut rng)).collect();
        let u: Vec<RingElem> = (0..n).map(|_| el(&mut rng)).collect();
        let mut t = el(&mut rng);
        while t.is_zero() {
            t = el(&mut rng);
        }
        let shifted: Vec<RingElem> = x.iter().zip(&u).map(|(a, b)| a + &(&t * b)).collect();
        let rhs = &p.eval(&shifted) - &p.eval(&x);
        let mut point = x.clone();
        point.extend(u.iter().cloned());
        point.push(t.clone());
        let lhs = &t * &f1.eval(&point).map_err(|e| e.to_string())?[0];
        ensure(lhs == rhs, || {
            format!("case {case}: {lhs} != {rhs} over {ring}")
        })?;
    }
    Ok(())
}

fn c1_exact_division() -> Outcome {
    let (reports, secs) = timed(|| {
        [RingId::Rational, RingId::PrimeField(7)].map(|r| exact_division_suite(r, 1000, SEED))
    });
    for r in &reports {
        check_passed(r, "exact_division")?;
    }
    division_oracle(RingId::Rational, 200)?;
    division_oracle(RingId::PrimeField(7), 200)?;
    ensure(secs < 5.0, || format!("took {secs:.2} s"))?;
    Ok(format!(
        "2 x 1000 cases in {secs:.2} s, direct oracle 400 cases"
    ))
}

fn c2_oracle_agreement() -> Outcome {
    let (r, secs) = timed(|| oracle_agreement_suite(200, SEED, &ExtrapConfig::default()));
    check_passed(&r, "oracle_agreement")?;
    let c = r.check("oracle_agreement").unwrap();
    ensure(secs < 10.0, || format!("took {secs:.2} s"))?;
    Ok(format!(
        "{} cases, worst {:.2e}, {} flagged note(s), {secs:.2} s",
        c.trials,
        c.worst_residual.unwrap_or(0.0),
        c.notes.len()
    ))
}

fn c3_dual_crosscheck() -> Outcome {
    let r = dual_crosscheck_suite(&standard_test_set(), 100, SEED, &ExtrapConfig::default());
    check_passed(&r, "dual_crosscheck")?;
    let c = r.check("dual_crosscheck").unwrap();
    ensure(c.trials >= 100, || format!("only {} trials", c.trials))?;
    Ok(format!("worst {:.2e}", c.worst_residual.unwrap_or(0.0)))
}

fn c4_chain_rule() -> Outcome {
    let cfg = ExtrapConfig::default();
    let r = calculus_rule_suite(&standard_test_set(), 50, SEED, &cfg);
    check_passed(&r, "chain_rule")?;
    let f = SmoothFn::unary(|x| x.exp().sin());
    let (v, _) = seip_var(&f, &[0.0], &[1.0], &cfg).map_err(|e| e.to_string())?;
    let err = (v[0] - 1f64.cos()).abs();
    ensure(err < 1e-6, || format!("sin∘exp variation off by {err:e}"))?;
    Ok(format!("50 cases, sin∘exp at (0, 1) off by {err:.1e}"))
}

fn c5_symmetry_padding() -> Outcome {
    let r = calculus_rule_suite(&standard_test_set(), 50, SEED ^ 5, &ExtrapConfig::default());
    check_passed(&r, "symmetry")?;
    check_passed(&r, "zero_padding")?;
    let w = |n: &str| r.check(n).and_then(|c| c.worst_residual).unwrap_or(0.0);
    Ok(format!(
        "symmetry {:.1e}, padding {:.1e}",
        w("symmetry"),
        w("zero_padding")
    ))
}

fn c6_thm52() -> Outcome {
    let cfg = ExtrapConfig::default();
    let r = integral_identity_suite(50, SEED, &cfg);
    check_passed(&r, "thm52_identity")?;
    let f = SmoothFn::new(2, 1, |x| vec![x[0].sin() * x[1].exp()]);
    let r0 = thm52_identity_residual(&f, &[0.3, -0.2], &[1.0, 0.5], 0.0, &cfg)
        .map_err(|e| e.to_string())?;
    ensure(r0 < 1e-6, || format!("t = 0 residual {r0:e}"))?;
    // ∫₀¹ cos(x + s·h) ds = (sin(x + h) − sin x)/h
    let (x, h) = (0.4, 0.7);
    let got = integral_op_ik(&SmoothFn::unary(f64::cos), 0, &[x], &[h], 1e-12)
        .map_err(|e| e.to_string())?[0];
    let want = ((x + h).sin() - x.sin()) / h;
    ensure((got - want).abs() < 1e-6, || {
        format!("quotient integral {got} vs {want}")
    })?;
    Ok(format!("50 cases, t = 0 residual {r0:.1e}"))
}

fn c7_lemma50() -> Outcome {
    let cfg = ExtrapConfig::default();
    let r = integral_identity_suite(50, SEED ^ 7, &cfg);
    check_passed(&r, "lemma50_formula")?;
    check_passed(&r, "lemma50_exact_witness")?;
    let sq = PolyMap::scalar(Poly::var(RingId::Rational, 1, 0).pow(2));
    let (lhs, rhs) = lemma50_exact(&sq, 0).map_err(|e| e.to_string())?;
    let ones = vec![q(1); 4];
    let want = vec![RingElem::rational(14, 3)];
    let (l, rv) = (lhs.eval(&ones).unwrap(), rhs.eval(&ones).unwrap());
    ensure(l == want && rv == want, || {
        format!("witness {l:?} / {rv:?}")
    })?;
    // x² + xu + u²/3 is ∫₀¹ (x + su)² ds; vary it numerically.
    let i0 = SmoothFn::new(2, 1, |p| {
        vec![p[0] * p[0] + p[0] * p[1] + p[1] * p[1] / 3.0]
    });
    let (v, _) = seip_var(&i0, &[1.0, 1.0], &[1.0, 1.0], &cfg).map_err(|e| e.to_string())?;
    ensure((v[0] - 14.0 / 3.0).abs() < 1e-9, || {
        format!("numeric witness {}", v[0])
    })?;
    Ok("formula within 1e-5, witness 14/3 exact".into())
}

fn c8_riemann() -> Outcome {
    let exp = Curve::scalar(0.0, 1.0, f64::exp);
    let e1 = std::f64::consts::E - 1.0;
    let cells: Vec<usize> = (4..=12).map(|k| 1usize << k).collect();
    let slope = midpoint_error_slope(&exp, e1, &cells);
    ensure((slope - 2.0).abs() < 0.2, || format!("slope {slope}"))?;
    let (v, _) = integrate(&exp, 0.0, 1.0, 1e-10).map_err(|e| e.to_string())?;
    let err = (v[0] - e1).abs();
    ensure(err < 1e-8, || format!("integral off by {err:e}"))?;
    Ok(format!("slope {slope:.4}, ∫exp off by {err:.1e}"))
}

fn c9_prop41() -> Outcome {
    let fams = [
        ("s*t^2", Family::new(|s, t| s * t * t)),
        ("exp(s*t)", Family::new(|s, t| (s * t).exp())),
    ];
    let mut worst: f64 = 0.0;
    for (name, fam) in &fams {
        for t in [-0.9, -0.3, 0.0, 0.25, 0.8] {
            let r = under_integral_deriv_check(fam, t, 1e-12).map_err(|e| e.to_string())?;
            ensure(r < 1e-6, || format!("{name} at t = {t}: {r:e}"))?;
            worst = worst.max(r);
        }
    }
    Ok(format!("worst {worst:.1e}"))
}

fn c10_sharp() -> Outcome {
    let cfg = SharpConfig::default();
    let (demo, secs) = timed(|| noninjectivity_demo(&cfg));
    let demo = demo.map_err(|e| e.to_string())?;
    ensure(demo.report.passed(), || demo.report.to_string())?;
    let a = coefficient_a(0.1, &cfg).map_err(|e| e.to_string())?;
    let closed = 0.1f64.exp() - 1.0;
    ensure((a - 0.105).abs() <= 0.005, || format!("A(0.1) = {a}"))?;
    ensure((a - closed).abs() < 1e-8, || {
        format!("A(0.1) = {a}, closed form {closed}")
    })?;
    ensure(demo.sup_u1_u0 >= 0.019, || {
        format!("|u1 - u0| = {}", demo.sup_u1_u0)
    })?;
    ensure(demo.sup_h_u1_u0 < 1e-4, || {
        format!("|h(u1) - u0| = {}", demo.sup_h_u1_u0)
    })?;
    let h0 = h_map(&demo.u0, &cfg).map_err(|e| e.to_string())?;
    ensure(h0.samples() == demo.u0.samples(), || "h(u0) != u0".into())?;
    ensure(secs < 10.0, || format!("took {secs:.2} s"))?;
    let (_, order) =
        rk4_order_study(cfg.eta0, &cfg, &[16, 32, 64, 128]).map_err(|e| e.to_string())?;
    ensure((order - 4.0).abs() <= 0.5, || format!("RK4 order {order}"))?;
    Ok(format!(
        "A = {a:.5}, |u1-u0| = {:.4}, |h(u1)-u0| = {:.1e}, RK4 order {order:.2}, {secs:.2} s",
        demo.sup_u1_u0, demo.sup_h_u1_u0
    ))
}

fn c11_shift() -> Outcome {
    let s = shift_variation_study(&[128, 256, 512, 1024]).map_err(|e| e.to_string())?;
    let (n, e) = *s.rows.last().unwrap();
    ensure(n == 1024 && e < 1e-5, || {
        format!("sup error {e:e} at N = {n}")
    })?;
    ensure(s.order >= 3.5, || format!("order {}", s.order))?;
    Ok(format!(
        "sup error {e:.1e} at N = 1024, order {:.2}",
        s.order
    ))
}

/// Root of `x = s + sin(x)/2` by Newton's method.
fn newton_root(s: f64) -> f64 {
    let mut x = s;
    for _ in 0..100 {
        let step = (x - s - 0.5 * x.sin()) / (1.0 - 0.5 * x.cos());
        x -= step;
        if step.abs() < 1e-16 {
            break;
        }
    }
    x
}

fn c12_fixed_point() -> Outcome {
    let phi = SmoothFn::new(2, 1, |st| vec![st[0] + 0.5 * st[1].sin()]);
    let spec = GridSpec::new(0.0, 2.0, 200).map_err(|e| e.to_string())?;
    let fp = seip_norm_fixed_point(&phi, spec, 1e-12).map_err(|e| e.to_string())?;
    ensure(fp.lipschitz_estimate <= LIPSCHITZ_BOUND + 1e-6, || {
        format!("Lipschitz {}", fp.lipschitz_estimate)
    })?;
    ensure(fp.residual < 1e-10, || {
        format!("residual {:e}", fp.residual)
    })?;
    let worst =
        fp.x.nodes()
            .iter()
            .zip(fp.x.samples())
            .fold(0.0f64, |m, (s, v)| m.max((v - newton_root(*s)).abs()));
    ensure(worst < 1e-9, || format!("oracle gap {worst:e}"))?;
    let x1 = fp.x.eval(1.0).map_err(|e| e.to_string())?;
    ensure((x1 - 1.4987).abs() < 1e-4, || format!("x(1) = {x1}"))?;
    Ok(format!(
        "Lipschitz {:.4}, residual {:.1e}, oracle {worst:.1e}, x(1) = {x1:.4}",
        fp.lipschitz_estimate, fp.residual
    ))
}

fn c13_axioms() -> Outcome {
    let (res, secs) =
        timed(|| [RingId::Rational, RingId::PrimeField(7)].map(|r| axiom_suite(r, 100, SEED)));
    let mut flagged = 0;
    for r in res {
        let r = r.map_err(|e| e.to_string())?;
        for name in ["prop9_uniqueness", "prop10_recursion"] {
            check_passed(&r, name)?;
        }
        ensure(r.passed(), || r.to_string())?;
        flagged += r
            .checks
            .iter()
            .filter(|c| c.status == Status::Flagged)
            .count();
    }
    ensure(secs < 10.0, || format!("took {secs:.2} s"))?;
    Ok(format!(
        "Q and F7, 0 failures, {flagged} flagged, {secs:.2} s"
    ))
}

fn run_cli(args: &[&str]) -> Result<Vec<u8>, String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let out = dir.path().to_str().unwrap().to_string();
    let mut argv = vec!["difq", "--out", &out];
    argv.extend_from_slice(args);
    let (mut so, mut se) = (Vec::new(), Vec::new());
    let code = difq::cli::run(argv, &mut so, &mut se);
    ensure(code == 0, || {
        format!("{args:?} exited {code}: {}", String::from_utf8_lossy(&se))
    })?;
    std::fs::read(dir.path().join("report.json")).map_err(|e| e.to_string())
}

fn c14_determinism() -> Outcome {
    let cases: [&[&str]; 3] = [
        &["--seed", "7", "verify", "all", "--trials", "10"],
        &["--seed", "7", "demo", "sharp", "--n", "400"],
        &[
            "difq",
            "--expr",
            "x1^3 - x1*x2",
            "--at",
            "1,2",
            "--dir",
            "1/2,1",
            "--t",
            "3",
        ],
    ];
    for args in cases {
        let (a, b) = (run_cli(args)?, run_cli(args)?);
        ensure(a == b, || format!("report.json differs for {args:?}"))?;
    }
    Ok("3 commands, byte-identical report.json".into())
}

fn main() {
    let criteria: [Criterion; 14] = [
        ("exact division", c1_exact_division),
        ("oracle agreement", c2_oracle_agreement),
        ("dual cross-check", c3_dual_crosscheck),
        ("chain rule", c4_chain_rule),
        ("symmetry and zero padding", c5_symmetry_padding),
        ("quotient as integral of variation", c6_thm52),
        ("variation of integral operator", c7_lemma50),
        ("Riemann midpoint order", c8_riemann),
        ("variation under the integral", c9_prop41),
        ("non-injective h", c10_sharp),
        ("shift variation refinement", c11_shift),
        ("contraction fixed point", c12_fixed_point),
        ("axioms and uniqueness", c13_axioms),
        ("CLI determinism", c14_determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(f))
            .unwrap_or_else(|p| Err(format!("panicked: {:?}", p.downcast_ref::<String>())));
        match outcome {
            Ok(detail) => println!("criterion {:2} PASS  {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:2} FAIL  {name}: {why}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
