use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::AxiomError;
use crate::report::{Check, VerificationReport, Witness};
use crate::rings::{RingElem, RingId};
use crate::symcalc::{
    nested_arity, poly_equal, random_coeff, random_poly, sym_difq1, sym_difq_k, Poly, PolyMap,
};

/// Coefficients (constant first) of the interpolant through
/// `(nodes[i], values[i])`, by Newton divided differences.
pub fn interpolate(nodes: &[RingElem], values: &[RingElem]) -> Result<Vec<RingElem>, AxiomError> {
    let n = nodes.len();
    let mut c = values.to_vec();
    for j in 1..n {
        for i in (j..n).rev() {
            let den = (&nodes[i] - &nodes[i - j])
                .inv()
                .map_err(crate::symcalc::SymError::from)?;
            c[i] = &(&c[i] - &c[i - 1]) * &den;
        }
    }
    let Some(top) = c.last() else {
        return Ok(Vec::new());
    };
    let ring = top.ring();
    let mut poly = vec![top.clone()];
    for k in (0..n - 1).rev() {
        // poly ← poly · (t − x_k) + c_k
        let mut next = vec![RingElem::zero(ring); poly.len() + 1];
        for (i, a) in poly.iter().enumerate() {
            next[i + 1] = &next[i + 1] + a;
            next[i] = &next[i] - &(a * &nodes[k]);
        }
        next[0] = &next[0] + &c[k];
        poly = next;
    }
    Ok(poly)
}

/// `p` with every variable but the last fixed to `point`, as coefficients
/// in the last variable.
fn restrict(p: &Poly, point: &[RingElem], len: usize) -> Vec<RingElem> {
    let ring = p.ring();
    let mut subs: Vec<Poly> = point
        .iter()
        .map(|c| Poly::constant(ring, 1, c.clone()))
        .collect();
    subs.push(Poly::var(ring, 1, 0));
    let q = p.compose(&subs);
    let mut out = vec![RingElem::zero(ring); len.max(q.degree() as usize + 1)];
    for (m, c) in q.terms() {
        out[m.exps()[0] as usize] = c.clone();
    }
    out
}

fn pad(mut v: Vec<RingElem>, len: usize, ring: RingId) -> Vec<RingElem> {
    v.resize(len.max(v.len()), RingElem::zero(ring));
    v
}

fn show(v: &[RingElem]) -> String {
    let parts: Vec<String> = v.iter().map(|e| e.to_string()).collect();
    format!("({})", parts.join(", "))
}

/// Builds `f^[1]` symbolically and by interpolating
/// `t ↦ (f(x + tu) − f(x))·t⁻¹` through distinct nonzero nodes at seeded
/// `(x, u)`, and compares the two.
pub fn prop9_uniqueness(
    f: &PolyMap,
    trials: usize,
    seed: u64,
) -> Result<VerificationReport, AxiomError> {
    let mut report = VerificationReport::new("first difference quotient uniqueness", Some(seed));
    let mut check = Check::new("prop9_uniqueness");
    let mut rng = crate::seed::rng(seed, "axioms/prop9");
    prop9_into(f, trials, &mut rng, &mut check, 0)?;
    report.push(check);
    Ok(report)
}

fn prop9_into(
    f: &PolyMap,
    trials: usize,
    rng: &mut ChaCha8Rng,
    check: &mut Check,
    first_trial: usize,
) -> Result<(), AxiomError> {
    let ring = f.ring();
    if !ring.is_exact() {
        return Err(AxiomError::NotExact(ring));
    }
    let n = f.arity_in();
    let f1 = sym_difq1(f);
    let tdeg = f1
        .components()
        .iter()
        .map(|p| p.degree_in(2 * n))
        .max()
        .unwrap_or(0);
    let nodes: Vec<RingElem> = match ring {
        RingId::PrimeField(p) => {
            if tdeg as usize >= p as usize - 1 {
                return Err(AxiomError::DegreeCapExceeded {
                    degree: tdeg,
                    nodes: p as usize - 1,
                });
            }
            (1..i64::from(p)).map(|r| RingElem::prime(r, p)).collect()
        }
        // One node beyond the degree confirms the bound.
        _ => (1..=i64::from(tdeg) + 2)
            .map(|k| RingElem::from_int(ring, if k % 2 == 0 { k } else { -k }))
            .collect(),
    };
    for trial in 0..trials {
        let x: Vec<RingElem> = (0..n).map(|_| random_coeff(ring, rng)).collect();
        let u: Vec<RingElem> = (0..n).map(|_| random_coeff(ring, rng)).collect();
        let fx = f.eval(&x)?;
        let mut values = vec![Vec::with_capacity(nodes.len()); f.arity_out()];
        for t in &nodes {
            let moved: Vec<RingElem> = x.iter().zip(&u).map(|(a, b)| a + &(t * b)).collect();
            let it = t.inv().map_err(crate::symcalc::SymError::from)?;
            for (i, (a, b)) in f.eval(&moved)?.iter().zip(&fx).enumerate() {
                values[i].push(&(a - b) * &it);
            }
        }
        let point: Vec<RingElem> = x.iter().chain(&u).cloned().collect();
        let mut ok = true;
        for (i, p) in f1.components().iter().enumerate() {
            let sym = restrict(p, &point, nodes.len());
            let num = pad(interpolate(&nodes, &values[i])?, sym.len(), ring);
            ok &= sym == num;
        }
        if ok {
            check.pass();
        } else {
            check.fail(
                Witness::new(first_trial + trial)
                    .with("f", f.to_text())
                    .with("x", show(&x))
                    .with("u", show(&u)),
            );
        }
    }
    Ok(())
}

/// Uniqueness of the quotient on `trials` seeded maps `𝕂ⁿ → 𝕂`, `n ≤ 2`, one `(x, u)` each.
pub fn prop9_suite(
    ring: RingId,
    trials: usize,
    seed: u64,
) -> Result<VerificationReport, AxiomError> {
    let mut rng = crate::seed::rng(seed, "axioms/prop9_suite");
    let max_deg = match ring {
        RingId::PrimeField(p) => 5.min(p.saturating_sub(1)),
        _ => 5,
    };
    let mut report = VerificationReport::new(
        &format!("difference quotient uniqueness over {ring}"),
        Some(seed),
    );
    let mut check = Check::new("prop9_uniqueness");
    for trial in 0..trials {
        let n = rng.random_range(1..=2);
        let f = PolyMap::scalar(random_poly(ring, n, max_deg, 5, &mut rng));
        prop9_into(&f, 1, &mut rng, &mut check, trial)?;
    }
    report.push(check);
    Ok(report)
}

/// `f^[k+1]` against `(f^[1])^[k]`, and the arity of `f^[k+1]`.
pub fn prop10_recursion(f: &PolyMap, k: usize) -> Result<VerificationReport, AxiomError> {
    let mut report = VerificationReport::new("difference quotient recursion", None);
    let mut rec = Check::new("prop10_recursion");
    let mut arity = Check::new("arity_formula");
    prop10_into(f, k, 0, &mut rec, &mut arity)?;
    report.push(rec);
    report.push(arity);
    Ok(report)
}

fn prop10_into(
    f: &PolyMap,
    k: usize,
    trial: usize,
    rec: &mut Check,
    arity: &mut Check,
) -> Result<(), AxiomError> {
    if k == 0 {
        return Err(AxiomError::InvalidOrder);
    }
    let lhs = sym_difq_k(f, k + 1)?;
    let rhs = sym_difq_k(&sym_difq1(f), k)?;
    let witness = || Witness::new(trial).with("f", f.to_text()).with("k", k);
    if poly_equal(&lhs, &rhs)? {
        rec.pass();
    } else {
        rec.fail(witness());
    }
    if lhs.arity_in() == nested_arity(f.arity_in(), k as u32 + 1) {
        arity.pass();
    } else {
        arity.fail(witness().with("arity", lhs.arity_in()));
    }
    Ok(())
}

/// Recursion for higher quotients on `trials` seeded maps with degree ≤ 4, `n ≤ 2`, `k ≤ 2`.
pub fn prop10_suite(
    ring: RingId,
    trials: usize,
    seed: u64,
) -> Result<VerificationReport, AxiomError> {
    let mut rng = crate::seed::rng(seed, "axioms/prop10_suite");
    let mut report = VerificationReport::new(
        &format!("difference quotient recursion over {ring}"),
        Some(seed),
    );
    let mut rec = Check::new("prop10_recursion");
    let mut arity = Check::new("arity_formula");
    for trial in 0..trials {
        let n = rng.random_range(1..=2);
        let k = rng.random_range(1..=2);
        let f = PolyMap::scalar(random_poly(ring, n, 4, 4, &mut rng));
        prop10_into(&f, k, trial, &mut rec, &mut arity)?;
    }
    report.push(rec);
    report.push(arity);
    Ok(report)
}
