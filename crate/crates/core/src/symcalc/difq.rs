use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::binomial;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::poly::{accumulate, Monomial, Poly};
use super::{PolyMap, SymError};
use crate::rings::{Dual, RingElem, RingId};

pub const DEFAULT_MONOMIAL_CAP: usize = 1_000_000;

fn parameter_level(names: &[String]) -> usize {
    names
        .iter()
        .filter(|n| {
            n.as_str() == "t"
                || n.strip_prefix('t')
                    .is_some_and(|r| !r.is_empty() && r.bytes().all(|b| b.is_ascii_digit()))
        })
        .count()
}

/// Variable names after one more quotient: directions are `u1..un` on the
/// first level and `d<name>` deeper; parameters are `t`, `t2`, `t3`, ...
fn difq_names(names: &[String]) -> Vec<String> {
    let level = parameter_level(names);
    let mut out = names.to_vec();
    for n in names {
        out.push(match (level, n.strip_prefix('x')) {
            (0, Some(rest)) => format!("u{rest}"),
            _ => format!("d{n}"),
        });
    }
    out.push(if level == 0 {
        "t".to_string()
    } else {
        format!("t{}", level + 1)
    });
    out
}

/// Enumerates every `j` with `0 ≤ j ≤ e` componentwise.
fn for_each_subindex(e: &[u32], mut visit: impl FnMut(&[u32])) {
    let mut j = vec![0u32; e.len()];
    loop {
        visit(&j);
        let mut i = 0;
        loop {
            if i == e.len() {
                return;
            }
            if j[i] < e[i] {
                j[i] += 1;
                break;
            }
            j[i] = 0;
            i += 1;
        }
    }
}

fn difq_poly(p: &Poly, cap: usize) -> Result<Poly, SymError> {
    let ring = p.ring();
    let n = p.nvars();
    let mut acc: BTreeMap<Monomial, RingElem> = BTreeMap::new();
    let mut overflow = false;
    for (m, c) in p.terms() {
        // (x + tu)^e = Σ_j Π C(e_i, j_i) x^(e-j) u^j t^|j|; the j = 0 term is
        // f itself and cancels, every other term carries a factor t.
        for_each_subindex(m.exps(), |j| {
            let tdeg: u32 = j.iter().sum();
            if tdeg == 0 || overflow {
                return;
            }
            let mut coeff = BigInt::from(1);
            for (&ei, &ji) in m.exps().iter().zip(j) {
                coeff *= binomial(BigInt::from(ei), BigInt::from(ji));
            }
            let coeff = c * &RingElem::from_bigint(ring, &coeff);
            if coeff.is_zero() {
                return;
            }
            let mut e = Vec::with_capacity(2 * n + 1);
            e.extend(m.exps().iter().zip(j).map(|(a, b)| a - b));
            e.extend_from_slice(j);
            assert!(tdeg >= 1, "divide-by-t on a term of t-degree 0");
            e.push(tdeg - 1);
            accumulate(&mut acc, Monomial(e), coeff);
            if acc.len() > cap {
                overflow = true;
            }
        });
        if overflow {
            return Err(SymError::SizeLimit {
                count: acc.len(),
                cap,
            });
        }
    }
    Ok(Poly::from_map(ring, 2 * n + 1, acc))
}

/// First order difference quotient map in variables `(x, u, t)`.
pub fn sym_difq1(f: &PolyMap) -> PolyMap {
    sym_difq1_capped(f, usize::MAX).expect("uncapped expansion cannot overflow")
}

pub fn sym_difq1_capped(f: &PolyMap, cap: usize) -> Result<PolyMap, SymError> {
    let mut count = 0;
    let mut comps = Vec::with_capacity(f.arity_out());
    for p in f.components() {
        let q = difq_poly(p, cap)?;
        count += q.len();
        if count > cap {
            return Err(SymError::SizeLimit { count, cap });
        }
        comps.push(q);
    }
    let names = difq_names(f.names());
    Ok(PolyMap::new(f.ring(), 2 * f.arity_in() + 1, comps)?.with_names(names))
}

/// `k`-fold nested quotient with the default monomial cap.
pub fn sym_difq_k(f: &PolyMap, k: usize) -> Result<PolyMap, SymError> {
    sym_difq_k_capped(f, k, DEFAULT_MONOMIAL_CAP)
}

pub fn sym_difq_k_capped(f: &PolyMap, k: usize, cap: usize) -> Result<PolyMap, SymError> {
    let mut g = f.clone();
    for _ in 0..k {
        g = sym_difq1_capped(&g, cap)?;
    }
    Ok(g)
}

/// Number of variables of `f^[k]` for `f` in `n` variables.
pub fn nested_arity(n: usize, k: u32) -> usize {
    (1usize << k) * (n + 1) - 1
}

/// The formal variation `δf(x, u)`: the quotient map at `t = 0`.
pub fn formal_var(f: &PolyMap) -> PolyMap {
    let g = sym_difq1(f);
    let t = g.arity_in() - 1;
    let comps = g.components().iter().map(|p| p.at_zero(t)).collect();
    let mut names = g.names().to_vec();
    names.pop();
    PolyMap::new(f.ring(), t, comps)
        .expect("restriction keeps arity consistent")
        .with_names(names)
}

/// `f(x + tu) − f(x)` built by generic substitution, in the variables of
/// `f^[1]`. Independent of [`sym_difq1`]; used as its oracle.
pub fn shifted_difference(f: &PolyMap) -> PolyMap {
    let ring = f.ring();
    let n = f.arity_in();
    let m = 2 * n + 1;
    let t = Poly::var(ring, m, 2 * n);
    let shift: Vec<Poly> = (0..n)
        .map(|i| Poly::var(ring, m, i).add(&t.mul(&Poly::var(ring, m, n + i))))
        .collect();
    let embed: Vec<usize> = (0..n).collect();
    let comps = f
        .components()
        .iter()
        .map(|p| p.compose(&shift).sub(&p.reindex(m, &embed)))
        .collect();
    PolyMap::new(ring, m, comps).expect("substitution keeps arity consistent")
}

/// Multiplies every component by the last variable.
pub fn times_last_var(g: &PolyMap) -> PolyMap {
    let ring = g.ring();
    let m = g.arity_in();
    let t = Poly::var(ring, m, m - 1);
    let comps = g.components().iter().map(|p| p.mul(&t)).collect();
    PolyMap::new(ring, m, comps).expect("same arity")
}

/// Small seeded scalar: `a/b` with `|a| ≤ 9`, `1 ≤ b ≤ 5` in the rationals.
pub fn random_coeff(ring: RingId, rng: &mut ChaCha8Rng) -> RingElem {
    match ring {
        RingId::Rational => RingElem::rational(rng.random_range(-9..=9), rng.random_range(1..=5)),
        RingId::PrimeField(p) => RingElem::prime(rng.random_range(0..i64::from(p)), p),
        RingId::Float64 => RingElem::Float(random_coeff(RingId::Rational, rng).to_f64()),
        RingId::Dual => {
            RingElem::Dual(Dual::constant(random_coeff(RingId::Rational, rng).to_f64()))
        }
    }
}

/// Seeded random polynomial with `nvars` variables, total degree at most
/// `max_deg` and up to `max_terms` terms.
pub fn random_poly(
    ring: RingId,
    nvars: usize,
    max_deg: u32,
    max_terms: usize,
    rng: &mut ChaCha8Rng,
) -> Poly {
    let count = rng.random_range(1..=max_terms.max(1));
    let terms: Vec<(Monomial, RingElem)> = (0..count)
        .map(|_| {
            let mut left = rng.random_range(0..=max_deg);
            let mut e = vec![0u32; nvars];
            for slot in e.iter_mut() {
                let take = rng.random_range(0..=left);
                *slot = take;
                left -= take;
            }
            if nvars > 0 && left > 0 {
                let i = rng.random_range(0..nvars);
                e[i] += left;
            }
            (Monomial(e), random_coeff(ring, rng))
        })
        .collect();
    Poly::from_terms(ring, nvars, terms)
}
