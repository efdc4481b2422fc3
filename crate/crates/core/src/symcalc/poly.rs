use std::cmp::Ordering;
use std::collections::BTreeMap;

use crate::rings::{RingElem, RingId, Scalar};

/// Exponent vector ordered graded-lexicographically: total degree first,
/// then the first differing exponent (variable 0 most significant).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn exps(&self) -> &[u32] {
        &self.0
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse polynomial in `nvars` variables over one ring.
///
/// Terms are kept sorted ascending in graded-lex order with no zero
/// coefficients and no repeated exponent vectors, so structural equality
/// is polynomial identity.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    ring: RingId,
    nvars: usize,
    terms: Vec<(Monomial, RingElem)>,
}

impl Poly {
    pub fn zero(ring: RingId, nvars: usize) -> Self {
        Poly {
            ring,
            nvars,
            terms: Vec::new(),
        }
    }

    pub fn constant(ring: RingId, nvars: usize, c: RingElem) -> Self {
        Poly::from_terms(ring, nvars, [(Monomial::one(nvars), c)])
    }

    pub fn var(ring: RingId, nvars: usize, i: usize) -> Self {
        assert!(i < nvars, "variable index out of range");
        let mut e = vec![0; nvars];
        e[i] = 1;
        Poly::from_terms(ring, nvars, [(Monomial(e), RingElem::one(ring))])
    }

    /// Collects terms, summing duplicates and dropping zeros.
    pub fn from_terms(
        ring: RingId,
        nvars: usize,
        terms: impl IntoIterator<Item = (Monomial, RingElem)>,
    ) -> Self {
        let mut acc: BTreeMap<Monomial, RingElem> = BTreeMap::new();
        for (m, c) in terms {
            assert_eq!(m.0.len(), nvars, "monomial arity mismatch");
            assert_eq!(c.ring(), ring, "coefficient ring mismatch");
            accumulate(&mut acc, m, c);
        }
        Poly::from_map(ring, nvars, acc)
    }

    pub(crate) fn from_map(ring: RingId, nvars: usize, acc: BTreeMap<Monomial, RingElem>) -> Self {
        Poly {
            ring,
            nvars,
            terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        }
    }

    pub fn ring(&self) -> RingId {
        self.ring
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &[(Monomial, RingElem)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms.last().map_or(0, |(m, _)| m.degree())
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.iter().map(|(m, _)| m.0[var]).max().unwrap_or(0)
    }

    pub fn add(&self, other: &Poly) -> Poly {
        self.check_compatible(other);
        let mut acc: BTreeMap<Monomial, RingElem> = self.terms.iter().cloned().collect();
        for (m, c) in &other.terms {
            accumulate(&mut acc, m.clone(), c.clone());
        }
        Poly::from_map(self.ring, self.nvars, acc)
    }

    pub fn neg(&self) -> Poly {
        Poly {
            ring: self.ring,
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: &RingElem) -> Poly {
        Poly::from_terms(
            self.ring,
            self.nvars,
            self.terms.iter().map(|(m, c)| (m.clone(), c * k)),
        )
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        self.check_compatible(other);
        let mut acc = BTreeMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let e = ma.0.iter().zip(&mb.0).map(|(a, b)| a + b).collect();
                accumulate(&mut acc, Monomial(e), ca * cb);
            }
        }
        Poly::from_map(self.ring, self.nvars, acc)
    }

    pub fn pow(&self, mut e: u32) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::constant(self.ring, self.nvars, RingElem::one(self.ring));
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Direct monomial-by-monomial evaluation.
    pub fn eval(&self, point: &[RingElem]) -> RingElem {
        assert_eq!(point.len(), self.nvars);
        let mut sum = RingElem::zero(self.ring);
        for (m, c) in &self.terms {
            let mut v = c.clone();
            for (x, &e) in point.iter().zip(&m.0) {
                if e > 0 {
                    v = &v * &x.pow(e);
                }
            }
            sum = &sum + &v;
        }
        sum
    }

    /// Evaluation over a numeric scalar type; coefficients go through f64.
    pub fn eval_scalar<S: Scalar>(&self, point: &[S]) -> S {
        assert_eq!(point.len(), self.nvars);
        let mut sum = S::from_f64(0.0);
        for (m, c) in &self.terms {
            let mut v = S::from_f64(c.to_f64());
            for (x, &e) in point.iter().zip(&m.0) {
                if e > 0 {
                    v = v * x.powi(e as i32);
                }
            }
            sum = sum + v;
        }
        sum
    }

    /// Substitutes `subs[i]` for variable `i`; all substitutes share one
    /// variable count, which becomes the result's.
    pub fn compose(&self, subs: &[Poly]) -> Poly {
        assert_eq!(subs.len(), self.nvars, "one substitute per variable");
        let nvars = subs.first().map_or(0, Poly::nvars);
        let mut powers: Vec<Vec<Poly>> = subs
            .iter()
            .map(|s| vec![Poly::constant(self.ring, s.nvars, RingElem::one(self.ring))])
            .collect();
        let mut out = Poly::zero(self.ring, nvars);
        for (m, c) in &self.terms {
            let mut term = Poly::constant(self.ring, nvars, c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                while powers[i].len() <= e as usize {
                    let next = powers[i].last().unwrap().mul(&subs[i]);
                    powers[i].push(next);
                }
                if e > 0 {
                    term = term.mul(&powers[i][e as usize]);
                }
            }
            out = out.add(&term);
        }
        out
    }

    /// Renames variable `i` to `map[i]` in a polynomial ring with
    /// `new_nvars` variables.
    pub fn reindex(&self, new_nvars: usize, map: &[usize]) -> Poly {
        assert_eq!(map.len(), self.nvars);
        Poly::from_terms(
            self.ring,
            new_nvars,
            self.terms.iter().map(|(m, c)| {
                let mut e = vec![0; new_nvars];
                for (i, &k) in m.0.iter().enumerate() {
                    e[map[i]] += k;
                }
                (Monomial(e), c.clone())
            }),
        )
    }

    /// Keeps terms whose exponent in `var` is zero and drops that variable.
    pub fn at_zero(&self, var: usize) -> Poly {
        Poly::from_terms(
            self.ring,
            self.nvars - 1,
            self.terms
                .iter()
                .filter(|(m, _)| m.0[var] == 0)
                .map(|(m, c)| {
                    let mut e = m.0.clone();
                    e.remove(var);
                    (Monomial(e), c.clone())
                }),
        )
    }

    /// Textual form, highest graded-lex term first, e.g.
    /// `2/1*x1*u1 + t*u1^2`.
    pub fn to_text(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .rev()
            .map(|(m, c)| {
                let mono: Vec<String> =
                    m.0.iter()
                        .zip(names)
                        .filter(|(&e, _)| e > 0)
                        .map(|(&e, n)| {
                            if e == 1 {
                                n.clone()
                            } else {
                                format!("{n}^{e}")
                            }
                        })
                        .collect();
                if mono.is_empty() {
                    c.to_string()
                } else if c.is_one() {
                    mono.join("*")
                } else {
                    format!("{c}*{}", mono.join("*"))
                }
            })
            .collect();
        parts.join(" + ")
    }

    fn check_compatible(&self, other: &Poly) {
        assert_eq!(self.ring, other.ring, "ring mismatch");
        assert_eq!(self.nvars, other.nvars, "variable count mismatch");
    }
}

pub(crate) fn accumulate(acc: &mut BTreeMap<Monomial, RingElem>, m: Monomial, c: RingElem) {
    match acc.get_mut(&m) {
        Some(existing) => *existing = &*existing + &c,
        None => {
            acc.insert(m, c);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> RingElem {
        RingElem::from_int(RingId::Rational, n)
    }

    #[test]
    fn grlex_order() {
        let a = Monomial(vec![2, 0]);
        let b = Monomial(vec![1, 1]);
        let c = Monomial(vec![0, 3]);
        assert!(a > b);
        assert!(c > a);
        assert!(Monomial(vec![0, 0]) < b);
    }

    #[test]
    fn binomial_square() {
        let r = RingId::Rational;
        let x = Poly::var(r, 1, 0);
        let one = Poly::constant(r, 1, q(1));
        let lhs = x.add(&one).pow(2);
        let rhs = Poly::from_terms(
            r,
            1,
            [
                (Monomial(vec![2]), q(1)),
                (Monomial(vec![1]), q(2)),
                (Monomial(vec![0]), q(1)),
            ],
        );
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn cancellation_leaves_zero() {
        let r = RingId::PrimeField(5);
        let x = Poly::var(r, 2, 0);
        let z = x.scale(&RingElem::prime(5, 5));
        assert!(z.is_zero());
        assert!(x.sub(&x).is_zero());
    }

    #[test]
    fn compose_substitutes() {
        let r = RingId::Rational;
        // p(x) = x^2, substitute x -> y + 1 in two variables (y, z).
        let p = Poly::var(r, 1, 0).pow(2);
        let s = Poly::var(r, 2, 0).add(&Poly::constant(r, 2, q(1)));
        let c = p.compose(std::slice::from_ref(&s));
        assert_eq!(c, s.mul(&s));
    }

    #[test]
    fn text_form() {
        let r = RingId::Rational;
        let names: Vec<String> = ["x1", "u1", "t"].iter().map(|s| s.to_string()).collect();
        let p = Poly::from_terms(
            r,
            3,
            [
                (Monomial(vec![1, 1, 0]), q(2)),
                (Monomial(vec![0, 2, 1]), q(1)),
            ],
        );
        assert_eq!(p.to_text(&names), "u1^2*t + 2/1*x1*u1");
        assert_eq!(Poly::zero(r, 3).to_text(&names), "0");
    }
}
