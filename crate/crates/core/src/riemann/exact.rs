use crate::rings::RingElem;
use crate::symcalc::{formal_var, Monomial, Poly, PolyMap, SymError};

/// `∫₀¹ p ds` for `s` the last variable of `p`.
fn integrate_last(p: &Poly) -> Result<Poly, SymError> {
    let ring = p.ring();
    let n = p.nvars() - 1;
    let mut terms = Vec::with_capacity(p.len());
    for (m, c) in p.terms() {
        let e = m.exps()[n];
        let w = RingElem::from_int(ring, i64::from(e) + 1).inv()?;
        terms.push((Monomial(m.exps()[..n].to_vec()), c * &w));
    }
    Ok(Poly::from_terms(ring, n, terms))
}

fn s_power(ring: crate::rings::RingId, nvars: usize, k: u32) -> Poly {
    Poly::var(ring, nvars, nvars - 1).pow(k)
}

/// `Iᵏg(x, u) = ∫₀¹ sᵏ g(x + su) ds` as an exact polynomial map in `(x, u)`.
pub fn integral_op_poly(g: &PolyMap, k: u32) -> Result<PolyMap, SymError> {
    let ring = g.ring();
    let n = g.arity_in();
    let m = 2 * n + 1;
    let s = Poly::var(ring, m, 2 * n);
    let shift: Vec<Poly> = (0..n)
        .map(|i| Poly::var(ring, m, i).add(&s.mul(&Poly::var(ring, m, n + i))))
        .collect();
    let sk = s_power(ring, m, k);
    let comps = g
        .components()
        .iter()
        .map(|p| integrate_last(&p.compose(&shift).mul(&sk)))
        .collect::<Result<Vec<_>, _>>()?;
    PolyMap::new(ring, 2 * n, comps)
}

/// Both sides of the variation-of-integral formula in the variables
/// `(x, u, y, v)`: `δ(Iᵏg)((x, u), (y, v))` and
/// `∫₀¹ sᵏ δg(x + su, y) + sᵏ⁺¹ δg(x + su, v) ds`.
pub fn lemma50_exact(g: &PolyMap, k: u32) -> Result<(PolyMap, PolyMap), SymError> {
    let ring = g.ring();
    let n = g.arity_in();
    let lhs = formal_var(&integral_op_poly(g, k)?);

    let dg = formal_var(g);
    let m = 4 * n + 1;
    let var = |i: usize| Poly::var(ring, m, i);
    let s = var(4 * n);
    let base: Vec<Poly> = (0..n).map(|i| var(i).add(&s.mul(&var(n + i)))).collect();
    let with_dir = |offset: usize| -> Vec<Poly> {
        base.iter()
            .cloned()
            .chain((0..n).map(|i| var(offset + i)))
            .collect()
    };
    let (sub_y, sub_v) = (with_dir(2 * n), with_dir(3 * n));
    let sk = s_power(ring, m, k);
    let sk1 = s_power(ring, m, k + 1);
    let comps = dg
        .components()
        .iter()
        .map(|p| {
            let integrand = p.compose(&sub_y).mul(&sk).add(&p.compose(&sub_v).mul(&sk1));
            integrate_last(&integrand)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok((lhs, PolyMap::new(ring, 4 * n, comps)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rings::RingId;
    use crate::symcalc::{poly_equal, random_poly};

    fn q(n: i64) -> RingElem {
        RingElem::from_int(RingId::Rational, n)
    }

    #[test]
    fn square_integral_and_witness() {
        let r = RingId::Rational;
        let g = PolyMap::scalar(Poly::var(r, 1, 0).pow(2));
        let i0 = integral_op_poly(&g, 0).unwrap();
        // ∫₀¹ (x + su)² ds = x² + xu + u²/3
        assert_eq!(
            i0.eval(&[q(0), q(1)]).unwrap(),
            vec![RingElem::rational(1, 3)]
        );
        let (lhs, rhs) = lemma50_exact(&g, 0).unwrap();
        assert!(poly_equal(&lhs, &rhs).unwrap());
        let ones = vec![q(1); 4];
        assert_eq!(lhs.eval(&ones).unwrap(), vec![RingElem::rational(14, 3)]);
        // 2xy + uy + xv + (2/3)uv termwise at (1, 2, 3, 5).
        let p = [q(1), q(2), q(3), q(5)];
        let expect = RingElem::rational(6 * 3 + 6 * 3 + 5 * 3 + 2 * 10, 3);
        assert_eq!(lhs.eval(&p).unwrap(), vec![expect]);
    }

    #[test]
    fn formula_holds_for_random_polynomials() {
        let mut rng = crate::seed::rng(11, "riemann/exact");
        for k in 0..3 {
            for n in 1..=2 {
                let g = PolyMap::scalar(random_poly(RingId::Rational, n, 4, 5, &mut rng));
                let (lhs, rhs) = lemma50_exact(&g, k).unwrap();
                assert!(poly_equal(&lhs, &rhs).unwrap(), "k={k}: {}", g.to_text());
            }
        }
    }

    #[test]
    fn small_prime_fields_can_lack_the_weights() {
        let r = RingId::PrimeField(3);
        let g = PolyMap::scalar(Poly::var(r, 1, 0).pow(2));
        assert!(integral_op_poly(&g, 0).is_err());
    }
}
