//! Scalar rings: exact rationals, prime fields, doubles and dual numbers,
//! each with the partial inversion `ι`.

mod dual;
mod suite;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

pub use dual::{Dual, Scalar};
pub use suite::ring_axiom_suite;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RingError {
    #[error("{0} is not invertible")]
    NotInvertible(String),
    #[error("ring mismatch: {left} vs {right}")]
    RingMismatch { left: RingId, right: RingId },
    #[error("invalid modulus {0}: need a prime below 2^31")]
    InvalidModulus(u64),
    #[error("unknown ring id {0:?}")]
    UnknownRing(String),
}

/// Which ring a scalar lives in. Textual forms: `Q`, `Fp:7`, `F64`, `Dual`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RingId {
    Rational,
    PrimeField(u32),
    Float64,
    Dual,
}

const MAX_MODULUS: u64 = 1 << 31;

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl RingId {
    pub fn prime_field(p: u64) -> Result<RingId, RingError> {
        if p >= MAX_MODULUS || !is_prime(p) {
            return Err(RingError::InvalidModulus(p));
        }
        Ok(RingId::PrimeField(p as u32))
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, RingId::Rational | RingId::PrimeField(_))
    }
}

impl fmt::Display for RingId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RingId::Rational => write!(f, "Q"),
            RingId::PrimeField(p) => write!(f, "Fp:{p}"),
            RingId::Float64 => write!(f, "F64"),
            RingId::Dual => write!(f, "Dual"),
        }
    }
}

impl FromStr for RingId {
    type Err = RingError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "Q" => Ok(RingId::Rational),
            "F64" => Ok(RingId::Float64),
            "Dual" => Ok(RingId::Dual),
            _ => {
                let p = s
                    .strip_prefix("Fp:")
                    .and_then(|p| p.parse::<u64>().ok())
                    .ok_or_else(|| RingError::UnknownRing(s.to_string()))?;
                RingId::prime_field(p)
            }
        }
    }
}

/// A scalar tagged with its ring.
///
/// Rationals are kept in lowest terms with positive denominator and
/// prime-field residues in `[0, p)`, so derived equality is ring equality
/// for the exact rings. Mixing rings in an arithmetic operator is a
/// programming error and panics; boundary APIs check ring ids first.
#[derive(Debug, Clone, PartialEq)]
pub enum RingElem {
    Rational(BigRational),
    Prime { residue: u32, modulus: u32 },
    Float(f64),
    Dual(Dual),
}

impl RingElem {
    pub fn ring(&self) -> RingId {
        match self {
            RingElem::Rational(_) => RingId::Rational,
            RingElem::Prime { modulus, .. } => RingId::PrimeField(*modulus),
            RingElem::Float(_) => RingId::Float64,
            RingElem::Dual(_) => RingId::Dual,
        }
    }

    pub fn zero(ring: RingId) -> Self {
        RingElem::from_int(ring, 0)
    }

    pub fn one(ring: RingId) -> Self {
        RingElem::from_int(ring, 1)
    }

    pub fn from_int(ring: RingId, n: i64) -> Self {
        match ring {
            RingId::Rational => RingElem::Rational(BigRational::from_integer(BigInt::from(n))),
            RingId::PrimeField(p) => RingElem::Prime {
                residue: n.rem_euclid(i64::from(p)) as u32,
                modulus: p,
            },
            RingId::Float64 => RingElem::Float(n as f64),
            RingId::Dual => RingElem::Dual(Dual::constant(n as f64)),
        }
    }

    /// Image of `n` under the unique ring map from the integers.
    pub fn from_bigint(ring: RingId, n: &BigInt) -> Self {
        match ring {
            RingId::Rational => RingElem::Rational(BigRational::from_integer(n.clone())),
            RingId::PrimeField(p) => {
                let r = ((n % BigInt::from(p)) + BigInt::from(p)) % BigInt::from(p);
                RingElem::Prime {
                    residue: r.to_u32().expect("residue below modulus"),
                    modulus: p,
                }
            }
            RingId::Float64 => RingElem::Float(n.to_f64().unwrap_or(f64::NAN)),
            RingId::Dual => RingElem::Dual(Dual::constant(n.to_f64().unwrap_or(f64::NAN))),
        }
    }

    /// `num / den` mapped into `ring`; fails when `den` is not a unit there.
    pub fn from_ratio(ring: RingId, num: &BigInt, den: &BigInt) -> Result<Self, RingError> {
        let n = RingElem::from_bigint(ring, num);
        let d = RingElem::from_bigint(ring, den);
        Ok(&n * &d.inv()?)
    }

    pub fn from_rational(ring: RingId, q: &BigRational) -> Result<Self, RingError> {
        match ring {
            RingId::Rational => Ok(RingElem::Rational(q.clone())),
            RingId::Float64 => Ok(RingElem::Float(q.to_f64().unwrap_or(f64::NAN))),
            RingId::Dual => Ok(RingElem::Dual(Dual::constant(
                q.to_f64().unwrap_or(f64::NAN),
            ))),
            RingId::PrimeField(_) => RingElem::from_ratio(ring, q.numer(), q.denom()),
        }
    }

    pub fn rational(num: i64, den: i64) -> Self {
        RingElem::Rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn prime(residue: i64, modulus: u32) -> Self {
        RingElem::from_int(RingId::PrimeField(modulus), residue)
    }

    pub fn is_zero(&self) -> bool {
        match self {
            RingElem::Rational(q) => q.is_zero(),
            RingElem::Prime { residue, .. } => *residue == 0,
            RingElem::Float(v) => *v == 0.0,
            RingElem::Dual(d) => d.re == 0.0 && d.eps == 0.0,
        }
    }

    pub fn is_one(&self) -> bool {
        *self == RingElem::one(self.ring())
    }

    /// The partial inversion `ι`: defined exactly on the units.
    pub fn inv(&self) -> Result<Self, RingError> {
        let not_inv = || RingError::NotInvertible(self.to_string());
        match self {
            RingElem::Rational(q) => {
                if q.is_zero() {
                    Err(not_inv())
                } else {
                    Ok(RingElem::Rational(q.recip()))
                }
            }
            RingElem::Prime { residue, modulus } => {
                if *residue == 0 {
                    return Err(not_inv());
                }
                // Fermat: a^(p-2) is the inverse of a nonzero residue.
                Ok(RingElem::Prime {
                    residue: pow_mod(*residue, *modulus - 2, *modulus),
                    modulus: *modulus,
                })
            }
            RingElem::Float(v) => {
                if *v == 0.0 || !v.is_finite() {
                    Err(not_inv())
                } else {
                    Ok(RingElem::Float(1.0 / v))
                }
            }
            RingElem::Dual(d) => d.checked_recip().map(RingElem::Dual).ok_or_else(not_inv),
        }
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = RingElem::one(self.ring());
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Nearest double; prime-field residues map to their representative.
    pub fn to_f64(&self) -> f64 {
        match self {
            RingElem::Rational(q) => q.to_f64().unwrap_or(f64::NAN),
            RingElem::Prime { residue, .. } => f64::from(*residue),
            RingElem::Float(v) => *v,
            RingElem::Dual(d) => d.re,
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            RingElem::Rational(q) => Some(q),
            _ => None,
        }
    }

    /// Rough magnitude used for float tolerances.
    pub fn magnitude(&self) -> f64 {
        match self {
            RingElem::Dual(d) => d.re.abs().max(d.eps.abs()),
            other => other.to_f64().abs(),
        }
    }

    fn assert_same_ring(&self, other: &Self) {
        assert_eq!(
            self.ring(),
            other.ring(),
            "ring mismatch in scalar arithmetic"
        );
    }
}

fn pow_mod(base: u32, mut e: u32, p: u32) -> u32 {
    let p64 = u64::from(p);
    let mut b = u64::from(base) % p64;
    let mut acc = 1u64;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p64;
        }
        b = b * b % p64;
        e >>= 1;
    }
    acc as u32
}

impl fmt::Display for RingElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RingElem::Rational(q) => write!(f, "{}/{}", q.numer(), q.denom()),
            RingElem::Prime { residue, modulus } => write!(f, "{residue} mod {modulus}"),
            RingElem::Float(v) => write!(f, "{v:?}"),
            RingElem::Dual(d) => write!(f, "{d}"),
        }
    }
}

impl<'a> Add<&'a RingElem> for &'a RingElem {
    type Output = RingElem;
    fn add(self, o: &RingElem) -> RingElem {
        self.assert_same_ring(o);
        match (self, o) {
            (RingElem::Rational(a), RingElem::Rational(b)) => RingElem::Rational(a + b),
            (
                RingElem::Prime {
                    residue: a,
                    modulus,
                },
                RingElem::Prime { residue: b, .. },
            ) => RingElem::Prime {
                residue: ((u64::from(*a) + u64::from(*b)) % u64::from(*modulus)) as u32,
                modulus: *modulus,
            },
            (RingElem::Float(a), RingElem::Float(b)) => RingElem::Float(a + b),
            (RingElem::Dual(a), RingElem::Dual(b)) => RingElem::Dual(*a + *b),
            _ => unreachable!(),
        }
    }
}

impl<'a> Sub<&'a RingElem> for &'a RingElem {
    type Output = RingElem;
    fn sub(self, o: &RingElem) -> RingElem {
        self + &(-o)
    }
}

impl<'a> Mul<&'a RingElem> for &'a RingElem {
    type Output = RingElem;
    fn mul(self, o: &RingElem) -> RingElem {
        self.assert_same_ring(o);
        match (self, o) {
            (RingElem::Rational(a), RingElem::Rational(b)) => RingElem::Rational(a * b),
            (
                RingElem::Prime {
                    residue: a,
                    modulus,
                },
                RingElem::Prime { residue: b, .. },
            ) => RingElem::Prime {
                residue: (u64::from(*a) * u64::from(*b) % u64::from(*modulus)) as u32,
                modulus: *modulus,
            },
            (RingElem::Float(a), RingElem::Float(b)) => RingElem::Float(a * b),
            (RingElem::Dual(a), RingElem::Dual(b)) => RingElem::Dual(*a * *b),
            _ => unreachable!(),
        }
    }
}

impl Neg for &RingElem {
    type Output = RingElem;
    fn neg(self) -> RingElem {
        match self {
            RingElem::Rational(a) => RingElem::Rational(-a),
            RingElem::Prime { residue, modulus } => RingElem::Prime {
                residue: (*modulus - *residue) % *modulus,
                modulus: *modulus,
            },
            RingElem::Float(a) => RingElem::Float(-a),
            RingElem::Dual(a) => RingElem::Dual(-*a),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_of_two_over_rationals() {
        let two = RingElem::from_int(RingId::Rational, 2);
        assert_eq!(two.inv().unwrap(), RingElem::rational(1, 2));
        assert!((&two * &two.inv().unwrap()).is_one());
    }

    #[test]
    fn zero_is_never_a_unit() {
        for ring in [
            RingId::Rational,
            RingId::PrimeField(7),
            RingId::Float64,
            RingId::Dual,
        ] {
            assert!(matches!(
                RingElem::zero(ring).inv(),
                Err(RingError::NotInvertible(_))
            ));
        }
    }

    #[test]
    fn inverse_in_f7() {
        assert_eq!(RingElem::prime(3, 7).inv().unwrap(), RingElem::prime(5, 7));
    }

    #[test]
    fn dual_inverse_formula() {
        let a = RingElem::Dual(Dual::new(4.0, 2.0));
        // a^-1 - a^-2 b eps = 0.25 - 0.125 eps
        assert_eq!(a.inv().unwrap(), RingElem::Dual(Dual::new(0.25, -0.125)));
        let pure_eps = RingElem::Dual(Dual::new(0.0, 1.0));
        assert!(pure_eps.inv().is_err());
    }

    #[test]
    fn rationals_are_normalized() {
        assert_eq!(RingElem::rational(6, -4), RingElem::rational(-3, 2));
        assert_eq!(RingElem::rational(-3, 2).to_string(), "-3/2");
    }

    #[test]
    fn ring_ids_round_trip_text() {
        for s in ["Q", "Fp:7", "F64", "Dual"] {
            assert_eq!(s.parse::<RingId>().unwrap().to_string(), s);
        }
        assert!("Fp:8".parse::<RingId>().is_err());
        assert!("Fp:2147483659".parse::<RingId>().is_err());
        assert!("R".parse::<RingId>().is_err());
    }

    #[test]
    fn prime_field_closure_and_ratio() {
        let r = RingId::PrimeField(5);
        let x = RingElem::from_ratio(r, &BigInt::from(1), &BigInt::from(2)).unwrap();
        assert_eq!(x, RingElem::prime(3, 5));
        assert_eq!((-&RingElem::prime(0, 5)), RingElem::prime(0, 5));
        assert_eq!(RingElem::from_int(r, -7), RingElem::prime(3, 5));
        assert!(RingElem::from_ratio(r, &BigInt::from(1), &BigInt::from(10)).is_err());
    }

    #[test]
    fn large_prime_products_do_not_overflow() {
        let p = 2_147_483_647u32; // 2^31 - 1
        let a = RingElem::prime(i64::from(p) - 1, p);
        assert_eq!(&a * &a, RingElem::prime(1, p));
        assert!((&a * &a.inv().unwrap()).is_one());
    }

    #[test]
    fn pow_matches_repeated_multiplication() {
        let x = RingElem::rational(-2, 3);
        assert_eq!(x.pow(3), RingElem::rational(-8, 27));
        assert!(x.pow(0).is_one());
    }
}
