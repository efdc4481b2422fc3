//! Text expressions over the variables `x1..x9`.
//!
//! Pure polynomial text becomes an exact [`PolyMap`] over the rationals;
//! anything using `sin`, `cos`, `exp`, `log` or non-integer powers becomes a
//! [`SmoothFn`] that also evaluates over dual numbers.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

use crate::numdiff::{ScalarMap, SmoothFn};
use crate::rings::{RingElem, RingId, Scalar};
use crate::symcalc::{Poly, PolyMap};

/// Largest integer exponent expanded symbolically.
const MAX_POLY_EXPONENT: u32 = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExprError {
    /// `position` is a 1-based byte offset; one past the end means the
    /// text stopped early.
    #[error("syntax error at position {position}: {message}")]
    SyntaxError { position: usize, message: String },
    #[error("unknown function '{name}' at position {position}")]
    UnknownFunction { name: String, position: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Log,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Log => "log",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(BigRational),
    /// Zero-based variable index.
    Var(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(q) if q.is_integer() => write!(f, "{}", q.numer()),
            Expr::Num(q) => write!(f, "({}/{})", q.numer(), q.denom()),
            Expr::Var(i) => write!(f, "x{}", i + 1),
            Expr::Neg(a) => write!(f, "(-{a})"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "{a}*{b}"),
            Expr::Div(a, b) => write!(f, "{a}/{b}"),
            Expr::Pow(a, b) => write!(f, "{a}^{b}"),
            Expr::Call(g, a) => write!(f, "{}({a})", g.name()),
        }
    }
}

impl Expr {
    /// Highest variable index plus one.
    fn arity(&self) -> usize {
        match self {
            Expr::Num(_) => 0,
            Expr::Var(i) => i + 1,
            Expr::Neg(a) | Expr::Call(_, a) => a.arity(),
            Expr::Add(a, b)
            | Expr::Sub(a, b)
            | Expr::Mul(a, b)
            | Expr::Div(a, b)
            | Expr::Pow(a, b) => a.arity().max(b.arity()),
        }
    }

    /// Exact value when the expression is constant and rational.
    fn constant(&self) -> Option<BigRational> {
        match self {
            Expr::Num(q) => Some(q.clone()),
            Expr::Var(_) | Expr::Call(..) => None,
            Expr::Neg(a) => a.constant().map(|q| -q),
            Expr::Add(a, b) => Some(a.constant()? + b.constant()?),
            Expr::Sub(a, b) => Some(a.constant()? - b.constant()?),
            Expr::Mul(a, b) => Some(a.constant()? * b.constant()?),
            Expr::Div(a, b) => {
                let d = b.constant()?;
                if d.is_zero() {
                    None
                } else {
                    Some(a.constant()? / d)
                }
            }
            Expr::Pow(a, b) => {
                let e = small_exponent(&b.constant()?)?;
                Some(num_traits::pow(a.constant()?, e as usize))
            }
        }
    }

    fn to_poly(&self, n: usize) -> Option<Poly> {
        let r = RingId::Rational;
        Some(match self {
            Expr::Num(q) => Poly::constant(r, n, RingElem::from_rational(r, q).ok()?),
            Expr::Var(i) => Poly::var(r, n, *i),
            Expr::Neg(a) => a.to_poly(n)?.neg(),
            Expr::Add(a, b) => a.to_poly(n)?.add(&b.to_poly(n)?),
            Expr::Sub(a, b) => a.to_poly(n)?.sub(&b.to_poly(n)?),
            Expr::Mul(a, b) => a.to_poly(n)?.mul(&b.to_poly(n)?),
            Expr::Div(a, b) => {
                let d = b.constant()?;
                if d.is_zero() {
                    return None;
                }
                a.to_poly(n)?
                    .scale(&RingElem::from_rational(r, &d.recip()).ok()?)
            }
            Expr::Pow(a, b) => a.to_poly(n)?.pow(small_exponent(&b.constant()?)?),
            Expr::Call(..) => return None,
        })
    }

    pub fn eval<S: Scalar>(&self, x: &[S]) -> S {
        match self {
            Expr::Num(q) => S::from_f64(q.to_f64().unwrap_or(f64::NAN)),
            Expr::Var(i) => x[*i],
            Expr::Neg(a) => -a.eval(x),
            Expr::Add(a, b) => a.eval(x) + b.eval(x),
            Expr::Sub(a, b) => a.eval(x) - b.eval(x),
            Expr::Mul(a, b) => a.eval(x) * b.eval(x),
            Expr::Div(a, b) => a.eval(x) / b.eval(x),
            Expr::Pow(a, b) => match b.constant().and_then(|q| integer_exponent(&q)) {
                Some(k) => a.eval(x).powi(k),
                None => a.eval(x).powf(b.eval(x)),
            },
            Expr::Call(g, a) => {
                let v = a.eval(x);
                match g {
                    Func::Sin => v.sin(),
                    Func::Cos => v.cos(),
                    Func::Exp => v.exp(),
                    Func::Log => v.ln(),
                }
            }
        }
    }
}

fn integer_exponent(q: &BigRational) -> Option<i32> {
    if q.is_integer() {
        q.to_integer().to_i32()
    } else {
        None
    }
}

fn small_exponent(q: &BigRational) -> Option<u32> {
    let k = integer_exponent(q)?;
    u32::try_from(k).ok().filter(|k| *k <= MAX_POLY_EXPONENT)
}

/// Components of a parsed expression as a [`ScalarMap`].
#[derive(Debug, Clone)]
pub struct ExprMap {
    arity: usize,
    comps: Arc<Vec<Expr>>,
}

impl ScalarMap for ExprMap {
    fn arity_in(&self) -> usize {
        self.arity
    }
    fn arity_out(&self) -> usize {
        self.comps.len()
    }
    fn apply<S: Scalar>(&self, x: &[S]) -> Vec<S> {
        self.comps.iter().map(|e| e.eval(x)).collect()
    }
}

/// Result of [`parse_expr`].
#[derive(Debug, Clone)]
pub enum Parsed {
    Poly(PolyMap),
    Smooth(ExprMap),
}

impl Parsed {
    pub fn arity_in(&self) -> usize {
        match self {
            Parsed::Poly(p) => p.arity_in(),
            Parsed::Smooth(m) => m.arity,
        }
    }

    pub fn arity_out(&self) -> usize {
        match self {
            Parsed::Poly(p) => p.arity_out(),
            Parsed::Smooth(m) => m.comps.len(),
        }
    }

    pub fn as_poly(&self) -> Option<&PolyMap> {
        match self {
            Parsed::Poly(p) => Some(p),
            Parsed::Smooth(_) => None,
        }
    }

    pub fn to_smooth(&self) -> SmoothFn {
        match self {
            Parsed::Poly(p) => SmoothFn::from_poly(p),
            Parsed::Smooth(m) => {
                let label: Vec<String> = m.comps.iter().map(|e| e.to_string()).collect();
                SmoothFn::from_map(m.clone()).with_label(&label.join(", "))
            }
        }
    }
}

/// Parses comma-separated components. Arity is the highest variable index
/// (at least 1).
pub fn parse_expr(text: &str) -> Result<Parsed, ExprError> {
    parse_expr_arity(text, 1)
}

/// [`parse_expr`] with the arity raised to at least `min_arity`.
pub fn parse_expr_arity(text: &str, min_arity: usize) -> Result<Parsed, ExprError> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    let mut comps = vec![p.expr()?];
    loop {
        p.skip_ws();
        match p.peek() {
            None => break,
            Some(b',') => {
                p.pos += 1;
                comps.push(p.expr()?);
            }
            Some(_) => return Err(p.error("unexpected character")),
        }
    }
    let arity = comps
        .iter()
        .map(Expr::arity)
        .max()
        .unwrap_or(0)
        .max(min_arity);
    let polys: Option<Vec<Poly>> = comps.iter().map(|e| e.to_poly(arity)).collect();
    Ok(match polys {
        Some(ps) => Parsed::Poly(PolyMap::new(RingId::Rational, arity, ps).expect("arity matches")),
        None => Parsed::Smooth(ExprMap {
            arity,
            comps: Arc::new(comps),
        }),
    })
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(|c| c.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn error(&self, message: &str) -> ExprError {
        ExprError::SyntaxError {
            position: self.pos + 1,
            message: message.to_string(),
        }
    }

    fn eat(&mut self, c: u8) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat(b'+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat(b'-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat(b'*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat(b'/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        if self.eat(b'-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        if self.eat(b'+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ExprError> {
        let base = self.atom()?;
        if self.eat(b'^') {
            return Ok(Expr::Pow(Box::new(base), Box::new(self.unary()?)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ExprError> {
        self.skip_ws();
        let start = self.pos;
        match self.peek() {
            None => Err(self.error("expected a number, variable or '('")),
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.error("expected ')'"));
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => {
                while self.peek().is_some_and(|c| c.is_ascii_alphanumeric()) {
                    self.pos += 1;
                }
                let word = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or("");
                let var = word.strip_prefix('x').and_then(|d| d.parse::<usize>().ok());
                if let Some(i) = var {
                    if (1..=9).contains(&i) && word.len() == 2 {
                        return Ok(Expr::Var(i - 1));
                    }
                    self.pos = start;
                    return Err(self.error("variables are x1 to x9"));
                }
                let func = match word {
                    "sin" => Func::Sin,
                    "cos" => Func::Cos,
                    "exp" => Func::Exp,
                    "log" => Func::Log,
                    _ => {
                        return Err(ExprError::UnknownFunction {
                            name: word.to_string(),
                            position: start + 1,
                        })
                    }
                };
                if !self.eat(b'(') {
                    return Err(self.error("expected '(' after function name"));
                }
                let arg = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.error("expected ')'"));
                }
                Ok(Expr::Call(func, Box::new(arg)))
            }
            Some(_) => Err(self.error("unexpected character")),
        }
    }

    fn number(&mut self) -> Result<Expr, ExprError> {
        let start = self.pos;
        let digits = |p: &mut Self| {
            let s = p.pos;
            while p.peek().is_some_and(|c| c.is_ascii_digit()) {
                p.pos += 1;
            }
            p.pos - s
        };
        let int_len = digits(self);
        let int_part = &self.src[start..start + int_len];
        let mut frac: &[u8] = &[];
        if self.peek() == Some(b'.') {
            self.pos += 1;
            let fs = self.pos;
            let n = digits(self);
            frac = &self.src[fs..fs + n];
        }
        if int_part.is_empty() && frac.is_empty() {
            self.pos = start;
            return Err(self.error("malformed number"));
        }
        let text: String = int_part.iter().chain(frac).map(|&c| c as char).collect();
        let num: BigInt = text.parse().unwrap_or_else(|_| BigInt::zero());
        let den = num_traits::pow(BigInt::from(10), frac.len());
        Ok(Expr::Num(BigRational::new(num, den)))
    }
}

/// An exact rational written in the expression grammar, such as `-3/4`
/// or `0.125`.
pub fn parse_constant(text: &str) -> Result<BigRational, ExprError> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    let e = p.expr()?;
    p.skip_ws();
    if p.peek().is_some() {
        return Err(p.error("unexpected character"));
    }
    e.constant().ok_or(ExprError::SyntaxError {
        position: 1,
        message: "expected a constant".into(),
    })
}

/// Re-emits a polynomial map in the grammar accepted by [`parse_expr`].
pub fn poly_to_text(p: &PolyMap) -> String {
    p.to_text()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symcalc::{poly_equal, random_poly};
    use proptest::prelude::*;

    #[test]
    fn sample_inputs() {
        let p = parse_expr("x1^2 + 2*x1*x2").unwrap();
        assert_eq!(p.arity_in(), 2);
        assert!(p.as_poly().is_some());
        let s = parse_expr("sin(x1)").unwrap();
        assert!(s.as_poly().is_none());
        assert_eq!(s.arity_in(), 1);
        assert_eq!(
            parse_expr("x1/").unwrap_err(),
            ExprError::SyntaxError {
                position: 4,
                message: "expected a number, variable or '('".into()
            }
        );
    }

    #[test]
    fn numbers_are_exact() {
        let p = parse_expr("0.25*x1 + 3/4").unwrap();
        let v = p
            .as_poly()
            .unwrap()
            .eval(&[RingElem::from_int(RingId::Rational, 1)])
            .unwrap();
        assert_eq!(v, vec![RingElem::rational(1, 1)]);
    }

    #[test]
    fn precedence_and_unary_minus() {
        let f = parse_expr("-x1^2 + 2*3^2").unwrap().to_smooth();
        assert_eq!(f.raw(&[3.0]), vec![9.0]);
        let g = parse_expr("2^-1*x1").unwrap();
        assert!(g.as_poly().is_none());
        assert_eq!(g.to_smooth().raw(&[4.0]), vec![2.0]);
        let h = parse_expr("(x1 - x2)/(1 + x1^2), exp(x2)").unwrap();
        assert_eq!(h.arity_out(), 2);
        assert_eq!(h.to_smooth().raw(&[1.0, 0.0]), vec![0.5, 1.0]);
    }

    #[test]
    fn division_by_variables_is_not_polynomial() {
        assert!(parse_expr("1/x1").unwrap().as_poly().is_none());
        assert!(parse_expr("x1/(2-2)").unwrap().as_poly().is_none());
        assert!(parse_expr("x1^0.5").unwrap().as_poly().is_none());
    }

    #[test]
    fn errors_carry_positions() {
        assert_eq!(
            parse_expr("tan(x1)").unwrap_err(),
            ExprError::UnknownFunction {
                name: "tan".into(),
                position: 1
            }
        );
        assert!(matches!(
            parse_expr("x1 + x0"),
            Err(ExprError::SyntaxError { position: 6, .. })
        ));
        assert!(matches!(
            parse_expr("(x1"),
            Err(ExprError::SyntaxError { position: 4, .. })
        ));
        assert!(matches!(
            parse_expr("x1 $"),
            Err(ExprError::SyntaxError { position: 4, .. })
        ));
        assert!(matches!(
            parse_expr(""),
            Err(ExprError::SyntaxError { position: 1, .. })
        ));
    }

    #[test]
    fn constants() {
        assert_eq!(
            parse_constant(" -3/4 ").unwrap(),
            BigRational::new((-3).into(), 4.into())
        );
        assert_eq!(
            parse_constant("0.125").unwrap(),
            BigRational::new(1.into(), 8.into())
        );
        assert!(parse_constant("x1").is_err());
        assert!(parse_constant("1/0").is_err());
    }

    #[test]
    fn dual_evaluation_is_available() {
        let f = parse_expr("sin(exp(x1))").unwrap().to_smooth();
        let d = f.dual_derivative(&[0.0], &[1.0]).unwrap();
        assert!((d[0] - 1f64.cos()).abs() < 1e-15);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn polynomial_text_round_trips(seed in 0u64..10_000, n in 1usize..=3) {
            let mut rng = crate::seed::rng(seed, "expr/roundtrip");
            let p = PolyMap::scalar(random_poly(RingId::Rational, n, 5, 6, &mut rng));
            let text = poly_to_text(&p);
            let back = parse_expr_arity(&text, n).unwrap();
            prop_assert!(poly_equal(&p, back.as_poly().unwrap()).unwrap(), "{}", text);
        }
    }
}
