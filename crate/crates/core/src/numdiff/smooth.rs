use std::fmt;
use std::sync::Arc;

use super::NumError;
use crate::rings::{Dual, Scalar};
use crate::symcalc::PolyMap;

type Eval = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;
type DualEval = Arc<dyn Fn(&[Dual]) -> Vec<Dual> + Send + Sync>;

/// A map that can be evaluated over any numeric [`Scalar`]; gives a
/// [`SmoothFn`] with a forward-mode derivative for free.
pub trait ScalarMap: Send + Sync + 'static {
    fn arity_in(&self) -> usize;
    fn arity_out(&self) -> usize;
    fn apply<S: Scalar>(&self, x: &[S]) -> Vec<S>;
}

impl ScalarMap for PolyMap {
    fn arity_in(&self) -> usize {
        PolyMap::arity_in(self)
    }
    fn arity_out(&self) -> usize {
        PolyMap::arity_out(self)
    }
    fn apply<S: Scalar>(&self, x: &[S]) -> Vec<S> {
        self.eval_scalar(x)
    }
}

/// Black-box numeric map `ℝⁿ → ℝᵐ` with an optional closed domain box.
#[derive(Clone)]
pub struct SmoothFn {
    arity_in: usize,
    arity_out: usize,
    eval: Eval,
    dual: Option<DualEval>,
    domain: Option<Vec<(f64, f64)>>,
    label: String,
}

impl fmt::Debug for SmoothFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SmoothFn")
            .field("label", &self.label)
            .field("arity_in", &self.arity_in)
            .field("arity_out", &self.arity_out)
            .field("domain", &self.domain)
            .finish()
    }
}

impl SmoothFn {
    pub fn new(
        arity_in: usize,
        arity_out: usize,
        f: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    ) -> Self {
        SmoothFn {
            arity_in,
            arity_out,
            eval: Arc::new(f),
            dual: None,
            domain: None,
            label: String::from("f"),
        }
    }

    /// Scalar function of one variable.
    pub fn unary(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        SmoothFn::new(1, 1, move |x| vec![f(x[0])])
    }

    pub fn from_map<M: ScalarMap>(m: M) -> Self {
        let m = Arc::new(m);
        let (n, k) = (m.arity_in(), m.arity_out());
        let md = Arc::clone(&m);
        SmoothFn {
            arity_in: n,
            arity_out: k,
            eval: Arc::new(move |x| m.apply(x)),
            dual: Some(Arc::new(move |x| md.apply(x))),
            domain: None,
            label: String::from("f"),
        }
    }

    pub fn from_poly(p: &PolyMap) -> Self {
        let label = p.to_text();
        SmoothFn::from_map(p.clone()).with_label(&label)
    }

    /// The linear map `x ↦ A x` for a row-major `rows × cols` matrix.
    pub fn linear(rows: usize, cols: usize, a: Vec<f64>) -> Self {
        assert_eq!(a.len(), rows * cols);
        let ad = a.clone();
        SmoothFn::new(cols, rows, move |x| {
            (0..rows)
                .map(|i| (0..cols).map(|j| a[i * cols + j] * x[j]).sum())
                .collect()
        })
        .with_dual(move |x| {
            (0..rows)
                .map(|i| {
                    (0..cols).fold(Dual::constant(0.0), |s, j| {
                        s + Dual::constant(ad[i * cols + j]) * x[j]
                    })
                })
                .collect()
        })
        .with_label("linear")
    }

    pub fn constant(arity_in: usize, c: Vec<f64>) -> Self {
        let m = c.len();
        let cd = c.clone();
        SmoothFn::new(arity_in, m, move |_| c.clone())
            .with_dual(move |_| cd.iter().map(|&v| Dual::constant(v)).collect())
            .with_label("constant")
    }

    pub fn with_dual(mut self, f: impl Fn(&[Dual]) -> Vec<Dual> + Send + Sync + 'static) -> Self {
        self.dual = Some(Arc::new(f));
        self
    }

    pub fn with_domain(mut self, domain: Vec<(f64, f64)>) -> Self {
        assert_eq!(domain.len(), self.arity_in, "one interval per input");
        self.domain = Some(domain);
        self
    }

    pub fn with_label(mut self, label: &str) -> Self {
        self.label = label.to_string();
        self
    }

    pub fn arity_in(&self) -> usize {
        self.arity_in
    }

    pub fn arity_out(&self) -> usize {
        self.arity_out
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn domain(&self) -> Option<&[(f64, f64)]> {
        self.domain.as_deref()
    }

    pub fn has_dual(&self) -> bool {
        self.dual.is_some()
    }

    pub fn in_domain(&self, x: &[f64]) -> bool {
        match &self.domain {
            None => true,
            Some(b) => x.iter().zip(b).all(|(v, (lo, hi))| *lo <= *v && *v <= *hi),
        }
    }

    /// Unchecked evaluation.
    pub fn raw(&self, x: &[f64]) -> Vec<f64> {
        (self.eval)(x)
    }

    /// Evaluation with arity, domain and finiteness checks.
    pub fn call(&self, x: &[f64]) -> Result<Vec<f64>, NumError> {
        if x.len() != self.arity_in {
            return Err(NumError::ArityMismatch {
                expected: self.arity_in,
                got: x.len(),
            });
        }
        if !self.in_domain(x) {
            return Err(NumError::DomainError { point: x.to_vec() });
        }
        let y = (self.eval)(x);
        debug_assert_eq!(y.len(), self.arity_out);
        if y.iter().all(|v| v.is_finite()) {
            Ok(y)
        } else {
            Err(NumError::NonFinite { point: x.to_vec() })
        }
    }

    /// Forward-mode derivative along `u`, if a dual evaluator is known.
    pub fn dual_derivative(&self, x: &[f64], u: &[f64]) -> Option<Vec<f64>> {
        let d = self.dual.as_ref()?;
        let xs: Vec<Dual> = x.iter().zip(u).map(|(&a, &b)| Dual::new(a, b)).collect();
        Some(d(&xs).into_iter().map(|v| v.eps).collect())
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &SmoothFn) -> SmoothFn {
        assert_eq!(inner.arity_out, self.arity_in, "composition arity");
        let (g, f) = (self.clone(), inner.clone());
        let dual = match (&self.dual, &inner.dual) {
            (Some(gd), Some(fd)) => {
                let (gd, fd) = (Arc::clone(gd), Arc::clone(fd));
                Some(Arc::new(move |x: &[Dual]| gd(&fd(x))) as DualEval)
            }
            _ => None,
        };
        SmoothFn {
            arity_in: inner.arity_in,
            arity_out: self.arity_out,
            eval: Arc::new(move |x| g.raw(&f.raw(x))),
            dual,
            domain: inner.domain.clone(),
            label: format!("{}∘{}", self.label, inner.label),
        }
    }

    /// The pairing `[f, g] : x ↦ (f(x), g(x))`.
    pub fn pair(&self, other: &SmoothFn) -> SmoothFn {
        assert_eq!(self.arity_in, other.arity_in, "pairing arity");
        let (f, g) = (self.clone(), other.clone());
        let dual = match (&self.dual, &other.dual) {
            (Some(fd), Some(gd)) => {
                let (fd, gd) = (Arc::clone(fd), Arc::clone(gd));
                Some(Arc::new(move |x: &[Dual]| {
                    let mut y = fd(x);
                    y.extend(gd(x));
                    y
                }) as DualEval)
            }
            _ => None,
        };
        let domain = match (&self.domain, &other.domain) {
            (Some(a), Some(b)) => Some(
                a.iter()
                    .zip(b)
                    .map(|(p, q)| (p.0.max(q.0), p.1.min(q.1)))
                    .collect(),
            ),
            (Some(a), None) | (None, Some(a)) => Some(a.clone()),
            (None, None) => None,
        };
        SmoothFn {
            arity_in: self.arity_in,
            arity_out: self.arity_out + other.arity_out,
            eval: Arc::new(move |x| {
                let mut y = f.raw(x);
                y.extend(g.raw(x));
                y
            }),
            dual,
            domain,
            label: format!("[{}, {}]", self.label, other.label),
        }
    }

    /// The product map `f × g : (x, y) ↦ (f(x), g(y))`.
    pub fn product(&self, other: &SmoothFn) -> SmoothFn {
        let n = self.arity_in;
        let (f, g) = (self.clone(), other.clone());
        let dual = match (&self.dual, &other.dual) {
            (Some(fd), Some(gd)) => {
                let (fd, gd) = (Arc::clone(fd), Arc::clone(gd));
                Some(Arc::new(move |x: &[Dual]| {
                    let mut y = fd(&x[..n]);
                    y.extend(gd(&x[n..]));
                    y
                }) as DualEval)
            }
            _ => None,
        };
        let domain = match (&self.domain, &other.domain) {
            (None, None) => None,
            (a, b) => {
                let full = |d: &Option<Vec<(f64, f64)>>, k: usize| {
                    d.clone()
                        .unwrap_or_else(|| vec![(f64::NEG_INFINITY, f64::INFINITY); k])
                };
                let mut d = full(a, self.arity_in);
                d.extend(full(b, other.arity_in));
                Some(d)
            }
        };
        SmoothFn {
            arity_in: self.arity_in + other.arity_in,
            arity_out: self.arity_out + other.arity_out,
            eval: Arc::new(move |x| {
                let mut y = f.raw(&x[..n]);
                y.extend(g.raw(&x[n..]));
                y
            }),
            dual,
            domain,
            label: format!("{}×{}", self.label, other.label),
        }
    }
}
