//! Exact polynomial maps and their difference quotients.
//!
//! A [`PolyMap`] `f : Kⁿ → Kᵐ` has the first order difference quotient map
//! `f^[1](x, u, t)`, the unique polynomial with
//! `t · f^[1](x, u, t) = f(x + tu) − f(x)`. Nesting doubles the argument
//! tuple and appends one more parameter; the flattening order is always
//! *base tuple, direction tuple, parameter*, so `f^[k]` has
//! `2ᵏ(n + 1) − 1` variables and `f^[k+1] = (f^[k])^[1] = (f^[1])^[k]`
//! with no reindexing beyond that convention.

mod difq;
mod poly;
mod suite;

use thiserror::Error;

use crate::rings::{RingElem, RingError, RingId, Scalar};

pub use difq::{
    formal_var, nested_arity, random_coeff, random_poly, shifted_difference, sym_difq1,
    sym_difq1_capped, sym_difq_k, sym_difq_k_capped, times_last_var, DEFAULT_MONOMIAL_CAP,
};
pub use poly::{Monomial, Poly};
pub use suite::exact_division_suite;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SymError {
    #[error("ring mismatch: expected {expected}, got {got}")]
    RingMismatch { expected: RingId, got: RingId },
    #[error("arity mismatch: expected {expected}, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("monomial count {count} exceeds cap {cap}")]
    SizeLimit { count: usize, cap: usize },
    #[error(transparent)]
    Ring(#[from] RingError),
}

/// Polynomial map `Kⁿ → Kᵐ`, one [`Poly`] per output component.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyMap {
    ring: RingId,
    arity_in: usize,
    names: Vec<String>,
    components: Vec<Poly>,
}

pub fn default_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("x{i}")).collect()
}

impl PolyMap {
    pub fn new(ring: RingId, arity_in: usize, components: Vec<Poly>) -> Result<Self, SymError> {
        for p in &components {
            if p.ring() != ring {
                return Err(SymError::RingMismatch {
                    expected: ring,
                    got: p.ring(),
                });
            }
            if p.nvars() != arity_in {
                return Err(SymError::ArityMismatch {
                    expected: arity_in,
                    got: p.nvars(),
                });
            }
        }
        Ok(PolyMap {
            ring,
            arity_in,
            names: default_names(arity_in),
            components,
        })
    }

    pub fn scalar(p: Poly) -> Self {
        let ring = p.ring();
        let n = p.nvars();
        PolyMap::new(ring, n, vec![p]).expect("single component is consistent")
    }

    pub fn identity(ring: RingId, n: usize) -> Self {
        let comps = (0..n).map(|i| Poly::var(ring, n, i)).collect();
        PolyMap::new(ring, n, comps).expect("identity is consistent")
    }

    pub fn constant(ring: RingId, n: usize, values: &[RingElem]) -> Result<Self, SymError> {
        let comps = values
            .iter()
            .map(|v| {
                if v.ring() != ring {
                    Err(SymError::RingMismatch {
                        expected: ring,
                        got: v.ring(),
                    })
                } else {
                    Ok(Poly::constant(ring, n, v.clone()))
                }
            })
            .collect::<Result<_, _>>()?;
        PolyMap::new(ring, n, comps)
    }

    /// The projection `Kⁿ → Kᵏ` onto the listed coordinates.
    pub fn projection(ring: RingId, n: usize, coords: &[usize]) -> Self {
        let comps = coords.iter().map(|&i| Poly::var(ring, n, i)).collect();
        PolyMap::new(ring, n, comps).expect("projection is consistent")
    }

    pub fn ring(&self) -> RingId {
        self.ring
    }

    pub fn arity_in(&self) -> usize {
        self.arity_in
    }

    pub fn arity_out(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[Poly] {
        &self.components
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn monomial_count(&self) -> usize {
        self.components.iter().map(Poly::len).sum()
    }

    pub fn degree(&self) -> u32 {
        self.components.iter().map(Poly::degree).max().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(Poly::is_zero)
    }

    pub(crate) fn with_names(mut self, names: Vec<String>) -> Self {
        debug_assert_eq!(names.len(), self.arity_in);
        self.names = names;
        self
    }

    pub fn eval(&self, point: &[RingElem]) -> Result<Vec<RingElem>, SymError> {
        if point.len() != self.arity_in {
            return Err(SymError::ArityMismatch {
                expected: self.arity_in,
                got: point.len(),
            });
        }
        if let Some(bad) = point.iter().find(|p| p.ring() != self.ring) {
            return Err(SymError::RingMismatch {
                expected: self.ring,
                got: bad.ring(),
            });
        }
        Ok(self.components.iter().map(|p| p.eval(point)).collect())
    }

    pub fn eval_scalar<S: Scalar>(&self, point: &[S]) -> Vec<S> {
        self.components
            .iter()
            .map(|p| p.eval_scalar(point))
            .collect()
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &PolyMap) -> Result<PolyMap, SymError> {
        self.same_ring(inner)?;
        if inner.arity_out() != self.arity_in {
            return Err(SymError::ArityMismatch {
                expected: self.arity_in,
                got: inner.arity_out(),
            });
        }
        let comps = self
            .components
            .iter()
            .map(|p| p.compose(&inner.components))
            .collect();
        Ok(PolyMap {
            ring: self.ring,
            arity_in: inner.arity_in,
            names: inner.names.clone(),
            components: comps,
        })
    }

    /// The pairing `[f, g] : x ↦ (f(x), g(x))`.
    pub fn pair(&self, other: &PolyMap) -> Result<PolyMap, SymError> {
        self.same_ring(other)?;
        if other.arity_in != self.arity_in {
            return Err(SymError::ArityMismatch {
                expected: self.arity_in,
                got: other.arity_in,
            });
        }
        let mut comps = self.components.clone();
        comps.extend(other.components.iter().cloned());
        Ok(PolyMap {
            components: comps,
            ..self.clone()
        })
    }

    pub fn add(&self, other: &PolyMap) -> Result<PolyMap, SymError> {
        self.same_shape(other)?;
        let comps = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.add(b))
            .collect();
        Ok(PolyMap {
            components: comps,
            ..self.clone()
        })
    }

    pub fn to_text(&self) -> String {
        let parts: Vec<String> = self
            .components
            .iter()
            .map(|p| p.to_text(&self.names))
            .collect();
        parts.join(", ")
    }

    fn same_ring(&self, other: &PolyMap) -> Result<(), SymError> {
        if self.ring != other.ring {
            return Err(SymError::RingMismatch {
                expected: self.ring,
                got: other.ring,
            });
        }
        Ok(())
    }

    fn same_shape(&self, other: &PolyMap) -> Result<(), SymError> {
        self.same_ring(other)?;
        if self.arity_in != other.arity_in {
            return Err(SymError::ArityMismatch {
                expected: self.arity_in,
                got: other.arity_in,
            });
        }
        if self.arity_out() != other.arity_out() {
            return Err(SymError::ArityMismatch {
                expected: self.arity_out(),
                got: other.arity_out(),
            });
        }
        Ok(())
    }
}

/// Polynomial identity (canonical term lists compared), not functional
/// equality: over `F_p`, `x^p` and `x` differ.
pub fn poly_equal(f: &PolyMap, g: &PolyMap) -> Result<bool, SymError> {
    f.same_ring(g)?;
    if f.arity_in != g.arity_in {
        return Err(SymError::ArityMismatch {
            expected: f.arity_in,
            got: g.arity_in,
        });
    }
    Ok(f.components == g.components)
}
