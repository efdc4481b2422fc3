//! Instance-level checks of the function-class postulates on exact
//! polynomial maps: productive structure, composition, constants and
//! identity, inversion, determination, uniqueness of the first difference
//! quotient map and the recursion rule for higher ones.

mod postulates;
mod productive;
mod props;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use thiserror::Error;

use crate::report::VerificationReport;
use crate::rings::RingId;
use crate::symcalc::{poly_equal, random_poly, PolyMap, SymError};

pub use postulates::check_bgn_postulates;
pub use productive::check_productive;
pub use props::{interpolate, prop10_recursion, prop10_suite, prop9_suite, prop9_uniqueness};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AxiomError {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("ring {0} is not exact")]
    NotExact(RingId),
    #[error("t-degree {degree} needs more than the {nodes} nonzero nodes available")]
    DegreeCapExceeded { degree: u32, nodes: usize },
    #[error("recursion order must be at least 1")]
    InvalidOrder,
    #[error(transparent)]
    Sym(#[from] SymError),
}

/// Operations the class claims to be closed under.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Closure {
    pub compose: bool,
    pub pair: bool,
    pub constant: bool,
    pub identity: bool,
}

impl Default for Closure {
    fn default() -> Self {
        Closure {
            compose: true,
            pair: true,
            constant: true,
            identity: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Members {
    /// Every polynomial map between declared objects.
    AllPolynomial,
    /// Generators and one round of the enabled operations on them.
    Generated(Vec<PolyMap>),
}

/// A class of maps between the spaces `𝕂ⁿ`, `n` in `objects`.
#[derive(Debug, Clone, PartialEq)]
pub struct FnClassInstance {
    ring: RingId,
    objects: Vec<usize>,
    members: Members,
    closure: Closure,
}

/// Degree and term bounds for sampled members.
const MEMBER_DEGREE: u32 = 3;
const MEMBER_TERMS: usize = 4;

impl FnClassInstance {
    /// All polynomial maps between `𝕂¹, …, 𝕂^max_arity`.
    pub fn polynomial(ring: RingId, max_arity: usize) -> Result<Self, AxiomError> {
        if !ring.is_exact() {
            return Err(AxiomError::NotExact(ring));
        }
        if max_arity == 0 {
            return Err(AxiomError::InvalidInstance("no objects".into()));
        }
        Ok(FnClassInstance {
            ring,
            objects: (1..=max_arity).collect(),
            members: Members::AllPolynomial,
            closure: Closure::default(),
        })
    }

    pub fn generated(
        ring: RingId,
        objects: Vec<usize>,
        generators: Vec<PolyMap>,
        closure: Closure,
    ) -> Result<Self, AxiomError> {
        if !ring.is_exact() {
            return Err(AxiomError::NotExact(ring));
        }
        for g in &generators {
            if g.ring() != ring {
                return Err(AxiomError::InvalidInstance(format!(
                    "generator over {} in a class over {ring}",
                    g.ring()
                )));
            }
            if !objects.contains(&g.arity_in()) || !objects.contains(&g.arity_out()) {
                return Err(AxiomError::InvalidInstance(format!(
                    "generator {} -> {} between undeclared objects",
                    g.arity_in(),
                    g.arity_out()
                )));
            }
        }
        let mut objects = objects;
        objects.sort_unstable();
        objects.dedup();
        Ok(FnClassInstance {
            ring,
            objects,
            members: Members::Generated(generators),
            closure,
        })
    }

    pub fn ring(&self) -> RingId {
        self.ring
    }

    pub fn objects(&self) -> &[usize] {
        &self.objects
    }

    pub fn closure(&self) -> Closure {
        self.closure
    }

    /// True for a generated class without generators.
    pub fn is_empty(&self) -> bool {
        matches!(&self.members, Members::Generated(g) if g.is_empty())
    }

    fn base(&self) -> Vec<PolyMap> {
        match &self.members {
            Members::AllPolynomial => Vec::new(),
            Members::Generated(g) => {
                let mut b = g.clone();
                if self.closure.identity {
                    b.extend(
                        self.objects
                            .iter()
                            .map(|&n| PolyMap::identity(self.ring, n)),
                    );
                }
                b
            }
        }
    }

    fn declared(&self, f: &PolyMap) -> bool {
        f.ring() == self.ring
            && self.objects.contains(&f.arity_in())
            && self.objects.contains(&f.arity_out())
    }

    /// Membership; generated classes search one round of closure.
    pub fn contains(&self, f: &PolyMap) -> Result<bool, AxiomError> {
        if !self.declared(f) {
            return Ok(false);
        }
        if self.members == Members::AllPolynomial {
            return Ok(true);
        }
        if self.closure.constant && f.degree() == 0 {
            return Ok(true);
        }
        let base = self.base();
        let same = |g: &PolyMap| -> Result<bool, AxiomError> {
            Ok(g.arity_in() == f.arity_in() && g.arity_out() == f.arity_out() && poly_equal(g, f)?)
        };
        for g in &base {
            if same(g)? {
                return Ok(true);
            }
        }
        for g in &base {
            for h in &base {
                if self.closure.compose && g.arity_in() == h.arity_out() && same(&g.compose(h)?)? {
                    return Ok(true);
                }
                if self.closure.pair && g.arity_in() == h.arity_in() && same(&g.pair(h)?)? {
                    return Ok(true);
                }
            }
        }
        Ok(false)
    }

    /// A seeded member `𝕂ⁿ → 𝕂ᵐ`, or `None` if the class has none.
    pub(crate) fn sample(
        &self,
        rng: &mut ChaCha8Rng,
        arity_in: Option<usize>,
        arity_out: Option<usize>,
    ) -> Result<Option<PolyMap>, AxiomError> {
        let pick = |rng: &mut ChaCha8Rng, want: Option<usize>| {
            want.unwrap_or_else(|| self.objects[rng.random_range(0..self.objects.len())])
        };
        match &self.members {
            Members::AllPolynomial => {
                let n = pick(rng, arity_in);
                let m = pick(rng, arity_out);
                let comps = (0..m)
                    .map(|_| random_poly(self.ring, n, MEMBER_DEGREE, MEMBER_TERMS, rng))
                    .collect();
                Ok(Some(PolyMap::new(self.ring, n, comps)?))
            }
            Members::Generated(_) => {
                let fits: Vec<PolyMap> = self
                    .base()
                    .into_iter()
                    .filter(|g| {
                        arity_in.is_none_or(|n| g.arity_in() == n)
                            && arity_out.is_none_or(|m| g.arity_out() == m)
                    })
                    .collect();
                if fits.is_empty() {
                    return Ok(None);
                }
                Ok(Some(fits[rng.random_range(0..fits.len())].clone()))
            }
        }
    }
}

/// One object per check: `{postulate, status, trials, failures, witness, seed}`.
pub fn postulate_json(report: &VerificationReport) -> Value {
    Value::Array(
        report
            .checks
            .iter()
            .map(|c| {
                json!({
                    "postulate": c.name,
                    "status": c.status,
                    "trials": c.trials,
                    "failures": c.failures,
                    "witness": c.witness,
                    "seed": report.seed,
                    "notes": c.notes,
                })
            })
            .collect(),
    )
}

/// Productive structure, the postulates and both propositions with one
/// seed.
pub fn axiom_suite(
    ring: RingId,
    trials: usize,
    seed: u64,
) -> Result<VerificationReport, AxiomError> {
    let inst = FnClassInstance::polynomial(ring, 3)?;
    let mut report =
        VerificationReport::new(&format!("function class axioms over {ring}"), Some(seed));
    report.merge(check_productive(&inst, trials, seed)?);
    report.merge(check_bgn_postulates(&inst, trials, seed)?);
    report.merge(prop9_suite(ring, trials, seed)?);
    report.merge(prop10_suite(ring, trials, seed)?);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symcalc::Poly;

    #[test]
    fn generator_arities_must_be_declared() {
        let r = RingId::Rational;
        let g = PolyMap::identity(r, 2);
        assert!(matches!(
            FnClassInstance::generated(r, vec![1], vec![g], Closure::default()),
            Err(AxiomError::InvalidInstance(_))
        ));
        assert!(FnClassInstance::polynomial(RingId::Float64, 2).is_err());
    }

    #[test]
    fn membership_in_generated_class() {
        let r = RingId::Rational;
        let sq = PolyMap::scalar(Poly::var(r, 1, 0).pow(2));
        let inst = FnClassInstance::generated(r, vec![1, 2], vec![sq.clone()], Closure::default())
            .unwrap();
        assert!(inst.contains(&sq).unwrap());
        assert!(inst.contains(&sq.compose(&sq).unwrap()).unwrap());
        assert!(inst.contains(&sq.pair(&sq).unwrap()).unwrap());
        let cube = PolyMap::scalar(Poly::var(r, 1, 0).pow(3));
        assert!(!inst.contains(&cube).unwrap());
        let off = FnClassInstance::generated(
            r,
            vec![1, 2],
            vec![sq.clone()],
            Closure {
                pair: false,
                ..Closure::default()
            },
        )
        .unwrap();
        assert!(!off.contains(&sq.pair(&sq).unwrap()).unwrap());
    }

    #[test]
    fn suite_json_shape() {
        let rep = axiom_suite(RingId::Rational, 5, 3).unwrap();
        assert!(rep.passed(), "{rep}");
        let v = postulate_json(&rep);
        let first = &v[0];
        for key in ["postulate", "trials", "failures", "witness", "seed"] {
            assert!(first.get(key).is_some(), "{key}");
        }
    }
}
