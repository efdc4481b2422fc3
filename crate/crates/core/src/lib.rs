//! Workbench for difference-quotient calculus.
//!
//! The crate computes first and higher order difference quotients
//! `t⁻¹(f(x + tu) − f(x))` in two regimes:
//!
//! * exactly, for polynomial maps over commutative rings ([`symcalc`]),
//!   where the quotient is again a polynomial in `(x, u, t)`;
//! * numerically, for black-box smooth maps ([`numdiff`]) and for
//!   grid-discretized function spaces ([`funcgrid`]), where the `t → 0`
//!   limit is estimated by Richardson extrapolation.
//!
//! Around these sit Riemann integration of vector curves ([`riemann`]), a
//! non-injective operator built from a superposition ([`sharplab`]), property checks of the function-class axioms
//! ([`axioms`]) and a batch front end ([`cli`]).

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod axioms;
pub mod cli;
pub mod expr;
pub mod funcgrid;
pub mod numdiff;
pub mod report;
pub mod riemann;
pub mod rings;
pub mod seed;
pub mod sharplab;
pub mod symcalc;

pub use report::{Check, Status, VerificationReport, Witness};
pub use rings::{Dual, RingElem, RingError, RingId};
pub use symcalc::{PolyMap, SymError};
