use rand::Rng;

use super::{poly_equal, random_poly, shifted_difference, sym_difq1, times_last_var, PolyMap};
use crate::report::{Check, VerificationReport, Witness};
use crate::rings::RingId;

/// `t·f^[1] = f(x + tu) − f(x)` as a polynomial identity on seeded maps of
/// degree ≤ 6 in at most 3 variables.
pub fn exact_division_suite(ring: RingId, cases: usize, seed: u64) -> VerificationReport {
    let mut rng = crate::seed::rng(seed, &format!("symcalc/division/{ring}"));
    let mut report = VerificationReport::new(&format!("exact division over {ring}"), Some(seed));
    let mut check = Check::new("exact_division");
    for trial in 0..cases {
        let n = rng.random_range(1..=3);
        let f = PolyMap::scalar(random_poly(ring, n, 6, 6, &mut rng));
        let lhs = times_last_var(&sym_difq1(&f));
        let rhs = shifted_difference(&f);
        if poly_equal(&lhs, &rhs).unwrap_or(false) {
            check.pass();
        } else {
            check.fail(Witness::new(trial).with("f", f.to_text()));
        }
    }
    report.push(check);
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_exact_rings() {
        for ring in [RingId::Rational, RingId::PrimeField(7)] {
            let r = exact_division_suite(ring, 50, 2);
            assert!(r.passed(), "{r}");
        }
    }
}
