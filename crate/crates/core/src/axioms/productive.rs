use rand::Rng;

use super::{AxiomError, FnClassInstance};
use crate::report::{Check, VerificationReport, Witness};
use crate::symcalc::{poly_equal, PolyMap};

/// Splits `(n, m)` of declared objects whose product `n + m` is declared.
fn splits(inst: &FnClassInstance) -> Vec<(usize, usize)> {
    let obj = inst.objects();
    let mut out = Vec::new();
    for &n in obj {
        for &m in obj {
            if obj.contains(&(n + m)) {
                out.push((n, m));
            }
        }
    }
    out
}

fn projections(inst: &FnClassInstance, n: usize, m: usize) -> (PolyMap, PolyMap) {
    let r = inst.ring();
    let first: Vec<usize> = (0..n).collect();
    let second: Vec<usize> = (n..n + m).collect();
    (
        PolyMap::projection(r, n + m, &first),
        PolyMap::projection(r, n + m, &second),
    )
}

/// Projections, closure under pairing and uniqueness of the pairing map.
pub fn check_productive(
    inst: &FnClassInstance,
    trials: usize,
    seed: u64,
) -> Result<VerificationReport, AxiomError> {
    let mut rng = crate::seed::rng(seed, "axioms/productive");
    let mut report = VerificationReport::new("productive class", Some(seed));
    let mut proj = Check::new("projections");
    let mut pairing = Check::new("pairing_closure");
    let mut unique = Check::new("product_unique");
    let sp = splits(inst);
    if inst.is_empty() || sp.is_empty() {
        for c in [&mut proj, &mut pairing, &mut unique] {
            c.note("vacuous: no members or no product objects");
        }
        report.push(proj);
        report.push(pairing);
        report.push(unique);
        return Ok(report);
    }
    for trial in 0..trials.max(1) {
        let (n, m) = sp[rng.random_range(0..sp.len())];
        let (p1, p2) = projections(inst, n, m);
        if inst.contains(&p1)? && inst.contains(&p2)? {
            proj.pass();
        } else {
            proj.fail(Witness::new(trial).with("product", format!("{n}+{m}")));
        }

        let h = inst.objects()[rng.random_range(0..inst.objects().len())];
        let (f, g) = match (
            inst.sample(&mut rng, Some(h), Some(n))?,
            inst.sample(&mut rng, Some(h), Some(m))?,
        ) {
            (Some(f), Some(g)) => (f, g),
            _ => {
                pairing.note(format!("trial {trial}: no members {h} -> {n}, {m}"));
                continue;
            }
        };
        let fg = f.pair(&g)?;
        let ok = inst.contains(&fg)?
            && poly_equal(&p1.compose(&fg)?, &f)?
            && poly_equal(&p2.compose(&fg)?, &g)?;
        if ok {
            pairing.pass();
        } else {
            pairing.fail(
                Witness::new(trial)
                    .with("f", f.to_text())
                    .with("g", g.to_text()),
            );
        }

        // Any member into the product is the pairing of its two halves.
        if let Some(k) = inst.sample(&mut rng, Some(h), Some(n + m))? {
            let rebuilt = p1.compose(&k)?.pair(&p2.compose(&k)?)?;
            if poly_equal(&rebuilt, &k)? {
                unique.pass();
            } else {
                unique.fail(Witness::new(trial).with("h", k.to_text()));
            }
        }
    }
    report.push(proj);
    report.push(pairing);
    report.push(unique);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::super::Closure;
    use super::*;
    use crate::rings::RingId;
    use crate::symcalc::Poly;

    #[test]
    fn polynomial_class_is_productive() {
        for ring in [RingId::Rational, RingId::PrimeField(7)] {
            let inst = FnClassInstance::polynomial(ring, 3).unwrap();
            let rep = check_productive(&inst, 100, 1).unwrap();
            assert!(rep.passed(), "{rep}");
            assert_eq!(rep.check("pairing_closure").unwrap().trials, 100);
        }
    }

    #[test]
    fn pairing_off_fails_with_witness() {
        let r = RingId::Rational;
        let x = Poly::var(r, 1, 0);
        let gens = vec![
            PolyMap::scalar(x.pow(2)),
            PolyMap::scalar(x.pow(3)),
            PolyMap::projection(r, 2, &[0]),
            PolyMap::projection(r, 2, &[1]),
        ];
        let closure = Closure {
            pair: false,
            ..Closure::default()
        };
        let inst = FnClassInstance::generated(r, vec![1, 2], gens, closure).unwrap();
        let rep = check_productive(&inst, 20, 2).unwrap();
        let c = rep.check("pairing_closure").unwrap();
        assert!(!c.passed());
        let w = &c.witness[0];
        assert!(w.values.contains_key("f") && w.values.contains_key("g"));
    }

    #[test]
    fn empty_generators_pass_vacuously() {
        let inst =
            FnClassInstance::generated(RingId::Rational, vec![1, 2], vec![], Closure::default())
                .unwrap();
        let rep = check_productive(&inst, 10, 0).unwrap();
        assert!(rep.passed());
        assert!(rep.checks.iter().all(|c| c.trials == 0));
    }
}
