//! The per-instance invariant suite.
//!
//! Runs every cross-check the library knows about against one `(R, delta)`
//! instance and reports a pass/fail/skipped line per invariant. A failure
//! here means an implementation or table bug, not a rejected input.

use crate::analyzer::{
    self, decompose_max_ideal, enumerate_max_ideals, ideal_slice, membership, membership_slice,
    quasi_regular_inverse, two_sided_check, NoWitness,
};
use crate::derivation::{delta_core, induced_derivation, is_delta_stable, validate_derivation};
use crate::kernels::ScanMode;
use crate::ore::{OreContext, OrePoly, PhiMap};
use crate::ring::{
    enumerate_all_ideals, ideal_is_valid, jacobson_radical, nilradical, Elem, Sidedness,
};
use crate::{Error, Limits, Result};
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    /// The check could not run at this scale (a cap was hit); never counted
    /// as a pass.
    Skipped,
}

#[derive(Debug, Clone)]
pub struct InvariantResult {
    pub name: &'static str,
    pub status: Status,
    pub detail: String,
}

impl InvariantResult {
    fn pass(name: &'static str) -> Self {
        InvariantResult { name, status: Status::Pass, detail: String::new() }
    }
    fn fail(name: &'static str, detail: String) -> Self {
        InvariantResult { name, status: Status::Fail, detail }
    }
    fn skipped(name: &'static str, detail: String) -> Self {
        InvariantResult { name, status: Status::Skipped, detail }
    }
}

fn check(name: &'static str, r: Result<()>) -> InvariantResult {
    match r {
        Ok(()) => InvariantResult::pass(name),
        Err(e @ (Error::ClosureTooLarge { .. } | Error::EnumerationCapExceeded { .. })) => {
            InvariantResult::skipped(name, e.to_string())
        }
        Err(e) => InvariantResult::fail(name, e.to_string()),
    }
}

fn ensure(cond: bool, msg: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Internal(msg.into()))
    }
}

/// Deterministic sweep of at most `target` codes out of `0..ambient`.
fn stride_codes(ambient: u64, target: u64) -> impl Iterator<Item = u64> {
    let step = (ambient / target).max(1);
    (0..ambient).step_by(step as usize)
}

/// Runs the full invariant suite for one instance.
pub fn verify_instance(
    ctx: &Arc<OreContext>,
    dmax: usize,
    limits: &Limits,
) -> Vec<InvariantResult> {
    let ring = ctx.ring().clone();
    let delta = ctx.delta().clone();
    let mut out = Vec::new();

    out.push(check("ring-axioms", ring.recheck_axioms(ScanMode::auto())));

    out.push(check(
        "jacobson-routes-agree",
        jacobson_radical(&ring, limits).map(|_| ()),
    ));

    out.push(check(
        "nilradical-equals-radical",
        (|| {
            let j = jacobson_radical(&ring, limits)?;
            let n = nilradical(&ring, limits)?;
            ensure(j.same_elements(&n), "nilradical differs from the radical")
        })(),
    ));

    out.push(check(
        "radical-power-vanishes",
        (|| {
            let j = jacobson_radical(&ring, limits)?;
            let mut power: Vec<Elem> = j.elements().to_vec();
            for _ in 0..ring.order() {
                if power.len() == 1 && power[0] == ring.zero() {
                    return Ok(());
                }
                let mut next = vec![false; ring.order()];
                for &a in &power {
                    for &b in j.elements() {
                        next[ring.mul(a, b).index()] = true;
                    }
                }
                // additive span of the products
                let gens: Vec<Elem> = ring.elements().filter(|e| next[e.index()]).collect();
                let span = crate::ring::ideal_closure(&ring, &gens, Sidedness::TwoSided);
                power = span.elements().to_vec();
            }
            Err(Error::Internal("radical power never reached zero".into()))
        })(),
    ));

    out.push(check(
        "derivation-laws",
        (|| {
            let image: Vec<Elem> = ring.elements().map(|e| delta.apply(e)).collect();
            validate_derivation(&ring, image).map(|_| ())
        })(),
    ));

    out.push(check(
        "delta-core-properties",
        (|| {
            let j = jacobson_radical(&ring, limits)?;
            let core = delta_core(&ring, &delta, limits)?;
            ensure(core.is_subset_of(&j), "core escapes the radical")?;
            ensure(is_delta_stable(&core, &delta), "core is not delta-stable")?;
            ensure(ideal_is_valid(&ring, &core), "core is not a two-sided ideal")
        })(),
    ));

    out.push(check(
        "quotient-by-core-morphism",
        (|| {
            let core = delta_core(&ring, &delta, limits)?;
            crate::ring::quotient_ring(&ring, &core).map(|_| ())
        })(),
    ));

    let verdict = match analyzer::quasi_duo(ctx, limits) {
        Ok(v) => v,
        Err(e) => {
            out.push(InvariantResult::fail("quasi-duo-decision", e.to_string()));
            return out;
        }
    };
    out.push(InvariantResult::pass("quasi-duo-decision"));

    out.push(check(
        "witness-soundness",
        (|| {
            let core = &verdict.report.core;
            match (&verdict.quasi_duo, &verdict.witness) {
                (true, None) => Ok(()),
                (false, Some(NoWitness::Commutator { a, b })) => {
                    let c = ring.sub(ring.mul(*a, *b), ring.mul(*b, *a));
                    ensure(!core.contains(c), "commutator witness lies in the core")
                }
                (false, Some(NoWitness::DerivationImage { r })) => {
                    ensure(!core.contains(delta.apply(*r)), "derivation witness lies in the core")
                }
                _ => Err(Error::Internal("verdict and witness disagree".into())),
            }
        })(),
    ));

    if verdict.quasi_duo {
        out.push(check(
            "corollary-core-equals-k",
            ensure(verdict.report.k_equals_core, "core differs from the ideal intersection"),
        ));

        out.push(check(
            "commutative-quotient",
            (|| {
                let ind = induced_derivation(&verdict.report.core, &delta)?;
                ensure(ind.quotient.target().is_commutative(), "quotient is not commutative")?;
                ensure(ind.delta.is_zero(), "induced derivation is nonzero")
            })(),
        ));
    }

    // simple rings: quasi-duo iff a field with zero derivation
    out.push(check(
        "simple-ring-consistency",
        (|| {
            let all = enumerate_all_ideals(&ring, Sidedness::TwoSided, limits)?;
            let simple = ring.order() >= 2 && all.len() == 2;
            if !simple {
                return Ok(());
            }
            let expected = ring.is_field() && delta.is_zero();
            ensure(verdict.quasi_duo == expected, "simple-ring criterion mismatch")
        })(),
    ));

    // semiprimitive rings: quasi-duo iff commutative with zero derivation
    out.push(check(
        "semiprimitive-consistency",
        (|| {
            let j = jacobson_radical(&ring, limits)?;
            if !j.is_zero_ideal() {
                return Ok(());
            }
            let expected = ring.is_commutative() && delta.is_zero();
            ensure(verdict.quasi_duo == expected, "semiprimitive criterion mismatch")
        })(),
    ));

    out.push(check(
        "phi-kernel-law",
        (|| {
            for ideal in &verdict.report.field_ideals {
                let phi = PhiMap::new(ctx, ideal.clone())?;
                let ambient = (ring.order() as u64).pow(3);
                for code in stride_codes(ambient, 40_000) {
                    let f = decode_poly(ctx, code, 3);
                    let projected_zero = phi.apply(&f)?.is_zero();
                    let all_inside = f.coeffs().iter().all(|&c| ideal.contains(c));
                    ensure(projected_zero == all_inside, "kernel law violated")?;
                }
            }
            Ok(())
        })(),
    ));

    out.push(check(
        "phi-morphism-law",
        (|| {
            for ideal in &verdict.report.field_ideals {
                let phi = PhiMap::new(ctx, ideal.clone())?;
                let ambient = (ring.order() as u64).pow(2);
                for fcode in stride_codes(ambient, 200) {
                    let f = decode_poly(ctx, fcode, 2);
                    for gcode in stride_codes(ambient, 200) {
                        let g = decode_poly(ctx, gcode, 2);
                        let sum = phi.apply(&f.add(&g)?)?;
                        ensure(sum == phi.apply(&f)?.add(&phi.apply(&g)?), "additivity fails")?;
                        let prod = phi.apply(&f.mul(&g)?)?;
                        ensure(prod == phi.apply(&f)?.mul(&phi.apply(&g)?), "multiplicativity fails")?;
                    }
                }
            }
            Ok(())
        })(),
    ));

    if verdict.quasi_duo {
        let handles = match enumerate_max_ideals(ctx, dmax, limits) {
            Ok(h) => h,
            Err(e) => {
                out.push(InvariantResult::fail("maxideal-enumeration", e.to_string()));
                return out;
            }
        };
        out.push(InvariantResult::pass("maxideal-enumeration"));

        out.push(check(
            "maxideal-roundtrip",
            (|| {
                for h in &handles {
                    let mut gens = vec![h.lift().clone()];
                    for &a in h.ideal().elements() {
                        gens.push(OrePoly::constant(ctx, a));
                    }
                    let back = decompose_max_ideal(ctx, &gens, dmax, limits)?;
                    ensure(&back == h, "decompose(enumerate) is not the identity")?;
                }
                Ok(())
            })(),
        ));

        out.push(check(
            "membership-sets-agree",
            (|| {
                for h in &handles {
                    ensure(
                        ideal_slice(h, dmax)? == membership_slice(h, dmax)?,
                        "closure slice differs from the projection preimage",
                    )?;
                }
                Ok(())
            })(),
        ));

        out.push(check(
            "two-sided-closure",
            (|| {
                for h in &handles {
                    let outcome = two_sided_check(h, dmax + 1)?;
                    ensure(outcome.pass, "membership not closed under multiplication")?;
                }
                Ok(())
            })(),
        ));

        out.push(check(
            "quasi-regular-inverses",
            (|| {
                let k = &verdict.report.intersection;
                for &a in k.elements() {
                    if a == ring.zero() {
                        continue;
                    }
                    for j in 0..=2usize {
                        let f = OrePoly::monomial(ctx, a, j);
                        quasi_regular_inverse(&f, k)?;
                    }
                }
                Ok(())
            })(),
        ));

        out.push(check(
            "membership-rejects-one",
            (|| {
                for h in &handles {
                    ensure(!membership(h, &OrePoly::one(ctx))?, "1 accepted by a proper ideal")?;
                }
                Ok(())
            })(),
        ));
    }

    out
}

fn decode_poly(ctx: &Arc<OreContext>, mut code: u64, width: usize) -> OrePoly {
    let ring = ctx.ring();
    let order = ring.order() as u64;
    let mut coeffs = Vec::with_capacity(width);
    for _ in 0..width {
        coeffs.push(ring.element((code % order) as usize));
        code /= order;
    }
    OrePoly::from_coeffs(ctx, coeffs)
}
