//! Derivations on finite rings.
//!
//! A derivation is an additive map with the Leibniz property
//! `d(ab) = a*d(b) + d(a)*b`. Validation is exhaustive over all pairs, so a
//! [`Derivation`] value is always a genuine derivation.

use crate::kernels::{self, ScanMode};
use crate::ring::{
    jacobson_radical, quotient_ring, same_ring, Elem, FiniteRing, Ideal, QuotientMap, Sidedness,
};
use crate::{Error, Limits, Result};
use std::sync::Arc;

/// A validated derivation on a finite ring.
#[derive(Clone)]
pub struct Derivation {
    ring: Arc<FiniteRing>,
    image: Vec<Elem>,
}

impl Derivation {
    pub fn ring(&self) -> &Arc<FiniteRing> {
        &self.ring
    }

    #[inline]
    pub fn apply(&self, a: Elem) -> Elem {
        self.image[a.index()]
    }

    pub fn is_zero(&self) -> bool {
        self.image.iter().all(|&e| e == self.ring.zero())
    }

    pub fn same_map(&self, other: &Derivation) -> bool {
        same_ring(&self.ring, &other.ring) && self.image == other.image
    }

    /// Iterated application `delta^k`.
    pub fn apply_iter(&self, a: Elem, k: usize) -> Elem {
        let mut out = a;
        for _ in 0..k {
            out = self.apply(out);
        }
        out
    }
}

impl std::fmt::Debug for Derivation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_zero() {
            write!(f, "Derivation(zero)")
        } else {
            write!(f, "Derivation(on {:?})", self.ring.recipe().to_string())
        }
    }
}

/// The zero derivation.
pub fn zero_derivation(ring: &Arc<FiniteRing>) -> Derivation {
    Derivation { ring: ring.clone(), image: vec![ring.zero(); ring.order()] }
}

/// Validates a candidate image table. On failure the error carries the first
/// violated law with a witness pair, checking the unit image (as a Leibniz
/// instance at `(1,1)`) first, then additivity, then Leibniz.
pub fn validate_derivation(ring: &Arc<FiniteRing>, image: Vec<Elem>) -> Result<Derivation> {
    if image.len() != ring.order() {
        return Err(Error::MalformedTables {
            reason: "derivation image must be total".into(),
        });
    }
    let one = ring.one().index();
    if image[one] != ring.zero() {
        // d(1) = d(1*1) = 1*d(1) + d(1)*1 forces d(1) = 0
        return Err(Error::DerivationViolation { law: "Leibniz", a: one, b: one });
    }
    let d = |a: usize| image[a];
    if let Some((a, b)) = kernels::find_pair(ScanMode::auto(), ring.order(), |a, b| {
        let (ea, eb) = (Elem(a as u16), Elem(b as u16));
        d(ring.add(ea, eb).index()) != ring.add(d(a), d(b))
    }) {
        return Err(Error::DerivationViolation { law: "additivity", a, b });
    }
    if let Some((a, b)) = kernels::find_pair(ScanMode::auto(), ring.order(), |a, b| {
        let (ea, eb) = (Elem(a as u16), Elem(b as u16));
        let lhs = d(ring.mul(ea, eb).index());
        let rhs = ring.add(ring.mul(ea, d(b)), ring.mul(d(a), eb));
        lhs != rhs
    }) {
        return Err(Error::DerivationViolation { law: "Leibniz", a, b });
    }
    Ok(Derivation { ring: ring.clone(), image })
}

/// The inner derivation `b -> ab - ba`.
pub fn inner_derivation(ring: &Arc<FiniteRing>, a: Elem) -> Derivation {
    let image: Vec<Elem> = ring
        .elements()
        .map(|b| ring.sub(ring.mul(a, b), ring.mul(b, a)))
        .collect();
    validate_derivation(ring, image)
        .expect("inner maps always satisfy the derivation laws")
}

/// First element of the ideal whose image escapes it, or `None` when the
/// ideal is delta-stable.
pub fn delta_stability_witness(ideal: &Ideal, delta: &Derivation) -> Option<Elem> {
    ideal
        .elements()
        .iter()
        .copied()
        .find(|&r| !ideal.contains(delta.apply(r)))
}

pub fn is_delta_stable(ideal: &Ideal, delta: &Derivation) -> bool {
    delta_stability_witness(ideal, delta).is_none()
}

/// A derivation induced on a factor ring, together with the quotient map it
/// lives on.
pub struct InducedDerivation {
    pub quotient: QuotientMap,
    pub delta: Derivation,
}

/// The derivation induced by `delta` on `R/I`, for a delta-stable two-sided
/// ideal. Well-definedness is verified exhaustively and the induced map is
/// re-validated.
pub fn induced_derivation(ideal: &Ideal, delta: &Derivation) -> Result<InducedDerivation> {
    if let Some(w) = delta_stability_witness(ideal, delta) {
        return Err(Error::NotDeltaStable { witness: w.index() });
    }
    let ring = delta.ring();
    let qm = quotient_ring(ring, ideal)?;
    let target = qm.target().clone();
    let image: Vec<Elem> = target
        .elements()
        .map(|class| qm.apply(delta.apply(qm.rep(class))))
        .collect();
    // well-definedness: the image must not depend on the representative
    for a in ring.elements() {
        let via_a = qm.apply(delta.apply(a));
        let via_rep = image[qm.apply(a).index()];
        if via_a != via_rep {
            return Err(Error::Internal(format!(
                "induced derivation is not well-defined at {}",
                ring.label(a)
            )));
        }
    }
    let induced = validate_derivation(&target, image)?;
    Ok(InducedDerivation { quotient: qm, delta: induced })
}

/// The delta-core: the largest delta-stable two-sided ideal inside the
/// Jacobson radical, obtained by iterating
/// `T_{k+1} = { r in T_k : delta(r) in T_k }` to a fixpoint.
///
/// Every step is verified to remain a two-sided ideal, and the fixpoint is
/// verified to be delta-stable and maximal: adjoining any radical element
/// outside it and closing under the ideal operations and delta must escape
/// the radical.
pub fn delta_core(ring: &Arc<FiniteRing>, delta: &Derivation, limits: &Limits) -> Result<Ideal> {
    if !same_ring(ring, delta.ring()) {
        return Err(Error::ContextMismatch);
    }
    let j = jacobson_radical(ring, limits)?;
    let mut current = j.clone();
    loop {
        let next: Vec<Elem> = current
            .elements()
            .iter()
            .copied()
            .filter(|&r| current.contains(delta.apply(r)))
            .collect();
        if next.len() == current.len() {
            break;
        }
        let next = Ideal::from_sorted_elements(ring, next, Sidedness::TwoSided);
        if !crate::ring::ideal_is_valid(ring, &next) {
            return Err(Error::Internal(
                "delta-core iteration left the two-sided ideal lattice".into(),
            ));
        }
        current = next;
    }

    if !is_delta_stable(&current, delta) {
        return Err(Error::Internal("delta-core fixpoint is not delta-stable".into()));
    }

    // maximality probe: for each radical element outside the core, the
    // smallest delta-stable ideal containing core + r must escape J(R)
    for &r in j.elements() {
        if current.contains(r) {
            continue;
        }
        let ext = delta_stable_closure(ring, delta, current.elements(), r);
        if ext.iter().all(|&e| j.contains(e)) {
            return Err(Error::Internal(format!(
                "delta-core is not maximal: {} extends it inside the radical",
                ring.label(r)
            )));
        }
    }
    Ok(current)
}

/// Closure of `base + {extra}` under addition, negation, two-sided
/// multiplication and delta. Returns the sorted element set.
fn delta_stable_closure(
    ring: &Arc<FiniteRing>,
    delta: &Derivation,
    base: &[Elem],
    extra: Elem,
) -> Vec<Elem> {
    let order = ring.order();
    let mut member = vec![false; order];
    let mut list: Vec<Elem> = Vec::new();
    let mut queue: Vec<Elem> = Vec::new();
    let push = |e: Elem, member: &mut Vec<bool>, list: &mut Vec<Elem>, queue: &mut Vec<Elem>| {
        if !member[e.index()] {
            member[e.index()] = true;
            list.push(e);
            queue.push(e);
        }
    };
    push(ring.zero(), &mut member, &mut list, &mut queue);
    for &b in base {
        push(b, &mut member, &mut list, &mut queue);
    }
    push(extra, &mut member, &mut list, &mut queue);
    while let Some(n) = queue.pop() {
        push(ring.neg(n), &mut member, &mut list, &mut queue);
        push(delta.apply(n), &mut member, &mut list, &mut queue);
        for i in 0..list.len() {
            let s = list[i];
            push(ring.add(n, s), &mut member, &mut list, &mut queue);
        }
        for r in ring.elements() {
            push(ring.mul(r, n), &mut member, &mut list, &mut queue);
            push(ring.mul(n, r), &mut member, &mut list, &mut queue);
        }
    }
    list.sort_unstable();
    list
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{ideal_closure, make_ring, RingRecipe};

    fn ut2_gf2() -> Arc<FiniteRing> {
        make_ring(&RingRecipe::triangular(2, RingRecipe::gf(2, 1)), &Limits::default()).unwrap()
    }

    fn t2_ring() -> Arc<FiniteRing> {
        // GF(2)[t]/(t^2)
        make_ring(&RingRecipe::poly_quot(2, vec![0, 0, 1]), &Limits::default()).unwrap()
    }

    fn dt1(ring: &Arc<FiniteRing>) -> Derivation {
        // delta(t) = 1 on GF(2)[t]/(t^2): image 0,1,t,t+1 -> 0,0,1,1
        let t = ring.resolve("t").unwrap();
        let image: Vec<Elem> = ring
            .elements()
            .map(|e| {
                // every element is c0 + c1 t; delta maps it to c1
                if e == t || e == ring.add(t, ring.one()) {
                    ring.one()
                } else {
                    ring.zero()
                }
            })
            .collect();
        validate_derivation(ring, image).unwrap()
    }

    #[test]
    fn zero_map_is_a_derivation() {
        let r = make_ring(&RingRecipe::zmod(4), &Limits::default()).unwrap();
        assert!(zero_derivation(&r).is_zero());
    }

    #[test]
    fn unit_image_is_rejected_as_leibniz_at_one_one() {
        let r = make_ring(&RingRecipe::zmod(4), &Limits::default()).unwrap();
        let mut image: Vec<Elem> = vec![r.zero(); 4];
        image[1] = r.element(1);
        let err = validate_derivation(&r, image).unwrap_err();
        match err {
            Error::DerivationViolation { law, a, b } => {
                assert_eq!(law, "Leibniz");
                assert_eq!((a, b), (1, 1));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn inner_by_e12_on_triangular() {
        let r = ut2_gf2();
        let e12 = r.resolve("e12").unwrap();
        let d = inner_derivation(&r, e12);
        let e11 = r.resolve("e11").unwrap();
        assert_eq!(d.apply(e11), e12);
        assert_eq!(d.apply(e12), r.zero());
        assert!(!d.is_zero());
    }

    #[test]
    fn inner_by_identity_is_zero() {
        let r = ut2_gf2();
        assert!(inner_derivation(&r, r.one()).is_zero());
    }

    #[test]
    fn radical_is_stable_under_inner_e12() {
        let r = ut2_gf2();
        let lim = Limits::default();
        let j = jacobson_radical(&r, &lim).unwrap();
        let d = inner_derivation(&r, r.resolve("e12").unwrap());
        assert!(is_delta_stable(&j, &d));
    }

    #[test]
    fn t_ideal_is_not_stable_under_dt1() {
        let r = t2_ring();
        let t = r.resolve("t").unwrap();
        let i = ideal_closure(&r, &[t], Sidedness::TwoSided);
        let d = dt1(&r);
        assert_eq!(delta_stability_witness(&i, &d), Some(t));
    }

    #[test]
    fn induced_derivation_collapses_to_zero() {
        let r = ut2_gf2();
        let lim = Limits::default();
        let j = jacobson_radical(&r, &lim).unwrap();
        let d = inner_derivation(&r, r.resolve("e12").unwrap());
        let ind = induced_derivation(&j, &d).unwrap();
        assert_eq!(ind.quotient.target().order(), 4);
        assert!(ind.delta.is_zero());
    }

    #[test]
    fn delta_core_examples() {
        let lim = Limits::default();

        // zero derivation: core equals the radical
        let z4 = make_ring(&RingRecipe::zmod(4), &Limits::default()).unwrap();
        let core = delta_core(&z4, &zero_derivation(&z4), &lim).unwrap();
        assert_eq!(core.labels(), vec!["0", "2"]);

        // triangular with inner(e12): radical stays stable
        let r = ut2_gf2();
        let d = inner_derivation(&r, r.resolve("e12").unwrap());
        let core = delta_core(&r, &d, &lim).unwrap();
        assert_eq!(core.labels(), vec!["0", "e12"]);

        // GF(2)[t]/(t^2) with delta(t) = 1: the core collapses to zero
        let t2 = t2_ring();
        let core = delta_core(&t2, &dt1(&t2), &lim).unwrap();
        assert!(core.is_zero_ideal());
    }
}
