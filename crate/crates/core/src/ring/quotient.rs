//! Factor rings and their verified projection maps.

use super::{Elem, FiniteRing, Ideal, RingRecipe, Sidedness};
use crate::kernels::{self, ScanMode};
use crate::{Error, Result};
use std::sync::Arc;

/// A surjective ring morphism from a ring onto its quotient by a two-sided
/// ideal. The morphism laws are verified exhaustively at construction.
#[derive(Clone)]
pub struct QuotientMap {
    source: Arc<FiniteRing>,
    target: Arc<FiniteRing>,
    proj: Vec<Elem>,
    reps: Vec<Elem>,
}

impl QuotientMap {
    pub fn source(&self) -> &Arc<FiniteRing> {
        &self.source
    }

    pub fn target(&self) -> &Arc<FiniteRing> {
        &self.target
    }

    /// Image of a source element.
    #[inline]
    pub fn apply(&self, a: Elem) -> Elem {
        self.proj[a.index()]
    }

    /// The canonical (minimal-index) representative of a target element.
    #[inline]
    pub fn rep(&self, class: Elem) -> Elem {
        self.reps[class.index()]
    }
}

/// The factor ring by a proper two-sided ideal, together with its projection.
pub fn quotient_ring(ring: &Arc<FiniteRing>, ideal: &Ideal) -> Result<QuotientMap> {
    if ideal.sidedness() != Sidedness::TwoSided {
        return Err(Error::BadQuotient { reason: "ideal must be two-sided" });
    }
    if !ideal.is_proper() {
        return Err(Error::BadQuotient { reason: "ideal must be proper" });
    }
    if !super::same_ring(ring, ideal.ring()) {
        return Err(Error::ContextMismatch);
    }
    if !super::ideal::ideal_is_valid(ring, ideal) {
        return Err(Error::BadQuotient { reason: "element set is not a two-sided ideal" });
    }

    let order = ring.order();
    let mut class_of = vec![u16::MAX; order];
    let mut reps: Vec<Elem> = Vec::new();
    for a in ring.elements() {
        if class_of[a.index()] != u16::MAX {
            continue;
        }
        let class = reps.len() as u16;
        reps.push(a);
        for &i in ideal.elements() {
            class_of[ring.add(a, i).index()] = class;
        }
    }
    let qorder = reps.len();
    if qorder * ideal.len() != order {
        return Err(Error::Internal("cosets do not tile the ring".into()));
    }

    let mut add = vec![0u16; qorder * qorder];
    let mut mul = vec![0u16; qorder * qorder];
    for (ci, &ri) in reps.iter().enumerate() {
        for (cj, &rj) in reps.iter().enumerate() {
            add[ci * qorder + cj] = class_of[ring.add(ri, rj).index()];
            mul[ci * qorder + cj] = class_of[ring.mul(ri, rj).index()];
        }
    }

    // label a class by the smallest scalar n with class = pi(n*1) when one
    // exists, falling back to the representative's label
    let labels: Vec<String> = reps
        .iter()
        .enumerate()
        .map(|(class, &rep)| {
            let mut scalar = ring.zero();
            for n in 0..qorder as u64 {
                if class_of[scalar.index()] as usize == class {
                    return n.to_string();
                }
                scalar = ring.add(scalar, ring.one());
            }
            ring.label(rep).to_string()
        })
        .collect();
    let recipe = RingRecipe::quotient(
        ring.recipe().clone(),
        ideal.elements().iter().map(|&e| ring.label(e).to_string()).collect(),
    );
    let zero = class_of[ring.zero().index()];
    let one = class_of[ring.one().index()];
    let target = FiniteRing::from_tables(
        qorder,
        add,
        mul,
        Elem(zero),
        Elem(one),
        labels,
        recipe,
        false,
    )?;

    let proj: Vec<Elem> = class_of.iter().map(|&c| Elem(c)).collect();
    let qm = QuotientMap { source: ring.clone(), target, proj, reps };

    // exhaustive morphism verification
    let bad = kernels::find_pair(ScanMode::auto(), order, |a, b| {
        let (a, b) = (Elem(a as u16), Elem(b as u16));
        qm.apply(ring.add(a, b)) != qm.target.add(qm.apply(a), qm.apply(b))
            || qm.apply(ring.mul(a, b)) != qm.target.mul(qm.apply(a), qm.apply(b))
    });
    if let Some((a, b)) = bad {
        return Err(Error::Internal(format!(
            "quotient projection is not a morphism at ({a}, {b})"
        )));
    }
    if qm.apply(ring.one()) != qm.target.one() {
        return Err(Error::Internal("quotient projection does not preserve 1".into()));
    }
    Ok(qm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{ideal_closure, make_ring};
    use crate::Limits;

    #[test]
    fn zmod4_mod_two_is_gf2() {
        let r = make_ring(&RingRecipe::zmod(4), &Limits::default()).unwrap();
        let i = ideal_closure(&r, &[r.element(2)], Sidedness::TwoSided);
        let qm = quotient_ring(&r, &i).unwrap();
        assert_eq!(qm.target().order(), 2);
        assert!(qm.target().is_field());
        assert_eq!(qm.apply(r.element(3)), qm.apply(r.element(1)));
    }

    #[test]
    fn triangular_mod_radical_is_commutative() {
        let r = make_ring(&RingRecipe::triangular(2, RingRecipe::gf(2, 1)), &Limits::default())
            .unwrap();
        let e12 = r.resolve("e12").unwrap();
        let i = ideal_closure(&r, &[e12], Sidedness::TwoSided);
        let qm = quotient_ring(&r, &i).unwrap();
        assert_eq!(qm.target().order(), 4);
        assert!(qm.target().is_commutative());
        assert!(!qm.target().is_field());
    }

    #[test]
    fn quotient_by_zero_is_identity() {
        let r = make_ring(&RingRecipe::zmod(6), &Limits::default()).unwrap();
        let i = Ideal::zero(&r, Sidedness::TwoSided);
        let qm = quotient_ring(&r, &i).unwrap();
        assert_eq!(qm.target().order(), 6);
        for a in r.elements() {
            assert_eq!(qm.rep(qm.apply(a)), a);
        }
    }

    #[test]
    fn quotient_rejects_unit_ideal() {
        let r = make_ring(&RingRecipe::zmod(4), &Limits::default()).unwrap();
        let i = Ideal::unit(&r, Sidedness::TwoSided);
        assert!(matches!(
            quotient_ring(&r, &i),
            Err(Error::BadQuotient { .. })
        ));
    }

    #[test]
    fn quotient_rejects_one_sided_ideal() {
        let r = make_ring(&RingRecipe::zmod(4), &Limits::default()).unwrap();
        let i = ideal_closure(&r, &[r.element(2)], Sidedness::Left);
        assert!(matches!(
            quotient_ring(&r, &i),
            Err(Error::BadQuotient { .. })
        ));
    }
}
