//! Ideals of finite rings: closures, enumeration, radicals.

use super::{same_ring, Elem, FiniteRing};
use crate::derivation::Derivation;
use crate::kernels::{self, ScanMode};
use crate::{Error, Limits, Result};
use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sidedness {
    Left,
    Right,
    TwoSided,
}

impl fmt::Display for Sidedness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sidedness::Left => write!(f, "left"),
            Sidedness::Right => write!(f, "right"),
            Sidedness::TwoSided => write!(f, "two-sided"),
        }
    }
}

/// A (left, right or two-sided) ideal of a finite ring, stored as its full
/// element set.
#[derive(Clone)]
pub struct Ideal {
    ring: Arc<FiniteRing>,
    elements: Vec<Elem>,
    bits: Vec<u64>,
    sidedness: Sidedness,
}

impl Ideal {
    pub(crate) fn from_sorted_elements(
        ring: &Arc<FiniteRing>,
        elements: Vec<Elem>,
        sidedness: Sidedness,
    ) -> Ideal {
        let mut bits = vec![0u64; ring.order().div_ceil(64)];
        for e in &elements {
            bits[e.index() / 64] |= 1 << (e.index() % 64);
        }
        Ideal { ring: ring.clone(), elements, bits, sidedness }
    }

    /// The zero ideal.
    pub fn zero(ring: &Arc<FiniteRing>, sidedness: Sidedness) -> Ideal {
        Ideal::from_sorted_elements(ring, vec![ring.zero()], sidedness)
    }

    /// The unit ideal (the whole ring).
    pub fn unit(ring: &Arc<FiniteRing>, sidedness: Sidedness) -> Ideal {
        Ideal::from_sorted_elements(ring, ring.elements().collect(), sidedness)
    }

    pub fn ring(&self) -> &Arc<FiniteRing> {
        &self.ring
    }

    pub fn elements(&self) -> &[Elem] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        false // an ideal always contains zero
    }

    pub fn sidedness(&self) -> Sidedness {
        self.sidedness
    }

    #[inline]
    pub fn contains(&self, e: Elem) -> bool {
        self.bits[e.index() / 64] >> (e.index() % 64) & 1 == 1
    }

    pub fn is_proper(&self) -> bool {
        self.len() < self.ring.order()
    }

    pub fn is_unit_ideal(&self) -> bool {
        !self.is_proper()
    }

    pub fn is_zero_ideal(&self) -> bool {
        self.len() == 1
    }

    /// Set inclusion (ignores sidedness flags).
    pub fn is_subset_of(&self, other: &Ideal) -> bool {
        self.bits
            .iter()
            .zip(&other.bits)
            .all(|(a, b)| a & !b == 0)
    }

    pub fn same_elements(&self, other: &Ideal) -> bool {
        self.elements == other.elements
    }

    /// Labels of the elements, in index order.
    pub fn labels(&self) -> Vec<String> {
        self.elements.iter().map(|&e| self.ring.label(e).to_string()).collect()
    }
}

impl PartialEq for Ideal {
    fn eq(&self, other: &Self) -> bool {
        same_ring(&self.ring, &other.ring)
            && self.sidedness == other.sidedness
            && self.elements == other.elements
    }
}

impl Eq for Ideal {}

impl fmt::Debug for Ideal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ideal({}, {{{}}})", self.sidedness, self.labels().join(","))
    }
}

/// Closure of a generating set under addition, negation and the
/// multiplications permitted by `sidedness`. May return the unit ideal.
pub fn ideal_closure(ring: &Arc<FiniteRing>, gens: &[Elem], sidedness: Sidedness) -> Ideal {
    closure_from(ring, gens.iter().copied(), sidedness)
}

fn closure_from(
    ring: &Arc<FiniteRing>,
    gens: impl IntoIterator<Item = Elem>,
    sidedness: Sidedness,
) -> Ideal {
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
    for g in gens {
        push(g, &mut member, &mut list, &mut queue);
    }

    while let Some(n) = queue.pop() {
        push(ring.neg(n), &mut member, &mut list, &mut queue);
        // sums with everything currently known; pairs involving later
        // members are revisited when those members are processed
        for i in 0..list.len() {
            let s = list[i];
            push(ring.add(n, s), &mut member, &mut list, &mut queue);
        }
        for r in ring.elements() {
            if matches!(sidedness, Sidedness::Left | Sidedness::TwoSided) {
                push(ring.mul(r, n), &mut member, &mut list, &mut queue);
            }
            if matches!(sidedness, Sidedness::Right | Sidedness::TwoSided) {
                push(ring.mul(n, r), &mut member, &mut list, &mut queue);
            }
        }
    }

    list.sort_unstable();
    Ideal::from_sorted_elements(ring, list, sidedness)
}

/// Whether the stored element set really is an ideal of its sidedness.
pub fn ideal_is_valid(ring: &FiniteRing, ideal: &Ideal) -> bool {
    if !ideal.contains(ring.zero()) {
        return false;
    }
    for &a in ideal.elements() {
        if !ideal.contains(ring.neg(a)) {
            return false;
        }
        for &b in ideal.elements() {
            if !ideal.contains(ring.add(a, b)) {
                return false;
            }
        }
        for r in ring.elements() {
            if matches!(ideal.sidedness(), Sidedness::Left | Sidedness::TwoSided)
                && !ideal.contains(ring.mul(r, a))
            {
                return false;
            }
            if matches!(ideal.sidedness(), Sidedness::Right | Sidedness::TwoSided)
                && !ideal.contains(ring.mul(a, r))
            {
                return false;
            }
        }
    }
    true
}

/// Intersection of ideals; the empty intersection is the unit ideal.
pub(crate) fn intersect_ideals(
    ring: &Arc<FiniteRing>,
    ideals: &[Ideal],
    sidedness: Sidedness,
) -> Ideal {
    let elements: Vec<Elem> = ring
        .elements()
        .filter(|&e| ideals.iter().all(|i| i.contains(e)))
        .collect();
    Ideal::from_sorted_elements(ring, elements, sidedness)
}

fn enum_cap(sidedness: Sidedness, limits: &Limits) -> usize {
    match sidedness {
        Sidedness::TwoSided => limits.twosided_enum_cap,
        _ => limits.onesided_enum_cap,
    }
}

/// All ideals of the given sidedness: closures of the principal ideals,
/// saturated under pairwise joins. Sorted by (size, element list).
pub fn enumerate_all_ideals(
    ring: &Arc<FiniteRing>,
    sidedness: Sidedness,
    limits: &Limits,
) -> Result<Vec<Ideal>> {
    let cap = enum_cap(sidedness, limits);
    if ring.order() > cap {
        return Err(Error::EnumerationCapExceeded {
            what: "ideal enumeration",
            order: ring.order(),
            cap,
        });
    }

    let mut seen: HashSet<Vec<Elem>> = HashSet::new();
    let mut ideals: Vec<Ideal> = Vec::new();

    let principal: Vec<Ideal> = {
        let results: Vec<Vec<Elem>> = {
            let compute = |r: usize| {
                closure_from(ring, [ring.element(r)], sidedness).elements.clone()
            };
            #[cfg(feature = "parallel")]
            {
                use rayon::prelude::*;
                (0..ring.order()).into_par_iter().map(compute).collect()
            }
            #[cfg(not(feature = "parallel"))]
            {
                (0..ring.order()).map(compute).collect()
            }
        };
        results
            .into_iter()
            .map(|els| Ideal::from_sorted_elements(ring, els, sidedness))
            .collect()
    };
    for i in principal {
        if seen.insert(i.elements.clone()) {
            ideals.push(i);
        }
    }

    // join-saturation: the join of two ideals is their elementwise sum set
    let mut frontier: Vec<usize> = (0..ideals.len()).collect();
    while let Some(idx) = frontier.pop() {
        for other in 0..ideals.len() {
            let join = join_ideals(ring, &ideals[idx], &ideals[other], sidedness);
            if seen.insert(join.elements.clone()) {
                ideals.push(join);
                frontier.push(ideals.len() - 1);
            }
        }
    }

    ideals.sort_by(|a, b| (a.len(), &a.elements).cmp(&(b.len(), &b.elements)));
    Ok(ideals)
}

fn join_ideals(ring: &Arc<FiniteRing>, a: &Ideal, b: &Ideal, sidedness: Sidedness) -> Ideal {
    let order = ring.order();
    let mut member = vec![false; order];
    for &x in a.elements() {
        for &y in b.elements() {
            member[ring.add(x, y).index()] = true;
        }
    }
    let elements: Vec<Elem> = (0..order as u16).map(Elem).filter(|e| member[e.index()]).collect();
    Ideal::from_sorted_elements(ring, elements, sidedness)
}

/// The maximal proper ideals of the given sidedness. Each returned ideal is
/// re-verified: adjoining any outside element must close to the unit ideal.
pub fn enumerate_maximal_ideals(
    ring: &Arc<FiniteRing>,
    sidedness: Sidedness,
    limits: &Limits,
) -> Result<Vec<Ideal>> {
    let all = enumerate_all_ideals(ring, sidedness, limits)?;
    let proper: Vec<&Ideal> = all.iter().filter(|i| i.is_proper()).collect();
    let mut maximal: Vec<Ideal> = Vec::new();
    'outer: for i in &proper {
        for j in &proper {
            if i.len() < j.len() && i.is_subset_of(j) {
                continue 'outer;
            }
        }
        maximal.push((*i).clone());
    }

    for m in &maximal {
        for r in ring.elements() {
            if m.contains(r) {
                continue;
            }
            let mut gens: Vec<Elem> = m.elements().to_vec();
            gens.push(r);
            let ext = ideal_closure(ring, &gens, sidedness);
            if ext.is_proper() {
                return Err(Error::Internal(format!(
                    "maximality verification failed: {:?} extends to a proper ideal",
                    m
                )));
            }
        }
    }

    maximal.sort_by(|a, b| (a.len(), &a.elements).cmp(&(b.len(), &b.elements)));
    Ok(maximal)
}

/// The quasi-regularity scan of route (a): all `r` such that `1 - s*r` is a
/// unit for every `s`. Exposed with an explicit mode for the benchmarks.
pub fn quasi_regular_set(ring: &FiniteRing, mode: ScanMode) -> Vec<Elem> {
    let indices = kernels::filter_indices(mode, ring.order(), |r| {
        let r = Elem(r as u16);
        ring.elements()
            .all(|s| ring.is_unit(ring.sub(ring.one(), ring.mul(s, r))))
    });
    indices.into_iter().map(|i| Elem(i as u16)).collect()
}

/// The Jacobson radical, computed two independent ways that must agree:
/// the quasi-regularity characterization and the intersection of all maximal
/// left ideals.
pub fn jacobson_radical(ring: &Arc<FiniteRing>, limits: &Limits) -> Result<Ideal> {
    let route_a = quasi_regular_set(ring, ScanMode::auto());
    let maximal_left = enumerate_maximal_ideals(ring, Sidedness::Left, limits)?;
    let route_b = intersect_ideals(ring, &maximal_left, Sidedness::TwoSided);

    if route_a != route_b.elements {
        return Err(Error::Internal(format!(
            "Jacobson radical routes disagree: quasi-regularity gives {} elements, \
             maximal-left intersection gives {}",
            route_a.len(),
            route_b.len()
        )));
    }
    let ideal = Ideal::from_sorted_elements(ring, route_a, Sidedness::TwoSided);
    if !ideal_is_valid(ring, &ideal) {
        return Err(Error::Internal("Jacobson radical set is not a two-sided ideal".into()));
    }
    Ok(ideal)
}

/// The nilradical. For finite rings this is the Jacobson radical; every
/// element is additionally verified nilpotent.
pub fn nilradical(ring: &Arc<FiniteRing>, limits: &Limits) -> Result<Ideal> {
    let j = jacobson_radical(ring, limits)?;
    for &r in j.elements() {
        let mut pow = r;
        let mut nilpotent = false;
        for _ in 0..ring.order() {
            if pow == ring.zero() {
                nilpotent = true;
                break;
            }
            pow = ring.mul(pow, r);
        }
        if !nilpotent {
            return Err(Error::Internal(format!(
                "nilpotency verification failure for radical element {}",
                ring.label(r)
            )));
        }
    }
    Ok(j)
}

/// The set of maximal two-sided ideals `I` with `R/I` a field and
/// `delta(R)` contained in `I`.
pub fn maximal_field_ideals(
    ring: &Arc<FiniteRing>,
    delta: &Derivation,
    limits: &Limits,
) -> Result<Vec<Ideal>> {
    if !same_ring(ring, delta.ring()) {
        return Err(Error::ContextMismatch);
    }
    let maximal = enumerate_maximal_ideals(ring, Sidedness::TwoSided, limits)?;
    let mut out = Vec::new();
    for i in maximal {
        if !ring.elements().all(|r| i.contains(delta.apply(r))) {
            continue;
        }
        let qm = super::quotient_ring(ring, &i)?;
        if qm.target().is_field() {
            out.push(i);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{make_ring, RingRecipe};

    fn zmod(n: u64) -> Arc<FiniteRing> {
        make_ring(&RingRecipe::zmod(n), &Limits::default()).unwrap()
    }

    fn ut2_gf2() -> Arc<FiniteRing> {
        make_ring(&RingRecipe::triangular(2, RingRecipe::gf(2, 1)), &Limits::default()).unwrap()
    }

    fn m2_gf2() -> Arc<FiniteRing> {
        make_ring(&RingRecipe::matrix(2, RingRecipe::gf(2, 1)), &Limits::default()).unwrap()
    }

    #[test]
    fn principal_closure_in_zmod4() {
        let r = zmod(4);
        let i = ideal_closure(&r, &[r.element(2)], Sidedness::TwoSided);
        assert_eq!(i.elements(), &[r.element(0), r.element(2)]);
        assert!(i.is_proper());
    }

    #[test]
    fn e12_closure_in_triangular_is_tiny() {
        let r = ut2_gf2();
        let e12 = r.resolve("e12").unwrap();
        let i = ideal_closure(&r, &[e12], Sidedness::TwoSided);
        assert_eq!(i.len(), 2);
        assert!(i.contains(e12));
    }

    #[test]
    fn e12_closure_in_matrix_is_everything() {
        let r = m2_gf2();
        let e12 = r.resolve("e12").unwrap();
        let i = ideal_closure(&r, &[e12], Sidedness::TwoSided);
        assert!(i.is_unit_ideal());
    }

    #[test]
    fn maximal_ideals_of_zmod4() {
        let r = zmod(4);
        let m = enumerate_maximal_ideals(&r, Sidedness::TwoSided, &Limits::default()).unwrap();
        assert_eq!(m.len(), 1);
        assert_eq!(m[0].labels(), vec!["0", "2"]);
    }

    #[test]
    fn maximal_ideals_of_triangular() {
        let r = ut2_gf2();
        let m = enumerate_maximal_ideals(&r, Sidedness::TwoSided, &Limits::default()).unwrap();
        assert_eq!(m.len(), 2);
        assert!(m.iter().all(|i| i.len() == 4));
        // one kills the (1,1) entry, the other the (2,2) entry
        let e11 = r.resolve("e11").unwrap();
        let e22 = r.resolve("e22").unwrap();
        assert!(m.iter().any(|i| i.contains(e11) && !i.contains(e22)));
        assert!(m.iter().any(|i| i.contains(e22) && !i.contains(e11)));
    }

    #[test]
    fn matrix_ring_is_simple() {
        let r = m2_gf2();
        let m = enumerate_maximal_ideals(&r, Sidedness::TwoSided, &Limits::default()).unwrap();
        assert_eq!(m.len(), 1);
        assert!(m[0].is_zero_ideal());
    }

    #[test]
    fn jacobson_radical_examples() {
        let lim = Limits::default();
        let j = jacobson_radical(&zmod(4), &lim).unwrap();
        assert_eq!(j.labels(), vec!["0", "2"]);

        let gf5 = make_ring(&RingRecipe::gf(5, 1), &lim).unwrap();
        assert!(jacobson_radical(&gf5, &lim).unwrap().is_zero_ideal());

        let r = ut2_gf2();
        let j = jacobson_radical(&r, &lim).unwrap();
        assert_eq!(j.labels(), vec!["0", "e12"]);
    }

    #[test]
    fn nilradical_equals_radical() {
        let lim = Limits::default();
        for ring in [zmod(4), zmod(9), ut2_gf2()] {
            let j = jacobson_radical(&ring, &lim).unwrap();
            let n = nilradical(&ring, &lim).unwrap();
            assert!(j.same_elements(&n));
        }
    }

    #[test]
    fn empty_intersection_is_unit_ideal() {
        let r = zmod(4);
        let k = intersect_ideals(&r, &[], Sidedness::TwoSided);
        assert!(k.is_unit_ideal());
    }

    #[test]
    fn enumeration_cap_is_enforced() {
        let r = zmod(10);
        let lim = Limits { onesided_enum_cap: 5, ..Limits::default() };
        let err = enumerate_all_ideals(&r, Sidedness::Left, &lim).unwrap_err();
        assert!(matches!(err, Error::EnumerationCapExceeded { .. }));
    }
}
