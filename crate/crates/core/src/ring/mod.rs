//! Finite unital rings given by exact operation tables.
//!
//! A [`FiniteRing`] stores dense addition/multiplication tables indexed by
//! element number, plus the construction recipe it was built from. Structured
//! recipes (matrix rings, triangular rings, products, quotients, polynomial
//! quotients) all compile down to the same table representation, so every
//! exhaustive check has a single code path.

mod ideal;
mod quotient;
mod recipe;

pub use ideal::{
    enumerate_all_ideals, enumerate_maximal_ideals, ideal_closure, ideal_is_valid,
    jacobson_radical, maximal_field_ideals, nilradical, quasi_regular_set, Ideal, Sidedness,
};
pub(crate) use ideal::intersect_ideals;
pub use quotient::{quotient_ring, QuotientMap};
pub use recipe::{make_ring, RingRecipe};

use crate::kernels::{self, ScanMode};
use crate::{Error, Result};
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

/// An element of a [`FiniteRing`], identified by its index in the tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Elem(pub(crate) u16);

impl Elem {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A finite unital ring with exact element-indexed operation tables.
///
/// Values are immutable after construction; all methods are pure, so a ring
/// can be shared freely across threads behind an [`Arc`].
pub struct FiniteRing {
    order: usize,
    add: Vec<u16>,
    mul: Vec<u16>,
    neg: Vec<u16>,
    zero: Elem,
    one: Elem,
    units: Vec<bool>,
    /// First non-commuting pair in index order, if any.
    commutator_witness: Option<(Elem, Elem)>,
    characteristic: usize,
    labels: Vec<String>,
    label_index: HashMap<String, Elem>,
    recipe: RingRecipe,
}

/// Exhaustive triple-law validation runs at construction up to this order;
/// larger structured rings are still fully checkable via
/// [`FiniteRing::recheck_axioms`]. Raw tables are always validated in full.
const CONSTRUCTION_TRIPLE_CAP: usize = 256;

impl FiniteRing {
    /// Builds a ring from complete tables, validating the axioms.
    ///
    /// `force_exhaustive` requests the full triple-law scan regardless of
    /// order (used for raw table input, which is never trusted).
    pub(crate) fn from_tables(
        order: usize,
        add: Vec<u16>,
        mul: Vec<u16>,
        zero: Elem,
        one: Elem,
        labels: Vec<String>,
        recipe: RingRecipe,
        force_exhaustive: bool,
    ) -> Result<Arc<FiniteRing>> {
        if order == 0 {
            return Err(Error::MalformedTables {
                reason: "ring must have at least one element".into(),
            });
        }
        if add.len() != order * order || mul.len() != order * order {
            return Err(Error::MalformedTables {
                reason: format!("tables must have {0}x{0} entries", order),
            });
        }
        if let Some(&e) = add.iter().chain(mul.iter()).find(|&&e| e as usize >= order) {
            return Err(Error::MalformedTables {
                reason: format!("table entry {e} out of range 0..{order}"),
            });
        }
        if zero.index() >= order || one.index() >= order {
            return Err(Error::MalformedTables {
                reason: "zero/one out of range".into(),
            });
        }
        if labels.len() != order {
            return Err(Error::MalformedTables {
                reason: "one label per element required".into(),
            });
        }

        let neg = derive_negation(order, &add, zero)?;
        check_axioms(
            order,
            &add,
            &mul,
            &neg,
            zero,
            one,
            ScanMode::auto(),
            force_exhaustive || order <= CONSTRUCTION_TRIPLE_CAP,
        )?;

        let units = compute_units(order, &mul, one)?;
        let commutator_witness = kernels::find_pair(ScanMode::auto(), order, |a, b| {
            mul[a * order + b] != mul[b * order + a]
        })
        .map(|(a, b)| (Elem(a as u16), Elem(b as u16)));

        let mut characteristic = 1usize;
        let mut acc = one;
        while acc != zero {
            acc = Elem(add[acc.index() * order + one.index()]);
            characteristic += 1;
            if characteristic > order + 1 {
                return Err(Error::Internal("additive order of 1 exceeds ring order".into()));
            }
        }
        if one == zero {
            characteristic = 1;
        }

        let mut label_index = HashMap::with_capacity(order);
        for (i, l) in labels.iter().enumerate() {
            label_index.entry(l.clone()).or_insert(Elem(i as u16));
        }

        Ok(Arc::new(FiniteRing {
            order,
            add,
            mul,
            neg,
            zero,
            one,
            units,
            commutator_witness,
            characteristic,
            labels,
            label_index,
            recipe,
        }))
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn zero(&self) -> Elem {
        self.zero
    }

    pub fn one(&self) -> Elem {
        self.one
    }

    pub fn recipe(&self) -> &RingRecipe {
        &self.recipe
    }

    /// Additive order of 1 (equals 1 only for the trivial ring).
    pub fn characteristic(&self) -> usize {
        self.characteristic
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        (0..self.order as u16).map(Elem)
    }

    /// Element with the given index. Panics when out of range.
    pub fn element(&self, index: usize) -> Elem {
        assert!(index < self.order, "element index {index} out of range");
        Elem(index as u16)
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        Elem(self.add[a.index() * self.order + b.index()])
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        Elem(self.mul[a.index() * self.order + b.index()])
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        Elem(self.neg[a.index()])
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    /// Whether `a` has a two-sided multiplicative inverse.
    pub fn is_unit(&self, a: Elem) -> bool {
        self.units[a.index()]
    }

    /// The image of the integer `n` under `n -> n * 1`.
    pub fn int_embed(&self, n: u64) -> Elem {
        let mut acc = self.zero;
        for shift in (0..64).rev() {
            acc = self.add(acc, acc);
            if (n >> shift) & 1 == 1 {
                acc = self.add(acc, self.one);
            }
        }
        acc
    }

    pub fn label(&self, a: Elem) -> &str {
        &self.labels[a.index()]
    }

    /// Resolves an element label: exact label match first, then a decimal
    /// integer interpreted as `n * 1`.
    pub fn resolve(&self, label: &str) -> Result<Elem> {
        if let Some(&e) = self.label_index.get(label) {
            return Ok(e);
        }
        if let Ok(n) = label.parse::<u64>() {
            return Ok(self.int_embed(n));
        }
        Err(Error::UnknownLabel(label.to_string()))
    }

    /// `yes` iff multiplication commutes; otherwise the first witness pair.
    pub fn commutativity_witness(&self) -> Option<(Elem, Elem)> {
        self.commutator_witness
    }

    pub fn is_commutative(&self) -> bool {
        self.commutator_witness.is_none()
    }

    /// Commutative with every nonzero element invertible (and 1 != 0).
    pub fn is_field(&self) -> bool {
        self.order >= 2
            && self.is_commutative()
            && self
                .elements()
                .all(|a| a == self.zero || self.is_unit(a))
    }

    /// A zero-divisor pair `(a, b)` with `a, b != 0` and `ab = 0`, if any.
    pub fn zero_divisor_witness(&self) -> Option<(Elem, Elem)> {
        kernels::find_pair(ScanMode::Sequential, self.order, |a, b| {
            a != self.zero.index()
                && b != self.zero.index()
                && self.mul[a * self.order + b] == self.zero.0
        })
        .map(|(a, b)| (Elem(a as u16), Elem(b as u16)))
    }

    /// Re-runs the full exhaustive axiom scan on the stored tables.
    ///
    /// Exposed so the invariant suite (and the benchmarks) can drive the
    /// check with an explicit [`ScanMode`].
    pub fn recheck_axioms(&self, mode: ScanMode) -> Result<()> {
        check_axioms(
            self.order, &self.add, &self.mul, &self.neg, self.zero, self.one, mode, true,
        )
    }

    /// Structural equality of the carrier (tables and distinguished elements).
    pub(crate) fn same_tables(&self, other: &FiniteRing) -> bool {
        self.order == other.order
            && self.zero == other.zero
            && self.one == other.one
            && self.add == other.add
            && self.mul == other.mul
    }
}

/// Pointer-first equality test for shared rings.
pub fn same_ring(a: &Arc<FiniteRing>, b: &Arc<FiniteRing>) -> bool {
    Arc::ptr_eq(a, b) || a.same_tables(b)
}

impl fmt::Debug for FiniteRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteRing")
            .field("order", &self.order)
            .field("recipe", &self.recipe.to_string())
            .finish()
    }
}

fn derive_negation(order: usize, add: &[u16], zero: Elem) -> Result<Vec<u16>> {
    let mut neg = vec![0u16; order];
    for a in 0..order {
        match (0..order).find(|&b| add[a * order + b] == zero.0) {
            Some(b) => neg[a] = b as u16,
            None => {
                return Err(Error::RingAxiom {
                    law: "additive inverse",
                    a,
                    b: a,
                    c: a,
                })
            }
        }
    }
    Ok(neg)
}

#[allow(clippy::too_many_arguments)]
fn check_axioms(
    order: usize,
    add: &[u16],
    mul: &[u16],
    neg: &[u16],
    zero: Elem,
    one: Elem,
    mode: ScanMode,
    triples: bool,
) -> Result<()> {
    let at = |t: &[u16], a: usize, b: usize| t[a * order + b] as usize;

    for a in 0..order {
        if at(add, a, zero.index()) != a || at(add, zero.index(), a) != a {
            return Err(Error::RingAxiom { law: "additive identity", a, b: zero.index(), c: a });
        }
        if at(add, a, neg[a] as usize) != zero.index() {
            return Err(Error::RingAxiom { law: "additive inverse", a, b: neg[a] as usize, c: zero.index() });
        }
        if at(mul, a, one.index()) != a || at(mul, one.index(), a) != a {
            return Err(Error::RingAxiom { law: "multiplicative identity", a, b: one.index(), c: a });
        }
    }

    if let Some((a, b)) = kernels::find_pair(mode, order, |a, b| at(add, a, b) != at(add, b, a)) {
        return Err(Error::RingAxiom { law: "additive commutativity", a, b, c: a });
    }

    if !triples {
        return Ok(());
    }

    if let Some((a, b, c)) = kernels::find_triple(mode, order, |a, b, c| {
        at(add, at(add, a, b), c) != at(add, a, at(add, b, c))
    }) {
        return Err(Error::RingAxiom { law: "additive associativity", a, b, c });
    }
    if let Some((a, b, c)) = kernels::find_triple(mode, order, |a, b, c| {
        at(mul, at(mul, a, b), c) != at(mul, a, at(mul, b, c))
    }) {
        return Err(Error::RingAxiom { law: "multiplicative associativity", a, b, c });
    }
    if let Some((a, b, c)) = kernels::find_triple(mode, order, |a, b, c| {
        at(mul, a, at(add, b, c)) != at(add, at(mul, a, b), at(mul, a, c))
    }) {
        return Err(Error::RingAxiom { law: "left distributivity", a, b, c });
    }
    if let Some((a, b, c)) = kernels::find_triple(mode, order, |a, b, c| {
        at(mul, at(add, a, b), c) != at(add, at(mul, a, c), at(mul, b, c))
    }) {
        return Err(Error::RingAxiom { law: "right distributivity", a, b, c });
    }
    Ok(())
}

/// Two-sided invertibility per element. One-sided asymmetry is reported as an
/// internal error: finite rings are Dedekind-finite, so a one-sided inverse
/// without its mate signals a table bug.
fn compute_units(order: usize, mul: &[u16], one: Elem) -> Result<Vec<bool>> {
    let mut units = vec![false; order];
    for u in 0..order {
        let right = (0..order).find(|&v| mul[u * order + v] == one.0);
        let left = (0..order).find(|&w| mul[w * order + u] == one.0);
        match (right, left) {
            (Some(_), Some(_)) => units[u] = true,
            (None, None) => {}
            _ => {
                return Err(Error::Internal(format!(
                    "element {u} has a one-sided inverse only"
                )))
            }
        }
    }
    Ok(units)
}
