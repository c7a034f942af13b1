//! Differential polynomial rings in several non-commuting indeterminates.
//!
//! Elements are word-indexed coefficient maps over the free monoid on the
//! indeterminates; multiplication pushes coefficients leftward one letter at
//! a time via `x_i a = a x_i + delta_i(a)`. The corner decomposition splits a
//! polynomial into the part supported on a sub-alphabet and the complement,
//! and the closure report measures whether products respect the split.

use crate::analyzer::{self, Verdict};
use crate::derivation::Derivation;
use crate::ore::{OreContext, OrePoly};
use crate::ring::{same_ring, Elem, FiniteRing};
use crate::{Error, Limits, Result};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

/// The data `(R, D)` for `R[X;D]`: one derivation per indeterminate.
pub struct MultiContext {
    ring: Arc<FiniteRing>,
    derivations: Vec<Derivation>,
}

impl MultiContext {
    pub fn new(ring: Arc<FiniteRing>, derivations: Vec<Derivation>) -> Result<Arc<MultiContext>> {
        if derivations.is_empty() {
            return Err(Error::MalformedTables {
                reason: "at least one indeterminate is required".into(),
            });
        }
        if !derivations.iter().all(|d| same_ring(&ring, d.ring())) {
            return Err(Error::ContextMismatch);
        }
        Ok(Arc::new(MultiContext { ring, derivations }))
    }

    pub fn ring(&self) -> &Arc<FiniteRing> {
        &self.ring
    }

    pub fn vars(&self) -> usize {
        self.derivations.len()
    }

    pub fn derivation(&self, i: usize) -> &Derivation {
        &self.derivations[i]
    }
}

fn same_multi_context(a: &Arc<MultiContext>, b: &Arc<MultiContext>) -> bool {
    Arc::ptr_eq(a, b)
        || (same_ring(&a.ring, &b.ring)
            && a.derivations.len() == b.derivations.len()
            && a.derivations.iter().zip(&b.derivations).all(|(x, y)| x.same_map(y)))
}

/// A monomial word in the free monoid on the indeterminates (letter indices
/// are 0-based; the empty word is the trivial monomial).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(Vec<u8>);

impl Word {
    pub fn empty() -> Word {
        Word(Vec::new())
    }

    pub fn from_letters(letters: Vec<u8>) -> Word {
        Word(letters)
    }

    pub fn letters(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = self.0.clone();
        letters.extend_from_slice(&other.0);
        Word(letters)
    }

    /// All letters drawn from the sub-alphabet.
    pub fn is_over(&self, in_j: &[bool]) -> bool {
        self.0.iter().all(|&l| in_j[l as usize])
    }

    /// At least one letter outside the sub-alphabet.
    pub fn has_outside_letter(&self, in_j: &[bool]) -> bool {
        self.0.iter().any(|&l| !in_j[l as usize])
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for &l in &self.0 {
            write!(f, "x{}", l + 1)?;
        }
        Ok(())
    }
}

/// A multivariate differential polynomial: a finite map from words to
/// nonzero coefficients.
#[derive(Clone)]
pub struct MPoly {
    ctx: Arc<MultiContext>,
    terms: BTreeMap<Word, Elem>,
}

impl MPoly {
    pub fn zero(ctx: &Arc<MultiContext>) -> MPoly {
        MPoly { ctx: ctx.clone(), terms: BTreeMap::new() }
    }

    pub fn constant(ctx: &Arc<MultiContext>, a: Elem) -> MPoly {
        MPoly::monomial(ctx, a, Word::empty())
    }

    pub fn one(ctx: &Arc<MultiContext>) -> MPoly {
        MPoly::constant(ctx, ctx.ring.one())
    }

    pub fn var(ctx: &Arc<MultiContext>, i: u8) -> MPoly {
        MPoly::monomial(ctx, ctx.ring.one(), Word::from_letters(vec![i]))
    }

    pub fn monomial(ctx: &Arc<MultiContext>, a: Elem, word: Word) -> MPoly {
        let mut terms = BTreeMap::new();
        if a != ctx.ring.zero() {
            terms.insert(word, a);
        }
        MPoly { ctx: ctx.clone(), terms }
    }

    pub fn context(&self) -> &Arc<MultiContext> {
        &self.ctx
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The set of words occurring in the polynomial.
    pub fn support(&self) -> Vec<Word> {
        self.terms.keys().cloned().collect()
    }

    pub fn coeff(&self, w: &Word) -> Elem {
        self.terms.get(w).copied().unwrap_or(self.ctx.ring.zero())
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, Elem)> {
        self.terms.iter().map(|(w, &c)| (w, c))
    }

    /// Total degree (length of the longest word); `None` for zero.
    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().map(Word::len).max()
    }

    fn check_context(&self, other: &MPoly) -> Result<()> {
        if same_multi_context(&self.ctx, &other.ctx) {
            Ok(())
        } else {
            Err(Error::ContextMismatch)
        }
    }

    fn add_term(&mut self, w: Word, c: Elem) {
        let ring = &self.ctx.ring;
        let entry = self.terms.entry(w);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                if c != ring.zero() {
                    v.insert(c);
                }
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = ring.add(*o.get(), c);
                if sum == ring.zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &MPoly) -> Result<MPoly> {
        self.check_context(other)?;
        let mut out = self.clone();
        for (w, c) in other.terms() {
            out.add_term(w.clone(), c);
        }
        Ok(out)
    }

    pub fn neg(&self) -> MPoly {
        let ring = &self.ctx.ring;
        let terms = self.terms.iter().map(|(w, &c)| (w.clone(), ring.neg(c))).collect();
        MPoly { ctx: self.ctx.clone(), terms }
    }

    pub fn sub(&self, other: &MPoly) -> Result<MPoly> {
        self.add(&other.neg())
    }

    /// Product under the commutation rule `x_i a = a x_i + delta_i(a)`.
    pub fn mul(&self, other: &MPoly) -> Result<MPoly> {
        self.check_context(other)?;
        let ring = &self.ctx.ring;
        let mut out = MPoly::zero(&self.ctx);
        for (w1, a) in self.terms() {
            for (w2, b) in other.terms() {
                // w1 * b, expanded by pushing b leftward through w1
                for (u, c) in word_times_coeff(&self.ctx, w1, b) {
                    let coeff = ring.mul(a, c);
                    if coeff != ring.zero() {
                        out.add_term(u.concat(w2), coeff);
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Expands `w * b` as a sum of `c * u` terms, peeling the last letter:
/// `(w' x_i) b = (w' b) x_i + w' delta_i(b)`.
fn word_times_coeff(ctx: &Arc<MultiContext>, w: &Word, b: Elem) -> Vec<(Word, Elem)> {
    let ring = &ctx.ring;
    if b == ring.zero() {
        return Vec::new();
    }
    let letters = w.letters();
    match letters.split_last() {
        None => vec![(Word::empty(), b)],
        Some((&last, prefix)) => {
            let prefix = Word::from_letters(prefix.to_vec());
            let mut out = Vec::new();
            for (u, c) in word_times_coeff(ctx, &prefix, b) {
                let mut with_letter = u.letters().to_vec();
                with_letter.push(last);
                out.push((Word::from_letters(with_letter), c));
            }
            let db = ctx.derivations[last as usize].apply(b);
            if db != ring.zero() {
                out.extend(word_times_coeff(ctx, &prefix, db));
            }
            out
        }
    }
}

impl PartialEq for MPoly {
    fn eq(&self, other: &Self) -> bool {
        same_multi_context(&self.ctx, &other.ctx) && self.terms == other.terms
    }
}

impl Eq for MPoly {}

impl fmt::Display for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let ring = &self.ctx.ring;
        let mut first = true;
        for (w, c) in self.terms() {
            if !first {
                write!(f, "+")?;
            }
            first = false;
            if w.is_empty() {
                write!(f, "{}", ring.label(c))?;
            } else if c == ring.one() {
                write!(f, "{w}")?;
            } else {
                write!(f, "{}*{w}", ring.label(c))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MPoly({self})")
    }
}

/// Which convention defines the complement of the corner subring.
///
/// The corrected convention keeps the constants on the subring side, so the
/// two summands intersect trivially; the literal convention takes the
/// complement to be everything whose support avoids the nontrivial
/// sub-alphabet words, which leaves the constants in both summands.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ComplementConvention {
    #[default]
    ConstantsInSubring,
    Literal,
}

/// The additive split of a polynomial along a sub-alphabet.
pub struct CornerSplit {
    /// Terms whose words use only sub-alphabet letters (including the
    /// constants).
    pub subring: MPoly,
    /// Terms with at least one outside letter.
    pub complement: MPoly,
}

fn membership_mask(ctx: &MultiContext, j: &[usize]) -> Vec<bool> {
    let mut in_j = vec![false; ctx.vars()];
    for &i in j {
        if i < in_j.len() {
            in_j[i] = true;
        }
    }
    in_j
}

/// Splits `f` into the part supported on the sub-alphabet `J` and the rest.
/// The split is additive and unique; the two supports are disjoint.
pub fn corner_split(f: &MPoly, j: &[usize]) -> CornerSplit {
    let in_j = membership_mask(&f.ctx, j);
    let mut subring = MPoly::zero(&f.ctx);
    let mut complement = MPoly::zero(&f.ctx);
    for (w, c) in f.terms() {
        if w.is_over(&in_j) {
            subring.add_term(w.clone(), c);
        } else {
            complement.add_term(w.clone(), c);
        }
    }
    CornerSplit { subring, complement }
}

/// One direction of the closure probe.
pub struct DirectionOutcome {
    pub pass: bool,
    pub witness: Option<CornerWitness>,
}

/// A product that left the complement, with the escaping part isolated.
pub struct CornerWitness {
    pub left: MPoly,
    pub right: MPoly,
    pub product: MPoly,
    pub escape: MPoly,
}

impl fmt::Display for CornerWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({})*({}) = {} with escaping part {}",
            self.left, self.right, self.product, self.escape
        )
    }
}

/// Closure report for the corner decomposition along `J`.
pub struct CornerReport {
    /// Does `S_J * C` stay inside `C`?
    pub subring_times_complement: DirectionOutcome,
    /// Does `C * S_J` stay inside `C`?
    pub complement_times_subring: DirectionOutcome,
}

/// Words of length at most `d`, shortest first, lexicographic within a
/// length.
fn words_up_to(vars: usize, d: usize) -> Vec<Word> {
    let mut out = vec![Word::empty()];
    let mut layer = vec![Word::empty()];
    for _ in 0..d {
        let mut next = Vec::new();
        for w in &layer {
            for l in 0..vars as u8 {
                let mut letters = w.letters().to_vec();
                letters.push(l);
                next.push(Word::from_letters(letters));
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Probes both closure directions over the spanning family of monomials
/// `a * w` with `|w| <= d`. With all derivations zero both directions pass
/// (concatenation cannot erase an outside letter); with a nonzero derivation
/// the `C * S_J` direction can pick up sub-alphabet words from the
/// delta-corrections, and the witness records the first such product.
pub fn corner_closure_report(
    ctx: &Arc<MultiContext>,
    j: &[usize],
    d: usize,
    convention: ComplementConvention,
    limits: &Limits,
) -> Result<CornerReport> {
    if d > limits.corner_degree_cap {
        return Err(Error::DegreeCapExceeded { requested: d, cap: limits.corner_degree_cap });
    }
    let ring = ctx.ring();
    let in_j = membership_mask(ctx, j);

    let in_complement = |f: &MPoly| -> bool {
        match convention {
            ComplementConvention::ConstantsInSubring => {
                f.terms().all(|(w, _)| w.has_outside_letter(&in_j))
            }
            // literal: support must avoid the nontrivial sub-alphabet words
            ComplementConvention::Literal => {
                f.terms().all(|(w, _)| w.is_empty() || !w.is_over(&in_j))
            }
        }
    };
    let escape_part = |f: &MPoly| -> MPoly {
        let mut escape = MPoly::zero(ctx);
        for (w, c) in f.terms() {
            let escapes = match convention {
                ComplementConvention::ConstantsInSubring => !w.has_outside_letter(&in_j),
                ComplementConvention::Literal => !w.is_empty() && w.is_over(&in_j),
            };
            if escapes {
                escape.add_term(w.clone(), c);
            }
        }
        escape
    };

    let words = words_up_to(ctx.vars(), d);
    let mut subring_family = Vec::new();
    let mut complement_family = Vec::new();
    for w in &words {
        let in_subring = w.is_over(&in_j);
        let in_comp = match convention {
            ComplementConvention::ConstantsInSubring => w.has_outside_letter(&in_j),
            ComplementConvention::Literal => w.is_empty() || !w.is_over(&in_j),
        };
        for a in ring.elements() {
            if a == ring.zero() {
                continue;
            }
            if in_subring {
                subring_family.push(MPoly::monomial(ctx, a, w.clone()));
            }
            if in_comp {
                complement_family.push(MPoly::monomial(ctx, a, w.clone()));
            }
        }
    }

    let run = |lefts: &[MPoly], rights: &[MPoly]| -> Result<DirectionOutcome> {
        for l in lefts {
            for r in rights {
                let product = l.mul(r)?;
                if !in_complement(&product) {
                    return Ok(DirectionOutcome {
                        pass: false,
                        witness: Some(CornerWitness {
                            left: l.clone(),
                            right: r.clone(),
                            escape: escape_part(&product),
                            product,
                        }),
                    });
                }
            }
        }
        Ok(DirectionOutcome { pass: true, witness: None })
    };

    Ok(CornerReport {
        subring_times_complement: run(&subring_family, &complement_family)?,
        complement_times_subring: run(&complement_family, &subring_family)?,
    })
}

/// The quasi-duo gate for several indeterminates: with two or more variables
/// the answer is `no` outright; with exactly one the decision is delegated to
/// the univariate analyzer.
pub enum MultivarVerdict {
    SeveralIndeterminates { vars: usize },
    Single(Verdict),
}

impl MultivarVerdict {
    pub fn is_quasi_duo(&self) -> bool {
        match self {
            MultivarVerdict::SeveralIndeterminates { .. } => false,
            MultivarVerdict::Single(v) => v.quasi_duo,
        }
    }
}

pub fn multivar_quasi_duo(ctx: &Arc<MultiContext>, limits: &Limits) -> Result<MultivarVerdict> {
    if ctx.vars() >= 2 {
        return Ok(MultivarVerdict::SeveralIndeterminates { vars: ctx.vars() });
    }
    let ore = OreContext::new(ctx.ring.clone(), ctx.derivations[0].clone())?;
    Ok(MultivarVerdict::Single(analyzer::quasi_duo(&ore, limits)?))
}

/// The univariate image of an `m = 1` polynomial under `x_1^k -> x^k`.
pub fn to_ore(f: &MPoly, ore_ctx: &Arc<OreContext>) -> Result<OrePoly> {
    if f.ctx.vars() != 1 {
        return Err(Error::ContextMismatch);
    }
    let ring = ore_ctx.ring();
    let deg = f.degree().map_or(0, |d| d);
    let mut coeffs = vec![ring.zero(); deg + 1];
    for (w, c) in f.terms() {
        coeffs[w.len()] = c;
    }
    Ok(OrePoly::from_coeffs(ore_ctx, coeffs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::derivation::{inner_derivation, zero_derivation};
    use crate::ring::{make_ring, RingRecipe};

    fn ut2() -> Arc<FiniteRing> {
        make_ring(&RingRecipe::triangular(2, RingRecipe::gf(2, 1)), &Limits::default()).unwrap()
    }

    /// Two variables over UT2(GF(2)): delta_1 = 0, delta_2 = inner(e12).
    fn mixed_ctx() -> Arc<MultiContext> {
        let r = ut2();
        let d2 = inner_derivation(&r, r.resolve("e12").unwrap());
        MultiContext::new(r.clone(), vec![zero_derivation(&r), d2]).unwrap()
    }

    fn free_ctx(vars: usize) -> Arc<MultiContext> {
        let r = make_ring(&RingRecipe::gf(2, 1), &Limits::default()).unwrap();
        let ds = (0..vars).map(|_| zero_derivation(&r)).collect();
        MultiContext::new(r, ds).unwrap()
    }

    #[test]
    fn free_multiplication_concatenates() {
        let ctx = free_ctx(2);
        let x1 = MPoly::var(&ctx, 0);
        let x2 = MPoly::var(&ctx, 1);
        let p = x2.mul(&x1).unwrap();
        assert_eq!(p.support(), vec![Word::from_letters(vec![1, 0])]);
        assert_eq!(p.to_string(), "x2x1");
    }

    #[test]
    fn delta_correction_appears() {
        // x2 * (e11 x1) = e11 x2 x1 + e12 x1
        let ctx = mixed_ctx();
        let r = ctx.ring().clone();
        let e11 = r.resolve("e11").unwrap();
        let e12 = r.resolve("e12").unwrap();
        let f = MPoly::var(&ctx, 1);
        let g = MPoly::monomial(&ctx, e11, Word::from_letters(vec![0]));
        let p = f.mul(&g).unwrap();
        assert_eq!(p.coeff(&Word::from_letters(vec![1, 0])), e11);
        assert_eq!(p.coeff(&Word::from_letters(vec![0])), e12);
        assert_eq!(p.support().len(), 2);
    }

    #[test]
    fn support_examples() {
        let ctx = free_ctx(2);
        assert!(MPoly::zero(&ctx).support().is_empty());
        let r = ctx.ring().clone();
        let f = MPoly::one(&ctx)
            .add(&MPoly::var(&ctx, 0))
            .unwrap()
            .add(&MPoly::monomial(&ctx, r.one(), Word::from_letters(vec![1, 0])))
            .unwrap();
        assert_eq!(
            f.support(),
            vec![Word::empty(), Word::from_letters(vec![0]), Word::from_letters(vec![1, 0])]
        );
    }

    #[test]
    fn corner_split_is_a_direct_sum() {
        let ctx = mixed_ctx();
        let r = ctx.ring().clone();
        let e11 = r.resolve("e11").unwrap();
        let f = MPoly::constant(&ctx, e11)
            .add(&MPoly::var(&ctx, 0))
            .unwrap()
            .add(&MPoly::monomial(&ctx, r.one(), Word::from_letters(vec![1, 0])))
            .unwrap();
        let split = corner_split(&f, &[0]);
        assert_eq!(split.subring.support().len(), 2); // constant and x1
        assert_eq!(split.complement.support(), vec![Word::from_letters(vec![1, 0])]);
        assert_eq!(split.subring.add(&split.complement).unwrap(), f);
        // disjoint supports
        for w in split.subring.support() {
            assert_eq!(split.complement.coeff(&w), r.zero());
        }
    }

    #[test]
    fn split_of_inside_polynomial_has_zero_complement() {
        let ctx = free_ctx(2);
        let f = MPoly::one(&ctx).add(&MPoly::var(&ctx, 0)).unwrap();
        let split = corner_split(&f, &[0]);
        assert!(split.complement.is_zero());
        assert_eq!(split.subring, f);
    }

    #[test]
    fn free_case_closure_passes() {
        let ctx = free_ctx(2);
        for j in [vec![0usize], vec![1], vec![0, 1]] {
            let report = corner_closure_report(
                &ctx,
                &j,
                3,
                ComplementConvention::ConstantsInSubring,
                &Limits::default(),
            )
            .unwrap();
            assert!(report.subring_times_complement.pass);
            assert!(report.complement_times_subring.pass);
        }
    }

    #[test]
    fn literal_convention_fails_even_in_the_free_case() {
        // constants sit in both summands under the literal reading, so
        // multiplying the constant 1 in C by x1 in S_J escapes
        let ctx = free_ctx(2);
        let report = corner_closure_report(
            &ctx,
            &[0],
            2,
            ComplementConvention::Literal,
            &Limits::default(),
        )
        .unwrap();
        assert!(!report.complement_times_subring.pass);
    }

    #[test]
    fn delta_correction_breaks_complement_closure() {
        let ctx = mixed_ctx();
        let report = corner_closure_report(
            &ctx,
            &[0],
            2,
            ComplementConvention::ConstantsInSubring,
            &Limits::default(),
        )
        .unwrap();
        // S_J * C always stays in C: corrections only shorten the S_J word
        assert!(report.subring_times_complement.pass);
        let dir = report.complement_times_subring;
        assert!(!dir.pass);
        let w = dir.witness.unwrap();
        assert!(!w.escape.is_zero());

        // the documented probe: x2 * (e11 x1) picks up e12 x1 inside X_J+
        let r = ctx.ring().clone();
        let e11 = r.resolve("e11").unwrap();
        let product = MPoly::var(&ctx, 1)
            .mul(&MPoly::monomial(&ctx, e11, Word::from_letters(vec![0])))
            .unwrap();
        let split = corner_split(&product, &[0]);
        assert_eq!(split.subring.to_string(), "e12*x1");
    }

    #[test]
    fn several_indeterminates_gate() {
        let ctx = free_ctx(2);
        let v = multivar_quasi_duo(&ctx, &Limits::default()).unwrap();
        assert!(matches!(v, MultivarVerdict::SeveralIndeterminates { vars: 2 }));

        let r = ut2();
        let ds = vec![
            zero_derivation(&r),
            zero_derivation(&r),
            inner_derivation(&r, r.resolve("e12").unwrap()),
        ];
        let ctx3 = MultiContext::new(r, ds).unwrap();
        assert!(!multivar_quasi_duo(&ctx3, &Limits::default()).unwrap().is_quasi_duo());
    }

    #[test]
    fn single_variable_delegates() {
        let r = make_ring(&RingRecipe::gf(5, 1), &Limits::default()).unwrap();
        let ctx = MultiContext::new(r.clone(), vec![zero_derivation(&r)]).unwrap();
        let v = multivar_quasi_duo(&ctx, &Limits::default()).unwrap();
        assert!(v.is_quasi_duo());
    }

    #[test]
    fn one_variable_arithmetic_matches_ore() {
        let r = ut2();
        let d = inner_derivation(&r, r.resolve("e12").unwrap());
        let mctx = MultiContext::new(r.clone(), vec![d.clone()]).unwrap();
        let octx = OreContext::new(r.clone(), d).unwrap();
        // exhaustive over monomial pairs of degree <= 2
        for a in r.elements() {
            for i in 0..=2usize {
                for b in r.elements() {
                    for j in 0..=2usize {
                        let fm = MPoly::monomial(&mctx, a, Word::from_letters(vec![0; i]));
                        let gm = MPoly::monomial(&mctx, b, Word::from_letters(vec![0; j]));
                        let lhs = to_ore(&fm.mul(&gm).unwrap(), &octx).unwrap();
                        let rhs = OrePoly::monomial(&octx, a, i)
                            .mul(&OrePoly::monomial(&octx, b, j))
                            .unwrap();
                        assert_eq!(lhs, rhs);
                    }
                }
            }
        }
    }
}
