//! Exact arithmetic in the differential polynomial ring `R[x;delta]`.
//!
//! Elements are left-coefficient sequences `a_0 + a_1 x + ... + a_n x^n`;
//! multiplication pushes `x` rightward past coefficients one step at a time
//! via the commutation rule `x r = r x + delta(r)`, which reproduces the
//! binomial expansion `x^k r = sum_j C(k,j) delta^(k-j)(r) x^j`.

mod field;

pub use field::{
    gcd_monic, irreducible_monics, is_irreducible, monic_division, quotient_field, FieldPoly,
};

use crate::derivation::Derivation;
use crate::ring::{quotient_ring, same_ring, Elem, FiniteRing, Ideal, QuotientMap, Sidedness};
use crate::{Error, Result};
use std::fmt;
use std::sync::Arc;

/// The pair `(R, delta)` every skew polynomial lives over.
pub struct OreContext {
    ring: Arc<FiniteRing>,
    delta: Derivation,
}

impl OreContext {
    pub fn new(ring: Arc<FiniteRing>, delta: Derivation) -> Result<Arc<OreContext>> {
        if !same_ring(&ring, delta.ring()) {
            return Err(Error::ContextMismatch);
        }
        Ok(Arc::new(OreContext { ring, delta }))
    }

    pub fn ring(&self) -> &Arc<FiniteRing> {
        &self.ring
    }

    pub fn delta(&self) -> &Derivation {
        &self.delta
    }
}

/// Pointer-first context comparison.
pub fn same_context(a: &Arc<OreContext>, b: &Arc<OreContext>) -> bool {
    Arc::ptr_eq(a, b) || (same_ring(&a.ring, &b.ring) && a.delta.same_map(&b.delta))
}

/// A skew polynomial, stored lowest degree first with no trailing zeros.
#[derive(Clone)]
pub struct OrePoly {
    ctx: Arc<OreContext>,
    coeffs: Vec<Elem>,
}

impl OrePoly {
    pub fn from_coeffs(ctx: &Arc<OreContext>, mut coeffs: Vec<Elem>) -> OrePoly {
        let zero = ctx.ring.zero();
        while coeffs.last() == Some(&zero) {
            coeffs.pop();
        }
        OrePoly { ctx: ctx.clone(), coeffs }
    }

    pub fn zero(ctx: &Arc<OreContext>) -> OrePoly {
        OrePoly { ctx: ctx.clone(), coeffs: Vec::new() }
    }

    pub fn one(ctx: &Arc<OreContext>) -> OrePoly {
        OrePoly::constant(ctx, ctx.ring.one())
    }

    pub fn constant(ctx: &Arc<OreContext>, a: Elem) -> OrePoly {
        OrePoly::from_coeffs(ctx, vec![a])
    }

    pub fn x(ctx: &Arc<OreContext>) -> OrePoly {
        OrePoly::monomial(ctx, ctx.ring.one(), 1)
    }

    /// `a * x^k`.
    pub fn monomial(ctx: &Arc<OreContext>, a: Elem, k: usize) -> OrePoly {
        let mut coeffs = vec![ctx.ring.zero(); k + 1];
        coeffs[k] = a;
        OrePoly::from_coeffs(ctx, coeffs)
    }

    pub fn context(&self) -> &Arc<OreContext> {
        &self.ctx
    }

    pub fn coeffs(&self) -> &[Elem] {
        &self.coeffs
    }

    /// Coefficient of `x^i` (zero beyond the stored length).
    pub fn coeff(&self, i: usize) -> Elem {
        self.coeffs.get(i).copied().unwrap_or(self.ctx.ring.zero())
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last() == Some(&self.ctx.ring.one())
    }

    fn check_context(&self, other: &OrePoly) -> Result<()> {
        if same_context(&self.ctx, &other.ctx) {
            Ok(())
        } else {
            Err(Error::ContextMismatch)
        }
    }

    pub fn add(&self, other: &OrePoly) -> Result<OrePoly> {
        self.check_context(other)?;
        let ring = &self.ctx.ring;
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|i| ring.add(self.coeff(i), other.coeff(i))).collect();
        Ok(OrePoly::from_coeffs(&self.ctx, coeffs))
    }

    pub fn neg(&self) -> OrePoly {
        let ring = &self.ctx.ring;
        let coeffs = self.coeffs.iter().map(|&c| ring.neg(c)).collect();
        OrePoly::from_coeffs(&self.ctx, coeffs)
    }

    pub fn sub(&self, other: &OrePoly) -> Result<OrePoly> {
        self.add(&other.neg())
    }

    /// Left scalar multiple `a * f` (coefficientwise).
    pub fn scale_left(&self, a: Elem) -> OrePoly {
        let ring = &self.ctx.ring;
        let coeffs = self.coeffs.iter().map(|&c| ring.mul(a, c)).collect();
        OrePoly::from_coeffs(&self.ctx, coeffs)
    }

    /// `x * f`: shift up and add the coefficientwise derivative.
    pub fn x_times(&self) -> OrePoly {
        let ring = &self.ctx.ring;
        let delta = &self.ctx.delta;
        let mut coeffs = vec![ring.zero(); self.coeffs.len() + 1];
        for (i, &c) in self.coeffs.iter().enumerate() {
            coeffs[i + 1] = ring.add(coeffs[i + 1], c);
            coeffs[i] = ring.add(coeffs[i], delta.apply(c));
        }
        OrePoly::from_coeffs(&self.ctx, coeffs)
    }

    /// `f * x`: a plain degree shift (x commutes past itself).
    pub fn times_x(&self) -> OrePoly {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = vec![self.ctx.ring.zero()];
        coeffs.extend_from_slice(&self.coeffs);
        OrePoly::from_coeffs(&self.ctx, coeffs)
    }

    /// Product under the commutation rule.
    pub fn mul(&self, other: &OrePoly) -> Result<OrePoly> {
        self.check_context(other)?;
        let mut acc = OrePoly::zero(&self.ctx);
        let mut shifted = other.clone(); // x^i * other
        for (i, &a) in self.coeffs.iter().enumerate() {
            if i > 0 {
                shifted = shifted.x_times();
            }
            if a != self.ctx.ring.zero() {
                acc = acc.add(&shifted.scale_left(a))?;
            }
        }
        Ok(acc)
    }

    /// `f * r` for a ring element (a product with the constant polynomial).
    pub fn mul_const_right(&self, r: Elem) -> OrePoly {
        self.mul(&OrePoly::constant(&self.ctx, r))
            .expect("same context by construction")
    }
}

impl PartialEq for OrePoly {
    fn eq(&self, other: &Self) -> bool {
        same_context(&self.ctx, &other.ctx) && self.coeffs == other.coeffs
    }
}

impl Eq for OrePoly {}

/// Formats a coefficient sequence highest degree first with labels from the
/// carrier ring: `x^2+e12*x+1`.
pub(crate) fn format_poly(ring: &FiniteRing, coeffs: &[Elem], f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if coeffs.is_empty() {
        return write!(f, "0");
    }
    let mut first = true;
    for (i, &c) in coeffs.iter().enumerate().rev() {
        if c == ring.zero() {
            continue;
        }
        if !first {
            write!(f, "+")?;
        }
        first = false;
        let is_one = c == ring.one();
        match (i, is_one) {
            (0, _) => write!(f, "{}", ring.label(c))?,
            (1, true) => write!(f, "x")?,
            (1, false) => write!(f, "{}*x", ring.label(c))?,
            (_, true) => write!(f, "x^{i}")?,
            (_, false) => write!(f, "{}*x^{i}", ring.label(c))?,
        }
    }
    Ok(())
}

impl fmt::Display for OrePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        format_poly(&self.ctx.ring, &self.coeffs, f)
    }
}

impl fmt::Debug for OrePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "OrePoly({self})")
    }
}

/// The coefficientwise projection `Phi_I : R[x;delta] -> (R/I)[x]` for an
/// eligible ideal (two-sided, field quotient, absorbing the image of delta).
///
/// Its kernel is exactly the set of polynomials with all coefficients in `I`.
#[derive(Clone)]
pub struct PhiMap {
    ctx: Arc<OreContext>,
    ideal: Ideal,
    qm: QuotientMap,
}

impl fmt::Debug for PhiMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PhiMap(I={{{}}})", self.ideal.labels().join(","))
    }
}

impl PhiMap {
    /// Validated constructor for ideals in the eligible set.
    pub fn new(ctx: &Arc<OreContext>, ideal: Ideal) -> Result<PhiMap> {
        let ring = &ctx.ring;
        if !ring.elements().all(|r| ideal.contains(ctx.delta.apply(r))) {
            return Err(Error::PhiIneligible {
                reason: "ideal does not absorb the image of delta",
            });
        }
        PhiMap::raw(ctx, ideal)
    }

    /// Constructor that skips the delta-absorption requirement. The result is
    /// a well-defined coefficientwise projection but not necessarily a ring
    /// morphism; used to build deliberate negative controls.
    pub fn raw(ctx: &Arc<OreContext>, ideal: Ideal) -> Result<PhiMap> {
        if ideal.sidedness() != Sidedness::TwoSided || !ideal.is_proper() {
            return Err(Error::PhiIneligible {
                reason: "ideal must be proper and two-sided",
            });
        }
        let qm = quotient_ring(&ctx.ring, &ideal)?;
        if !qm.target().is_field() {
            return Err(Error::PhiIneligible {
                reason: "quotient by the ideal is not a field",
            });
        }
        Ok(PhiMap { ctx: ctx.clone(), ideal, qm })
    }

    pub fn context(&self) -> &Arc<OreContext> {
        &self.ctx
    }

    pub fn ideal(&self) -> &Ideal {
        &self.ideal
    }

    pub fn field(&self) -> &Arc<FiniteRing> {
        self.qm.target()
    }

    pub fn quotient(&self) -> &QuotientMap {
        &self.qm
    }

    /// Coefficientwise image of a skew polynomial.
    pub fn apply(&self, f: &OrePoly) -> Result<FieldPoly> {
        if !same_context(&self.ctx, &f.ctx) {
            return Err(Error::ContextMismatch);
        }
        let coeffs = f.coeffs.iter().map(|&c| self.qm.apply(c)).collect();
        FieldPoly::from_coeffs(self.field(), coeffs)
    }

    /// A monic preimage of a monic field polynomial: canonical coset
    /// representatives below the top, the literal `1` on top.
    pub fn lift_monic(&self, p: &FieldPoly) -> Result<OrePoly> {
        if !p.is_monic() {
            return Err(Error::NotMonic);
        }
        let deg = p.degree().expect("monic polynomials are nonzero");
        let ring = &self.ctx.ring;
        let mut coeffs: Vec<Elem> = p.coeffs().iter().map(|&c| self.qm.rep(c)).collect();
        coeffs[deg] = ring.one();
        Ok(OrePoly::from_coeffs(&self.ctx, coeffs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::derivation::{inner_derivation, validate_derivation, zero_derivation};
    use crate::ring::{ideal_closure, make_ring, RingRecipe};
    use crate::Limits;

    fn ut2_ctx() -> Arc<OreContext> {
        let r = make_ring(&RingRecipe::triangular(2, RingRecipe::gf(2, 1)), &Limits::default())
            .unwrap();
        let d = inner_derivation(&r, r.resolve("e12").unwrap());
        OreContext::new(r, d).unwrap()
    }

    fn t2_ctx() -> Arc<OreContext> {
        let r = make_ring(&RingRecipe::poly_quot(2, vec![0, 0, 1]), &Limits::default()).unwrap();
        let t = r.resolve("t").unwrap();
        let image: Vec<Elem> = r
            .elements()
            .map(|e| if e == t || e == r.add(t, r.one()) { r.one() } else { r.zero() })
            .collect();
        let d = validate_derivation(&r, image).unwrap();
        OreContext::new(r, d).unwrap()
    }

    fn zmod4_ctx() -> Arc<OreContext> {
        let r = make_ring(&RingRecipe::zmod(4), &Limits::default()).unwrap();
        let d = zero_derivation(&r);
        OreContext::new(r, d).unwrap()
    }

    #[test]
    fn addition_in_characteristic_two() {
        let ctx = t2_ctx();
        let one_plus_x = OrePoly::one(&ctx).add(&OrePoly::x(&ctx)).unwrap();
        assert!(one_plus_x.add(&one_plus_x).unwrap().is_zero());
    }

    #[test]
    fn addition_wraps_in_zmod4() {
        let ctx = zmod4_ctx();
        let r = ctx.ring().clone();
        let f = OrePoly::monomial(&ctx, r.element(2), 1);
        assert!(f.add(&f).unwrap().is_zero());
    }

    #[test]
    fn commutation_rule_on_triangular() {
        // x * e11 = e11 x + e12
        let ctx = ut2_ctx();
        let r = ctx.ring().clone();
        let e11 = r.resolve("e11").unwrap();
        let e12 = r.resolve("e12").unwrap();
        let lhs = OrePoly::x(&ctx).mul(&OrePoly::constant(&ctx, e11)).unwrap();
        let expected = OrePoly::from_coeffs(&ctx, vec![e12, e11]);
        assert_eq!(lhs, expected);
    }

    #[test]
    fn commutation_rule_on_t2() {
        // x * t = t x + 1
        let ctx = t2_ctx();
        let r = ctx.ring().clone();
        let t = r.resolve("t").unwrap();
        let lhs = OrePoly::x(&ctx).mul(&OrePoly::constant(&ctx, t)).unwrap();
        let expected = OrePoly::from_coeffs(&ctx, vec![r.one(), t]);
        assert_eq!(lhs, expected);
    }

    #[test]
    fn ordinary_square_over_zmod4() {
        let ctx = zmod4_ctx();
        let r = ctx.ring().clone();
        let f = OrePoly::one(&ctx).add(&OrePoly::x(&ctx)).unwrap();
        let sq = f.mul(&f).unwrap();
        assert_eq!(sq.coeffs(), &[r.element(1), r.element(2), r.element(1)]);
    }

    #[test]
    fn binomial_expansion_matches_iterated_commutation() {
        // x^k r = sum_j C(k,j) delta^(k-j)(r) x^j
        for ctx in [ut2_ctx(), t2_ctx(), zmod4_ctx()] {
            let ring = ctx.ring().clone();
            let delta = ctx.delta().clone();
            let ch = ring.characteristic();
            for k in 0..=4usize {
                // Pascal row mod the characteristic
                let mut row = vec![1u64];
                for _ in 0..k {
                    let mut next = vec![1u64];
                    for w in row.windows(2) {
                        next.push((w[0] + w[1]) % ch as u64);
                    }
                    next.push(1);
                    row = next;
                }
                for r in ring.elements() {
                    let via_rule = {
                        let mut h = OrePoly::constant(&ctx, r);
                        for _ in 0..k {
                            h = h.x_times();
                        }
                        h
                    };
                    let via_binomial = {
                        let mut coeffs = vec![ring.zero(); k + 1];
                        for (j, c) in coeffs.iter_mut().enumerate() {
                            let scalar = ring.int_embed(row[j]);
                            *c = ring.mul(scalar, delta.apply_iter(r, k - j));
                        }
                        OrePoly::from_coeffs(&ctx, coeffs)
                    };
                    assert_eq!(via_rule, via_binomial);
                }
            }
        }
    }

    #[test]
    fn degree_law() {
        let ctx = ut2_ctx();
        let r = ctx.ring().clone();
        let e12 = r.resolve("e12").unwrap();
        let f = OrePoly::monomial(&ctx, e12, 1);
        // e12 * e12 = 0, so the leading product vanishes
        let sq = f.mul(&f).unwrap();
        assert!(sq.degree() < Some(2));
        let g = OrePoly::x(&ctx);
        assert_eq!(g.mul(&g).unwrap().degree(), Some(2));
    }

    #[test]
    fn phi_projects_coefficients() {
        let ctx = ut2_ctx();
        let r = ctx.ring().clone();
        let e11 = r.resolve("e11").unwrap();
        let e12 = r.resolve("e12").unwrap();
        // the ideal with vanishing (1,1) entry
        let i = ideal_closure(&r, &[e12, r.resolve("e22").unwrap()], Sidedness::TwoSided);
        assert_eq!(i.len(), 4);
        let phi = PhiMap::new(&ctx, i).unwrap();
        let f = OrePoly::from_coeffs(&ctx, vec![e12, e11]); // e11 x + e12
        let img = phi.apply(&f).unwrap();
        // e12 dies, e11 maps to the unit class: the image is x
        assert_eq!(img.degree(), Some(1));
        assert!(img.is_monic());
        assert_eq!(img.coeff(0), phi.field().zero());
    }

    #[test]
    fn phi_kernel_is_coefficientwise() {
        let ctx = zmod4_ctx();
        let r = ctx.ring().clone();
        let i = ideal_closure(&r, &[r.element(2)], Sidedness::TwoSided);
        let phi = PhiMap::new(&ctx, i.clone()).unwrap();
        let in_kernel = OrePoly::from_coeffs(&ctx, vec![r.element(2), r.element(0), r.element(2)]);
        assert!(phi.apply(&in_kernel).unwrap().is_zero());
        let outside = OrePoly::from_coeffs(&ctx, vec![r.element(2), r.element(1)]);
        assert!(!phi.apply(&outside).unwrap().is_zero());
    }

    #[test]
    fn phi_rejects_non_absorbing_ideal() {
        let ctx = t2_ctx();
        let r = ctx.ring().clone();
        let i = ideal_closure(&r, &[r.resolve("t").unwrap()], Sidedness::TwoSided);
        let err = PhiMap::new(&ctx, i.clone()).unwrap_err();
        assert!(matches!(err, Error::PhiIneligible { .. }));
        // the raw constructor accepts it (negative-control path)
        assert!(PhiMap::raw(&ctx, i).is_ok());
    }

    #[test]
    fn context_mismatch_is_reported() {
        let a = zmod4_ctx();
        let b = ut2_ctx();
        let f = OrePoly::one(&a);
        let g = OrePoly::one(&b);
        assert!(matches!(f.add(&g), Err(Error::ContextMismatch)));
        assert!(matches!(f.mul(&g), Err(Error::ContextMismatch)));
    }
}
