//! Ordinary polynomial arithmetic over finite field carriers.
//!
//! These are the polynomials on the codomain side of the coefficient
//! projection: quotients `R/I` are fields there, so Euclidean division and
//! gcds are available.

use crate::ring::{same_ring, Elem, FiniteRing, RingRecipe};
use crate::{Error, Limits, Result};
use std::fmt;
use std::sync::Arc;

/// A polynomial over a finite field carrier, lowest degree first, normalized.
#[derive(Clone)]
pub struct FieldPoly {
    field: Arc<FiniteRing>,
    coeffs: Vec<Elem>,
}

impl FieldPoly {
    pub fn from_coeffs(field: &Arc<FiniteRing>, mut coeffs: Vec<Elem>) -> Result<FieldPoly> {
        if !field.is_field() {
            return Err(Error::NotAField(field.recipe().to_string()));
        }
        while coeffs.last() == Some(&field.zero()) {
            coeffs.pop();
        }
        Ok(FieldPoly { field: field.clone(), coeffs })
    }

    pub fn zero(field: &Arc<FiniteRing>) -> Result<FieldPoly> {
        FieldPoly::from_coeffs(field, Vec::new())
    }

    pub fn one(field: &Arc<FiniteRing>) -> Result<FieldPoly> {
        let one = field.one();
        FieldPoly::from_coeffs(field, vec![one])
    }

    pub fn x(field: &Arc<FiniteRing>) -> Result<FieldPoly> {
        let (zero, one) = (field.zero(), field.one());
        FieldPoly::from_coeffs(field, vec![zero, one])
    }

    pub fn field(&self) -> &Arc<FiniteRing> {
        &self.field
    }

    pub fn coeffs(&self) -> &[Elem] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Elem {
        self.coeffs.get(i).copied().unwrap_or(self.field.zero())
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last() == Some(&self.field.one())
    }

    pub fn add(&self, other: &FieldPoly) -> FieldPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|i| self.field.add(self.coeff(i), other.coeff(i)))
            .collect();
        FieldPoly::from_coeffs(&self.field, coeffs).expect("carrier already validated")
    }

    pub fn neg(&self) -> FieldPoly {
        let coeffs = self.coeffs.iter().map(|&c| self.field.neg(c)).collect();
        FieldPoly::from_coeffs(&self.field, coeffs).expect("carrier already validated")
    }

    pub fn sub(&self, other: &FieldPoly) -> FieldPoly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &FieldPoly) -> FieldPoly {
        if self.is_zero() || other.is_zero() {
            return FieldPoly { field: self.field.clone(), coeffs: Vec::new() };
        }
        let mut coeffs = vec![self.field.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] = self.field.add(coeffs[i + j], self.field.mul(a, b));
            }
        }
        FieldPoly::from_coeffs(&self.field, coeffs).expect("carrier already validated")
    }

    pub fn scale(&self, a: Elem) -> FieldPoly {
        let coeffs = self.coeffs.iter().map(|&c| self.field.mul(a, c)).collect();
        FieldPoly::from_coeffs(&self.field, coeffs).expect("carrier already validated")
    }

    /// Multiplies by the inverse of the leading coefficient.
    pub fn make_monic(&self) -> FieldPoly {
        match self.coeffs.last() {
            None => self.clone(),
            Some(&lead) => {
                let inv = field_inverse(&self.field, lead);
                self.scale(inv)
            }
        }
    }
}

impl PartialEq for FieldPoly {
    fn eq(&self, other: &Self) -> bool {
        same_ring(&self.field, &other.field) && self.coeffs == other.coeffs
    }
}

impl Eq for FieldPoly {}

impl fmt::Display for FieldPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        super::format_poly(&self.field, &self.coeffs, f)
    }
}

impl fmt::Debug for FieldPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FieldPoly({self})")
    }
}

fn field_inverse(field: &FiniteRing, a: Elem) -> Elem {
    field
        .elements()
        .find(|&b| field.mul(a, b) == field.one())
        .expect("nonzero field elements are invertible")
}

/// Euclidean division by a monic divisor: `f = q*p + r` with
/// `deg r < deg p`. The identity is re-verified by multiplication before
/// returning.
pub fn monic_division(f: &FieldPoly, p: &FieldPoly) -> Result<(FieldPoly, FieldPoly)> {
    if !p.is_monic() {
        return Err(Error::NotMonic);
    }
    if !same_ring(&f.field, &p.field) {
        return Err(Error::ContextMismatch);
    }
    let field = &f.field;
    let dp = p.degree().expect("monic polynomials are nonzero");
    let mut rem = f.coeffs.clone();
    let mut quo = vec![field.zero(); f.coeffs.len().saturating_sub(dp)];
    while rem.len() > dp {
        let lead = rem[rem.len() - 1];
        let shift = rem.len() - 1 - dp;
        quo[shift] = lead;
        for (i, &pc) in p.coeffs.iter().enumerate() {
            rem[shift + i] = field.sub(rem[shift + i], field.mul(lead, pc));
        }
        while rem.last() == Some(&field.zero()) {
            rem.pop();
        }
    }
    let q = FieldPoly::from_coeffs(field, quo)?;
    let r = FieldPoly::from_coeffs(field, rem)?;
    if q.mul(p).add(&r) != *f {
        return Err(Error::Internal("division identity q*p + r = f failed".into()));
    }
    Ok((q, r))
}

/// Division with an arbitrary nonzero divisor (scales it monic first).
fn div_rem(f: &FieldPoly, g: &FieldPoly) -> Result<(FieldPoly, FieldPoly)> {
    let lead = *g.coeffs.last().expect("divisor must be nonzero");
    let inv = field_inverse(&g.field, lead);
    let monic = g.scale(inv);
    let (q, r) = monic_division(f, &monic)?;
    Ok((q.scale(inv), r))
}

/// Monic greatest common divisor by the Euclidean algorithm.
pub fn gcd_monic(f: &FieldPoly, g: &FieldPoly) -> Result<FieldPoly> {
    let mut a = f.clone();
    let mut b = g.clone();
    while !b.is_zero() {
        let (_, r) = div_rem(&a, &b)?;
        a = b;
        b = r;
    }
    Ok(a.make_monic())
}

/// Irreducibility by trial division against all monic divisors of degree at
/// most half the degree of `p`.
pub fn is_irreducible(p: &FieldPoly) -> bool {
    let Some(d) = p.degree() else { return false };
    if d == 0 {
        return false;
    }
    let field = &p.field;
    for dd in 1..=d / 2 {
        for g in monic_polys(field, dd) {
            let (_, r) = monic_division(p, &g).expect("trial divisors are monic");
            if r.is_zero() {
                return false;
            }
        }
    }
    true
}

/// All monic polynomials of exactly degree `d`, enumerated with the constant
/// coefficient varying fastest.
fn monic_polys(field: &Arc<FiniteRing>, d: usize) -> impl Iterator<Item = FieldPoly> + '_ {
    let q = field.order() as u64;
    let count = q.pow(d as u32);
    (0..count).map(move |code| {
        let mut coeffs = Vec::with_capacity(d + 1);
        let mut c = code;
        for _ in 0..d {
            coeffs.push(field.element((c % q) as usize));
            c /= q;
        }
        coeffs.push(field.one());
        FieldPoly::from_coeffs(field, coeffs).expect("carrier already validated")
    })
}

/// All monic irreducible polynomials of degree `1..=dmax` over the field, in
/// enumeration order (degree ascending, constant coefficient fastest).
pub fn irreducible_monics(
    field: &Arc<FiniteRing>,
    dmax: usize,
    limits: &Limits,
) -> Result<Vec<FieldPoly>> {
    if !field.is_field() {
        return Err(Error::NotAField(field.recipe().to_string()));
    }
    if dmax > limits.degree_cap {
        return Err(Error::DegreeCapExceeded { requested: dmax, cap: limits.degree_cap });
    }
    let mut out = Vec::new();
    for d in 1..=dmax {
        out.extend(monic_polys(field, d).filter(is_irreducible));
    }
    Ok(out)
}

/// The factor ring `K[x]/(p)` for a monic polynomial, realized as a concrete
/// ring of order `|K|^deg p`. For irreducible `p` the result passes the field
/// check; otherwise the error carries a zero-divisor witness.
pub fn quotient_field(
    field: &Arc<FiniteRing>,
    p: &FieldPoly,
    limits: &Limits,
) -> Result<Arc<FiniteRing>> {
    if !p.is_monic() {
        return Err(Error::NotMonic);
    }
    if !same_ring(field, &p.field) {
        return Err(Error::ContextMismatch);
    }
    let d = p.degree().expect("monic polynomials are nonzero");
    if d == 0 {
        return Err(Error::NotMonic);
    }
    let q = field.order();
    let order = (q as u128).checked_pow(d as u32).unwrap_or(u128::MAX);
    if order > limits.order_cap as u128 {
        return Err(Error::OrderCapExceeded {
            order: order.min(usize::MAX as u128) as usize,
            cap: limits.order_cap,
        });
    }
    let order = order as usize;

    let decode = |idx: usize| -> Vec<Elem> {
        let mut digits = Vec::with_capacity(d);
        let mut c = idx;
        for _ in 0..d {
            digits.push(field.element(c % q));
            c /= q;
        }
        digits
    };
    let encode = |coeffs: &[Elem]| -> usize {
        let mut idx = 0usize;
        for i in (0..d).rev() {
            idx = idx * q + coeffs.get(i).map_or(0, |e| e.index());
        }
        idx
    };

    let mut add = vec![0u16; order * order];
    let mut mul = vec![0u16; order * order];
    for a in 0..order {
        let fa = FieldPoly::from_coeffs(field, decode(a))?;
        for b in 0..order {
            let fb = FieldPoly::from_coeffs(field, decode(b))?;
            add[a * order + b] = encode(fa.add(&fb).coeffs()) as u16;
            let (_, rem) = monic_division(&fa.mul(&fb), p)?;
            mul[a * order + b] = encode(rem.coeffs()) as u16;
        }
    }

    let labels: Vec<String> = (0..order)
        .map(|idx| {
            let digits = decode(idx);
            let mut terms = Vec::new();
            for (i, &c) in digits.iter().enumerate().rev() {
                if c == field.zero() {
                    continue;
                }
                let coeff_label = field.label(c);
                let coeff = if c == field.one() && i > 0 {
                    String::new()
                } else if coeff_label.contains('+') {
                    format!("({coeff_label})")
                } else {
                    coeff_label.to_string()
                };
                let term = match i {
                    0 => coeff,
                    1 => format!("{coeff}u"),
                    _ => format!("{coeff}u^{i}"),
                };
                terms.push(term);
            }
            if terms.is_empty() { "0".into() } else { terms.join("+") }
        })
        .collect();

    let recipe = RingRecipe::Quotient {
        base: Box::new(field.recipe().clone()),
        gens: vec![format!("({p})")],
    };
    let one = encode(&[field.one()]) as u16;
    let ring = FiniteRing::from_tables(
        order,
        add,
        mul,
        Elem(0),
        Elem(one),
        labels,
        recipe,
        false,
    )?;

    if !ring.is_field() {
        let (a, b) = ring
            .zero_divisor_witness()
            .ok_or_else(|| Error::Internal("non-field quotient without zero divisors".into()))?;
        return Err(Error::ReducibleModulus { a: a.index(), b: b.index() });
    }
    Ok(ring)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::make_ring;

    fn gf(p: u64, k: u32) -> Arc<FiniteRing> {
        make_ring(&RingRecipe::gf(p, k), &Limits::default()).unwrap()
    }

    fn poly(field: &Arc<FiniteRing>, coeffs: &[usize]) -> FieldPoly {
        let elems = coeffs.iter().map(|&c| field.element(c)).collect();
        FieldPoly::from_coeffs(field, elems).unwrap()
    }

    #[test]
    fn division_example_over_gf2() {
        let k = gf(2, 1);
        let f = poly(&k, &[1, 1, 0, 1]); // x^3 + x + 1
        let p = poly(&k, &[1, 1, 1]); // x^2 + x + 1
        let (q, r) = monic_division(&f, &p).unwrap();
        assert_eq!(q, poly(&k, &[1, 1])); // x + 1
        assert_eq!(r, poly(&k, &[0, 1])); // x
    }

    #[test]
    fn division_by_x_shifts() {
        let k = gf(3, 1);
        let f = poly(&k, &[2, 1, 2]);
        let x = FieldPoly::x(&k).unwrap();
        let (q, r) = monic_division(&f, &x).unwrap();
        assert_eq!(q, poly(&k, &[1, 2]));
        assert_eq!(r, poly(&k, &[2]));
    }

    #[test]
    fn self_division_is_exact() {
        let k = gf(2, 1);
        let p = poly(&k, &[1, 1, 1]);
        let (q, r) = monic_division(&p, &p).unwrap();
        assert_eq!(q, FieldPoly::one(&k).unwrap());
        assert!(r.is_zero());
    }

    #[test]
    fn non_monic_divisor_is_rejected() {
        let k = gf(3, 1);
        let f = poly(&k, &[1, 1]);
        let p = poly(&k, &[0, 2]);
        assert!(matches!(monic_division(&f, &p), Err(Error::NotMonic)));
    }

    #[test]
    fn irreducibles_over_gf2_up_to_degree_two() {
        let k = gf(2, 1);
        let irr = irreducible_monics(&k, 2, &Limits::default()).unwrap();
        let shown: Vec<String> = irr.iter().map(|p| p.to_string()).collect();
        assert_eq!(shown, vec!["x", "x+1", "x^2+x+1"]);
    }

    #[test]
    fn linear_monics_over_gf3() {
        let k = gf(3, 1);
        let irr = irreducible_monics(&k, 1, &Limits::default()).unwrap();
        let shown: Vec<String> = irr.iter().map(|p| p.to_string()).collect();
        assert_eq!(shown, vec!["x", "x+1", "x+2"]);
    }

    #[test]
    fn cubic_irreducibles_over_gf2() {
        let k = gf(2, 1);
        let irr = irreducible_monics(&k, 3, &Limits::default()).unwrap();
        let cubics: Vec<String> = irr
            .iter()
            .filter(|p| p.degree() == Some(3))
            .map(|p| p.to_string())
            .collect();
        assert_eq!(cubics, vec!["x^3+x+1", "x^3+x^2+1"]);
    }

    #[test]
    fn quotient_field_of_order_four() {
        let k = gf(2, 1);
        let p = poly(&k, &[1, 1, 1]);
        let ext = quotient_field(&k, &p, &Limits::default()).unwrap();
        assert_eq!(ext.order(), 4);
        assert!(ext.is_field());
    }

    #[test]
    fn quotient_field_gf9() {
        let k = gf(3, 1);
        let p = poly(&k, &[1, 0, 1]); // x^2 + 1, no root mod 3
        let ext = quotient_field(&k, &p, &Limits::default()).unwrap();
        assert_eq!(ext.order(), 9);
        assert!(ext.is_field());
    }

    #[test]
    fn linear_quotient_is_the_base_field() {
        let k = gf(5, 1);
        let p = poly(&k, &[2, 1]); // x + 2
        let ext = quotient_field(&k, &p, &Limits::default()).unwrap();
        assert_eq!(ext.order(), 5);
        assert!(ext.is_field());
    }

    #[test]
    fn reducible_modulus_reports_zero_divisor() {
        let k = gf(2, 1);
        let p = poly(&k, &[1, 0, 1]); // x^2 + 1 = (x+1)^2 over GF(2)
        let err = quotient_field(&k, &p, &Limits::default()).unwrap_err();
        assert!(matches!(err, Error::ReducibleModulus { .. }));
    }

    #[test]
    fn gcd_examples() {
        let k = gf(2, 1);
        let a = poly(&k, &[1, 1]).mul(&poly(&k, &[1, 1, 1]));
        let b = poly(&k, &[1, 1]).mul(&poly(&k, &[0, 1]));
        let g = gcd_monic(&a, &b).unwrap();
        assert_eq!(g, poly(&k, &[1, 1]));
        // gcd with zero returns the other argument made monic
        let z = FieldPoly::zero(&k).unwrap();
        assert_eq!(gcd_monic(&z, &a).unwrap(), a.make_monic());
    }
}
