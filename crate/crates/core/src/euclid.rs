//! Euclidean division and extended GCD.
//!
//! Division works entirely over the integers: `a/b` is written as `y/N(b)`
//! with `y = a·(N(b)/b)`, mapped to standard E8 coordinates by an integer
//! matrix, decoded, and pulled back. [`divide_by_elimination`] computes the
//! same quotient by fraction-free linear algebra and serves as a reference.
//!
//! GCDs are not normalized. Any associate of a gcd may be returned, and the
//! Bézout identity `u·a + v·b = g` is the contract callers should rely on.

use rug::{Integer, Rational};

use crate::e8;
use crate::error::{Error, Result};
use crate::exactalg::{self, Vec8Q, Vec8Z};
use crate::numberfield::{field, same_field, FieldData, RingElement};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DivisionResult {
    pub quotient: RingElement,
    pub remainder: RingElement,
    /// `|N(b)|`
    pub norm_divisor: Integer,
    /// `|N(r)|`
    pub norm_remainder: Integer,
}

impl DivisionResult {
    /// `|N(r)| / |N(b)|` in lowest terms.
    pub fn norm_ratio(&self) -> Rational {
        Rational::from((self.norm_remainder.clone(), self.norm_divisor.clone()))
    }

    /// Whether `|N(r)| / |N(b)| ≤ bound`, without reducing the ratio.
    pub fn ratio_at_most(&self, bound: &Rational) -> bool {
        Integer::from(&self.norm_remainder * bound.denom()) <= Integer::from(&self.norm_divisor * bound.numer())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct XgcdResult {
    pub g: RingElement,
    pub u: RingElement,
    pub v: RingElement,
    /// Number of divisions performed.
    pub steps: usize,
}

fn data_for(a: &RingElement, b: &RingElement) -> Result<&'static FieldData> {
    same_field(a.field, b.field)?;
    Ok(field(a.field))
}

/// `a = b·q + r` with `q` the closest lattice point to `a/b`.
pub fn divide(a: &RingElement, b: &RingElement) -> Result<DivisionResult> {
    let f = data_for(a, b)?;
    if b.is_zero() {
        return Err(Error::DivisionByZero);
    }
    let ar = f.arith();
    // d·a and d·b in reference coordinates; a/b = y / nb
    let alpha = ar.to_p(&a.coords);
    let beta = ar.to_p(&b.coords);
    let (nb_scaled, y) = ar.norm_and_scaled_quotient(&alpha, &beta);
    let nums = ar.p_to_std_twice.mul_vec(&y);
    let den = Integer::from(&nb_scaled * 2u32);
    let q = f.lattice_point_to_b(&e8::decode_scaled(&nums, &den));
    finish(f, a, b, q, ar.unscale_norm(nb_scaled).abs())
}

/// `r = a − b·q` and the exact norms.
fn finish(
    f: &FieldData,
    a: &RingElement,
    b: &RingElement,
    q: Vec8Z,
    nb: Integer,
) -> Result<DivisionResult> {
    let ar = f.arith();
    let r = a.coords.sub(&ar.mul_b(&b.coords, &q));
    let nr = if r.is_zero() { Integer::new() } else { ar.norm_b(&r).abs() };
    let d = DivisionResult {
        quotient: f.ring_element(q),
        remainder: f.ring_element(r),
        norm_divisor: nb,
        norm_remainder: nr,
    };
    debug_assert!(d.ratio_at_most(&f.norm_bound()));
    Ok(d)
}

/// [`divide`] by fraction-free elimination on the multiplication matrix of
/// `b` in the basis B. Slower; shares only the decoder with [`divide`].
pub fn divide_by_elimination(a: &RingElement, b: &RingElement) -> Result<DivisionResult> {
    let f = data_for(a, b)?;
    if b.is_zero() {
        return Err(Error::DivisionByZero);
    }
    let lb = f.mult_matrix_ring(b);
    // a/b = y/nb, nb = |N(b)|
    let (y, nb) = exactalg::solve_z(&lb, &a.coords)?;
    let nums = f.s_twice().mul_vec(&y);
    let den = Integer::from(&nb * 2u32);
    let q = f.lattice_point_to_b(&e8::decode_scaled(&nums, &den));
    let r = a.coords.sub(&lb.mul_vec(&q));
    let nr = if r.is_zero() {
        Integer::new()
    } else {
        exactalg::determinant_z(&f.mult_matrix_ring(&f.ring_element(r.clone()))).abs()
    };
    Ok(DivisionResult {
        quotient: f.ring_element(q),
        remainder: f.ring_element(r),
        norm_divisor: nb,
        norm_remainder: nr,
    })
}

/// Extended Euclidean algorithm; `g` is some gcd of `a` and `b`.
pub fn xgcd(a: &RingElement, b: &RingElement) -> Result<XgcdResult> {
    let f = data_for(a, b)?;
    if a.is_zero() && b.is_zero() {
        return Err(Error::BothZero);
    }
    let zero = RingElement::zero(f.id);
    // r_k = u_k·a + v_k·b
    let (mut r0, mut u0, mut v0) = (a.clone(), f.one(), zero.clone());
    let (mut r1, mut u1, mut v1) = (b.clone(), zero, f.one());
    let mut steps = 0;
    while !r1.is_zero() {
        let d = divide(&r0, &r1)?;
        steps += 1;
        let u2 = u0.sub(&f.mul_ring(&d.quotient, &u1)?)?;
        let v2 = v0.sub(&f.mul_ring(&d.quotient, &v1)?)?;
        (r0, u0, v0) = (r1, u1, v1);
        (r1, u1, v1) = (d.remainder, u2, v2);
    }
    Ok(XgcdResult { g: r0, u: u0, v: v0, steps })
}

/// The unit test `|N(x)| = 1`.
pub fn is_unit(x: &RingElement) -> bool {
    field(x.field).norm_ring(x).cmp_abs(&Integer::from(1)).is_eq()
}

/// `q` with `a = b·q`, if it exists in the ring of integers.
pub fn exact_div(a: &RingElement, b: &RingElement) -> Result<RingElement> {
    let f = data_for(a, b)?;
    if b.is_zero() {
        return Err(Error::DivisionByZero);
    }
    let ar = f.arith();
    // a/b = y / nb in reference coordinates
    let (nb, y) = ar.norm_and_scaled_quotient(&ar.to_p(&a.coords), &ar.to_p(&b.coords));
    let q_p = Vec8Q::from_fn(|i| Rational::from((y[i].clone(), nb.clone())));
    // integral B-coordinates are exactly membership in the ring
    let q_b = f.to_b(&q_p).to_integer().ok_or(Error::NotDivisible)?;
    Ok(f.ring_element(q_b))
}

/// Recomputes `b·q + r` through the multiplication tables of B, independently
/// of the product used by [`divide`], and compares it with `a`.
pub fn check_division(a: &RingElement, b: &RingElement, d: &DivisionResult) -> Result<bool> {
    let f = data_for(a, b)?;
    same_field(a.field, d.quotient.field)?;
    same_field(a.field, d.remainder.field)?;
    let back = f.mult_matrix_ring(b).mul_vec(&d.quotient.coords).add(&d.remainder.coords);
    Ok(back == a.coords)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numberfield::FieldId;

    fn elt(id: FieldId, xs: [i64; 8]) -> RingElement {
        RingElement::new(id, Vec8Z::from_i64(xs))
    }

    #[test]
    fn divide_by_one_is_exact() {
        let f = field(FieldId::Zeta15);
        let a = elt(FieldId::Zeta15, [3, -1, 4, 1, -5, 9, 2, -6]);
        let d = divide(&a, &f.one()).unwrap();
        assert_eq!(d.quotient, a);
        assert!(d.remainder.is_zero());
        assert_eq!(d.norm_ratio(), 0);
    }

    #[test]
    fn zero_dividend() {
        let b = elt(FieldId::Zeta20, [1, 2, 0, 0, 0, 0, 0, 1]);
        let d = divide(&RingElement::zero(FieldId::Zeta20), &b).unwrap();
        assert!(d.quotient.is_zero() && d.remainder.is_zero());
    }

    #[test]
    fn multiples_divide_exactly() {
        for id in FieldId::ALL {
            let f = field(id);
            let b = elt(id, [2, -1, 0, 3, 1, 0, -2, 1]);
            let q = elt(id, [-4, 7, 1, 0, 0, 2, 5, -3]);
            let a = f.mul_ring(&b, &q).unwrap();
            let d = divide(&a, &b).unwrap();
            assert_eq!(d.quotient, q);
            assert!(d.remainder.is_zero());
            assert_eq!(exact_div(&a, &b).unwrap(), q);
            assert_eq!(divide_by_elimination(&a, &b).unwrap().quotient, q);
        }
    }

    #[test]
    fn division_errors() {
        let a = elt(FieldId::Zeta24, [1, 0, 0, 0, 0, 0, 0, 0]);
        let z = RingElement::zero(FieldId::Zeta24);
        assert_eq!(divide(&a, &z), Err(Error::DivisionByZero));
        assert_eq!(exact_div(&a, &z), Err(Error::DivisionByZero));
        let other = elt(FieldId::Zeta20, [1, 0, 0, 0, 0, 0, 0, 0]);
        assert_eq!(divide(&a, &other), Err(Error::FieldMismatch(FieldId::Zeta24, FieldId::Zeta20)));
        assert_eq!(xgcd(&z, &z), Err(Error::BothZero));
    }

    #[test]
    fn units() {
        let f = field(FieldId::Zeta15);
        assert!(is_unit(&f.one()));
        let two = f.ring_element(f.one().coords.scale(&Integer::from(2)));
        assert!(!is_unit(&two));
        assert_eq!(f.norm_ring(&two), 256);
        assert!(is_unit(&f.reference_basis_element(1)));
        assert_eq!(exact_div(&f.one(), &two), Err(Error::NotDivisible));
    }

    #[test]
    fn xgcd_with_zero() {
        let a = elt(FieldId::Biquadratic, [5, 1, -2, 0, 3, 0, 0, 1]);
        let z = RingElement::zero(FieldId::Biquadratic);
        let r = xgcd(&a, &z).unwrap();
        assert_eq!(r.g, a);
        assert_eq!(r.u, field(FieldId::Biquadratic).one());
        assert!(r.v.is_zero());
    }

    #[test]
    fn xgcd_with_itself_is_associate() {
        let f = field(FieldId::Zeta20);
        let a = elt(FieldId::Zeta20, [5, 1, -2, 0, 3, 0, 0, 1]);
        let r = xgcd(&a, &a).unwrap();
        assert_eq!(f.norm_ring(&r.g).abs(), f.norm_ring(&a).abs());
    }

    #[test]
    fn gcd_with_a_unit_is_a_unit() {
        let f = field(FieldId::Zeta15);
        // 1 − ζ
        let one_minus_zeta = f.one().sub(&f.reference_basis_element(1)).unwrap();
        assert!(is_unit(&one_minus_zeta));
        let b = elt(FieldId::Zeta15, [17, -3, 8, 2, 0, -11, 4, 6]);
        let r = xgcd(&one_minus_zeta, &b).unwrap();
        assert!(is_unit(&r.g));
        let lhs = f
            .mul_ring(&r.u, &one_minus_zeta)
            .unwrap()
            .add(&f.mul_ring(&r.v, &b).unwrap())
            .unwrap();
        assert_eq!(lhs, r.g);
    }

    #[test]
    fn check_division_detects_tampering() {
        let a = elt(FieldId::Zeta24, [31, -7, 12, 5, 9, -2, 0, 3]);
        let b = elt(FieldId::Zeta24, [2, 1, 0, 0, -1, 0, 1, 0]);
        let mut d = divide(&a, &b).unwrap();
        assert!(check_division(&a, &b, &d).unwrap());
        d.remainder.coords[0] += 1;
        assert!(!check_division(&a, &b, &d).unwrap());
    }
}
