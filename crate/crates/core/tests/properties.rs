use normeuclid::e8::{self, StdVec8};
use normeuclid::euclid::{check_division, divide, divide_by_elimination, exact_div, xgcd};
use normeuclid::exactalg::{Vec8Q, Vec8Z};
use normeuclid::numberfield::{field, FieldId, RingElement};
use normeuclid::Rational;
use proptest::prelude::*;

fn field_id() -> impl Strategy<Value = FieldId> {
    prop::sample::select(FieldId::ALL.to_vec())
}

fn coords(range: i64) -> impl Strategy<Value = [i64; 8]> {
    prop::array::uniform8(-range..=range)
}

fn nonzero(range: i64) -> impl Strategy<Value = [i64; 8]> {
    coords(range).prop_filter("nonzero", |c| c.iter().any(|&x| x != 0))
}

fn ring(id: FieldId, c: [i64; 8]) -> RingElement {
    RingElement::new(id, Vec8Z::from_i64(c))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn euclidean_contract(id in field_id(), a in coords(1 << 40), b in nonzero(1 << 20)) {
        let f = field(id);
        let (a, b) = (ring(id, a), ring(id, b));
        let d = divide(&a, &b).unwrap();
        prop_assert!(check_division(&a, &b, &d).unwrap());
        prop_assert!(d.remainder.is_zero() || d.norm_remainder < d.norm_divisor);
        prop_assert!(d.norm_ratio() <= f.norm_bound());
        prop_assert!(d.norm_ratio() <= f.norm_sup_voronoi);
        prop_assert_eq!(d.norm_divisor, f.norm_ring(&b).abs());
    }

    #[test]
    fn both_division_paths_agree(id in field_id(), a in coords(1 << 30), b in nonzero(1 << 10)) {
        let (a, b) = (ring(id, a), ring(id, b));
        prop_assert_eq!(divide(&a, &b).unwrap(), divide_by_elimination(&a, &b).unwrap());
    }

    #[test]
    fn shifting_by_multiples_keeps_the_ratio(id in field_id(), a in coords(1 << 16), b in nonzero(1 << 8), t in coords(1 << 8)) {
        let f = field(id);
        let (a, b, t) = (ring(id, a), ring(id, b), ring(id, t));
        let shifted = a.add(&f.mul_ring(&b, &t).unwrap()).unwrap();
        prop_assert_eq!(divide(&a, &b).unwrap().norm_ratio(), divide(&shifted, &b).unwrap().norm_ratio());
    }

    #[test]
    fn exact_division_inverts_products(id in field_id(), q in coords(1 << 30), b in nonzero(1 << 30)) {
        let f = field(id);
        let (q, b) = (ring(id, q), ring(id, b));
        let a = f.mul_ring(&b, &q).unwrap();
        prop_assert_eq!(exact_div(&a, &b).unwrap(), q);
    }

    #[test]
    fn xgcd_is_a_bezout_gcd(id in field_id(), a in nonzero(1 << 12), b in coords(1 << 12)) {
        let f = field(id);
        let (a, b) = (ring(id, a), ring(id, b));
        let r = xgcd(&a, &b).unwrap();
        let lhs = f.mul_ring(&r.u, &a).unwrap().add(&f.mul_ring(&r.v, &b).unwrap()).unwrap();
        prop_assert_eq!(&lhs, &r.g);
        prop_assert!(exact_div(&a, &r.g).is_ok());
        prop_assert!(exact_div(&b, &r.g).is_ok());
    }

    #[test]
    fn decoder_matches_exhaustive_search(num in coords(256), den in prop::array::uniform8(1i64..=64)) {
        let x = StdVec8(Vec8Q::from_fn(|i| Rational::from((num[i], den[i]))));
        let p = e8::decode_e8(&x);
        let (_, best) = e8::cvp_bruteforce(&x);
        prop_assert_eq!(e8::dist2(&x, &p.to_std()), best);
    }

    #[test]
    fn closest_vector_lands_in_the_voronoi_cell(id in field_id(), num in coords(1000), den in 1i64..=97) {
        let f = field(id);
        let x = f.element(Vec8Q::from_fn(|i| Rational::from((num[i], den))));
        let e = x.sub(&f.closest_vector(&x).to_field()).unwrap();
        prop_assert!(f.in_voronoi(&e));
        prop_assert!(f.norm(&e).abs() <= f.norm_sup_voronoi);
    }
}
