use super::*;
use crate::e8::CARTAN;
use crate::exactalg::determinant_z;

fn zeta(f: &FieldData) -> FieldElement {
    f.from_p(&Vec8Q::unit(1))
}

fn power(f: &FieldData, x: &FieldElement, n: u32) -> FieldElement {
    let mut acc = f.one().to_field();
    for _ in 0..n {
        acc = f.mul(&acc, x).unwrap();
    }
    acc
}

fn sample(id: FieldId, seed: i64) -> RingElement {
    // small deterministic coordinates, never all zero
    RingElement::new(id, Vec8Z::from_fn(|i| Integer::from((seed * 7 + (i as i64) * 13) % 11 - 5 + (i == 0) as i64 * 20)))
}

#[test]
fn discriminants_and_certificates() {
    let want = [(FieldId::Zeta15, 1125), (FieldId::Zeta20, 2000), (FieldId::Zeta24, 2304), (FieldId::Biquadratic, 3600)];
    for (id, disc) in want {
        let f = field(id);
        assert_eq!(f.disc_k, disc);
        assert_eq!(f.roots.len(), 240);
        assert_eq!(f.norm_bound(), Rational::from((disc, 4096)));
        assert_eq!(f.norm_bound(), id.norm_bound());
    }
}

#[test]
fn roots_of_unity() {
    for (id, n) in [(FieldId::Zeta15, 15), (FieldId::Zeta20, 20), (FieldId::Zeta24, 24)] {
        let f = field(id);
        let z = zeta(f);
        assert_eq!(power(f, &z, n), f.one().to_field(), "{id}");
        for d in 1..n {
            if n % d == 0 {
                assert_ne!(power(f, &z, d), f.one().to_field(), "{id}: order divides {d}");
            }
        }
    }
    let f = field(FieldId::Biquadratic);
    let i = f.from_p(&Vec8Q::unit(4));
    assert_eq!(power(f, &i, 2), f.one().to_field().scale(&Rational::from(-1)));
    let r3 = f.from_p(&Vec8Q::unit(1));
    assert_eq!(power(f, &r3, 2), f.one().to_field().scale(&Rational::from(3)));
}

#[test]
fn traces_match_moebius() {
    // Tr(ζ_n) = μ(n)
    for (id, mu) in [(FieldId::Zeta15, 1), (FieldId::Zeta20, 0), (FieldId::Zeta24, 0)] {
        let f = field(id);
        assert_eq!(f.trace(&f.one().to_field()), 8);
        assert_eq!(f.trace(&zeta(f)), mu, "{id}");
    }
    let f = field(FieldId::Biquadratic);
    for k in 1..8 {
        assert_eq!(f.trace(&f.from_p(&Vec8Q::unit(k))), 0);
    }
}

#[test]
fn known_norms() {
    // N(1 − ζ_n) = Φ_n(1) = 1 when n is not a prime power
    for id in [FieldId::Zeta15, FieldId::Zeta20, FieldId::Zeta24] {
        let f = field(id);
        let x = f.one().to_field().sub(&zeta(f)).unwrap();
        assert_eq!(f.norm(&x), 1, "{id}");
        assert_eq!(f.norm(&f.one().to_field().scale(&Rational::from(2))), 256);
    }
    let f = field(FieldId::Biquadratic);
    assert_eq!(f.norm(&f.from_p(&Vec8Q::unit(1))), 81);
    let one_plus_i = f.from_p(&Vec8Q::from_ints([1, 0, 0, 0, 1, 0, 0, 0]));
    assert_eq!(f.norm(&one_plus_i), 16);
}

#[test]
fn norm_is_multiplicative_and_matches_determinant() {
    for id in FieldId::ALL {
        let f = field(id);
        for s in 0..6 {
            let x = sample(id, s);
            let y = sample(id, s + 3);
            let xy = f.mul_ring(&x, &y).unwrap();
            assert_eq!(f.norm_ring(&xy), f.norm_ring(&x) * f.norm_ring(&y));
            assert_eq!(f.norm_ring(&x), determinant_z(&f.mult_matrix_ring(&x)));
            assert_eq!(Rational::from(f.norm_ring(&x)), f.norm(&x.to_field()));
        }
    }
}

#[test]
fn fast_product_matches_table() {
    for id in FieldId::ALL {
        let f = field(id);
        let x = sample(id, 1);
        let y = sample(id, 2);
        let by_matrix = f.mult_matrix_ring(&x).mul_vec(&y.coords);
        assert_eq!(f.mul_ring(&x, &y).unwrap().coords, by_matrix);
        let xf = f.mul(&x.to_field(), &y.to_field()).unwrap();
        assert_eq!(xf.coords, by_matrix.to_rational());
    }
}

#[test]
fn conjugation_and_inverse() {
    for id in FieldId::ALL {
        let f = field(id);
        let x = sample(id, 4).to_field();
        assert_eq!(f.conj(&f.conj(&x)), x);
        assert_eq!(f.norm(&f.conj(&x)), f.norm(&x));
        let inv = f.inv(&x).unwrap();
        assert_eq!(f.mul(&x, &inv).unwrap(), f.one().to_field());
        assert_eq!(f.inv(&FieldElement::new(id, Vec8Q::zero())), Err(Error::DivisionByZero));
    }
}

#[test]
fn lenstra_form_on_roots() {
    for id in FieldId::ALL {
        let f = field(id);
        for r in f.roots.iter().step_by(17) {
            let x = f.element(r.to_rational());
            assert_eq!(f.inner(&x, &x).unwrap(), 2);
        }
        for i in 0..8 {
            for j in 0..8 {
                let a = f.element(Vec8Q::unit(i));
                let b = f.element(Vec8Q::unit(j));
                assert_eq!(f.inner(&a, &b).unwrap(), CARTAN[i][j], "{id} ({i},{j})");
            }
        }
    }
}

#[test]
fn norm_is_bounded_by_the_form() {
    // AM–GM over the four real places of K: N(x) ≤ Δ_K·⟨x|x⟩⁴/4096
    for id in FieldId::ALL {
        let f = field(id);
        for s in 0..10 {
            let x = sample(id, s).to_field().scale(&Rational::from((1, s + 2)));
            let q = f.inner(&x, &x).unwrap();
            let q4 = Rational::from(q.square_ref()).square();
            assert!(f.norm(&x).abs() <= f.norm_bound() * q4, "{id}");
        }
    }
}

#[test]
fn basis_changes_round_trip() {
    for id in FieldId::ALL {
        let f = field(id);
        for s in 0..5 {
            let x = sample(id, s).to_field().scale(&Rational::from((3, 7)));
            assert_eq!(f.to_b(&f.from_b(&x.coords)), x.coords);
            assert_eq!(f.from_standard(&f.to_standard(&x.coords)), x.coords);
        }
        for k in 0..8 {
            let e = f.reference_basis_element(k);
            assert_eq!(f.from_b(&e.coords.to_rational()), Vec8Q::unit(k));
        }
    }
}

#[test]
fn roots_map_to_e8_roots() {
    for id in FieldId::ALL {
        let f = field(id);
        let mut mapped: Vec<Vec8Q> = f.roots.iter().map(|r| f.to_standard(&r.to_rational()).0).collect();
        let mut standard: Vec<Vec8Q> = crate::e8::standard_roots().iter().map(|p| p.to_std().0).collect();
        mapped.sort_by(|a, b| a.0.cmp(&b.0));
        standard.sort_by(|a, b| a.0.cmp(&b.0));
        assert_eq!(mapped, standard, "{id}");
    }
}

#[test]
fn json_round_trip() {
    let f = field(FieldId::Zeta20);
    let text = f.to_json();
    let back = FieldData::from_json(&text).unwrap();
    assert_eq!(back.to_json(), text);
}

fn corrupt(text: &str, edit: impl FnOnce(&mut serde_json::Value)) -> Result<FieldData> {
    let mut v: serde_json::Value = serde_json::from_str(text).unwrap();
    edit(&mut v);
    FieldData::from_json(&v.to_string())
}

#[test]
fn corrupted_json_is_rejected() {
    let text = field(FieldId::Zeta15).to_json();
    let is_cert = |r: Result<FieldData>| matches!(r, Err(Error::CertificateFailure { .. }));
    assert!(is_cert(corrupt(&text, |v| v["disc_k"] = 1126.into())));
    assert!(is_cert(corrupt(&text, |v| v["schema_version"] = 99.into())));
    assert!(is_cert(corrupt(&text, |v| v["roots"][0][0] = "7".into())));
    assert!(is_cert(corrupt(&text, |v| v["basis_b"][0][0] = "5".into())));
    assert!(is_cert(corrupt(&text, |v| v["norm_sup_voronoi"] = "1/2".into())));
    assert!(matches!(FieldData::from_json("{"), Err(Error::Parse(_))));
}

#[test]
fn cache_writes_and_reloads() {
    let dir = std::env::temp_dir().join(format!("normeuclid-test-{}", std::process::id()));
    let a = load_or_build(FieldId::Zeta24, &dir).unwrap();
    assert!(cache_file(&dir, FieldId::Zeta24).exists());
    let b = load_or_build(FieldId::Zeta24, &dir).unwrap();
    assert_eq!(a.to_json(), b.to_json());
    std::fs::write(cache_file(&dir, FieldId::Zeta24), "garbage").unwrap();
    let c = load_or_build(FieldId::Zeta24, &dir).unwrap();
    assert_eq!(c.to_json(), a.to_json());
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn field_ids_parse() {
    for id in FieldId::ALL {
        assert_eq!(id.name().parse::<FieldId>().unwrap(), id);
        assert_eq!(id.to_string(), id.name());
    }
    assert!(matches!("zeta16".parse::<FieldId>(), Err(Error::Parse(_))));
}

#[test]
fn mixing_fields_is_an_error() {
    let a = field(FieldId::Zeta15).one();
    let b = field(FieldId::Zeta20).one();
    assert_eq!(a.add(&b), Err(Error::FieldMismatch(FieldId::Zeta15, FieldId::Zeta20)));
    assert!(field(FieldId::Zeta15).mul_ring(&a, &b).is_err());
}

#[test]
fn simple_roots_of_the_cartan_lattice() {
    let gram = crate::e8::cartan_matrix();
    let roots = enumerate_roots(&gram);
    assert_eq!(roots.len(), 240);
    let base = find_simple_roots(&gram, &roots).unwrap();
    for i in 0..8 {
        for j in 0..8 {
            assert_eq!(gram.bilinear(&base[i].to_rational(), &base[j].to_rational()), CARTAN[i][j]);
        }
    }
}

#[test]
fn d8_has_no_e8_base() {
    // D8 Dynkin diagram: chain 0–5, with 6 and 7 both attached to 5
    let mut m = [[0i64; 8]; 8];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 2;
    }
    for (a, b) in [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (5, 7)] {
        m[a][b] = -1;
        m[b][a] = -1;
    }
    let gram = Mat8Q::from_ints(m);
    let roots = enumerate_roots(&gram);
    assert_eq!(roots.len(), 112);
    assert_eq!(find_simple_roots(&gram, &roots), Err(Error::BaseNotFound));
}

#[test]
fn tower_norm_matches_determinant() {
    for id in FieldId::ALL {
        let f = field(id);
        let ar = f.arith();
        for s in 0..4 {
            let x = sample(id, s);
            assert_eq!(ar.norm_b(&x.coords), determinant_z(&f.mult_matrix_ring(&x)));
            let y = sample(id, s + 1);
            let (n, q) = ar.norm_and_scaled_quotient(&ar.to_p(&y.coords), &ar.to_p(&x.coords));
            // (dy·N(dx)/dx)·dx = dy·N(dx)
            let back = ar.mul(&q, &ar.to_p(&x.coords));
            let want = ar.to_p(&y.coords).scale(&n);
            assert_eq!(back, want, "{id} d={}", ar.d);
        }
    }
}
