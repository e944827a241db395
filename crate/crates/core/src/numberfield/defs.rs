//! Static descriptions of the four fields in their reference bases.

use rug::Rational;

use super::FieldId;
use crate::exactalg::Vec8Q;

/// Monic minimal polynomials of ζ_n, coefficients of x^0..x^7 (x^8 implied).
const PHI15: [i64; 8] = [1, -1, 0, 1, -1, 1, 0, -1];
const PHI20: [i64; 8] = [1, 0, -1, 0, 1, 0, -1, 0];
const PHI24: [i64; 8] = [1, 0, 0, 0, -1, 0, 0, 0];

/// How products in the reference basis are formed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Shape {
    /// Polynomials in ζ reduced modulo the given minimal polynomial.
    Cyclotomic([i64; 8]),
    /// Multilinear in √3 (bit 0), √5 (bit 1) and i (bit 2).
    Biquadratic,
}

pub(crate) struct FieldDef {
    pub shape: Shape,
    /// `table[i][j]` = reference-basis coordinates of `p_i · p_j`.
    pub table: Vec<Vec<Vec8Q>>,
    /// `conj[j]` = reference-basis coordinates of the conjugate of `p_j`.
    pub conj: Vec<Vec8Q>,
    /// Every automorphism of F, each as the images of `p_0..p_7`.
    pub galois: Vec<Vec<Vec8Q>>,
    pub disc_k: u64,
    pub sup: Rational,
    pub maximizer: Vec8Q,
    /// The maximizer exactly as listed in the published table.
    pub listed_maximizer: Vec8Q,
    pub euclidean_minimum: Option<Rational>,
}

fn half_vec(xs: [i64; 8], den: i64) -> Vec8Q {
    Vec8Q::from_fn(|i| Rational::from((xs[i], den)))
}

/// Coordinates of ζ^k in the power basis, reduced modulo the minimal polynomial.
pub(crate) fn cyclotomic_power(phi: &[i64; 8], k: usize) -> Vec8Q {
    let mut v = [0i64; 8];
    v[0] = 1;
    for _ in 0..k {
        // multiply by x, then replace x^8 with -Σ phi_i x^i
        let top = v[7];
        for i in (1..8).rev() {
            v[i] = v[i - 1];
        }
        v[0] = 0;
        for i in 0..8 {
            v[i] -= top * phi[i];
        }
    }
    Vec8Q::from_ints(v)
}

type Parts = (Vec<Vec<Vec8Q>>, Vec<Vec8Q>, Vec<Vec<Vec8Q>>);

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn cyclotomic(n: usize, phi: &[i64; 8]) -> Parts {
    let table = (0..8)
        .map(|i| (0..8).map(|j| cyclotomic_power(phi, i + j)).collect())
        .collect();
    let conj = (0..8).map(|j| cyclotomic_power(phi, (n - j) % n)).collect();
    // ζ ↦ ζ^u for u coprime to n
    let galois = (1..n)
        .filter(|&u| gcd(u, n) == 1)
        .map(|u| (0..8).map(|j| cyclotomic_power(phi, (u * j) % n)).collect())
        .collect();
    (table, conj, galois)
}

/// Basis index bits: bit 0 = √3, bit 1 = √5, bit 2 = i.
fn biquadratic() -> Parts {
    let table = (0..8usize)
        .map(|a| {
            (0..8usize)
                .map(|b| {
                    let mut c: i64 = 1;
                    if a & b & 1 != 0 {
                        c *= 3;
                    }
                    if a & b & 2 != 0 {
                        c *= 5;
                    }
                    if a & b & 4 != 0 {
                        c = -c;
                    }
                    let mut v = Vec8Q::zero();
                    v[a ^ b] = Rational::from(c);
                    v
                })
                .collect()
        })
        .collect();
    let conj = (0..8usize)
        .map(|j| {
            let mut v = Vec8Q::zero();
            v[j] = Rational::from(if j & 4 != 0 { -1 } else { 1 });
            v
        })
        .collect();
    // sign changes of √3, √5 and i, selected by the bits of `s`
    let galois = (0..8usize)
        .map(|s| {
            (0..8usize)
                .map(|j| {
                    let mut v = Vec8Q::zero();
                    v[j] = Rational::from(if (j & s).count_ones() % 2 == 1 { -1 } else { 1 });
                    v
                })
                .collect()
        })
        .collect();
    (table, conj, galois)
}

pub(crate) fn definition(id: FieldId) -> FieldDef {
    match id {
        FieldId::Zeta15 => {
            let (table, conj, galois) = cyclotomic(15, &PHI15);
            FieldDef {
                shape: Shape::Cyclotomic(PHI15),
                galois,
                table,
                conj,
                disc_k: 1125,
                sup: Rational::from((61, 256)),
                // ½(ζ⁷ + ζ⁵ − ζ)
                maximizer: half_vec([0, -1, 0, 0, 0, 1, 0, 1], 2),
                listed_maximizer: half_vec([0, -1, 0, 0, 0, 1, 0, 1], 2),
                euclidean_minimum: Some(Rational::from((1, 16))),
            }
        }
        FieldId::Zeta20 => {
            let (table, conj, galois) = cyclotomic(20, &PHI20);
            FieldDef {
                shape: Shape::Cyclotomic(PHI20),
                galois,
                table,
                conj,
                disc_k: 2000,
                sup: Rational::from((125, 256)),
                // ½(ζ⁶ + ζ⁵ + ζ⁴ − ζ)
                maximizer: half_vec([0, -1, 0, 0, 1, 1, 1, 0], 2),
                listed_maximizer: half_vec([0, -1, 0, 0, 1, 1, 1, 0], 2),
                euclidean_minimum: Some(Rational::from((1, 5))),
            }
        }
        FieldId::Zeta24 => {
            let (table, conj, galois) = cyclotomic(24, &PHI24);
            FieldDef {
                shape: Shape::Cyclotomic(PHI24),
                galois,
                table,
                conj,
                disc_k: 2304,
                sup: Rational::from((9, 16)),
                // ½(1 − ζ + ζ² + ζ⁴ − ζ⁷), a deep hole of the lattice
                maximizer: half_vec([1, -1, 1, 0, 1, 0, 0, -1], 2),
                // ½(ζ⁷ + ζ² + ζ), norm 9/256
                listed_maximizer: half_vec([0, 1, 1, 0, 0, 0, 0, 1], 2),
                euclidean_minimum: Some(Rational::from((1, 4))),
            }
        }
        FieldId::Biquadratic => {
            let (table, conj, galois) = biquadratic();
            FieldDef {
                shape: Shape::Biquadratic,
                galois,
                table,
                conj,
                disc_k: 3600,
                sup: Rational::from((225, 256)),
                // ((√15 − √3 + √5 − 1)·i + (√15 + 3√3 − √5 − 7)) / 8
                maximizer: half_vec([-7, 3, -1, 1, -1, -1, 1, 1], 8),
                // four times the maximizer, norm 4⁸·225/256
                listed_maximizer: half_vec([-7, 3, -1, 1, -1, -1, 1, 1], 2),
                euclidean_minimum: None,
            }
        }
    }
}
