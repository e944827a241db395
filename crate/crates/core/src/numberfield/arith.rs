//! Fast exact arithmetic on integer reference-basis coordinates.
//!
//! A product in F is one big-integer product: coordinates are packed into
//! slots of a single integer (Kronecker substitution), multiplied by GMP, and
//! unpacked and reduced. Norms use a tower of three quadratic steps,
//! `c_{k+1} = c_k · g_{k+1}(c_k)`, so that `c_3 = N(b)` and `a·N(b)/b` falls
//! out of the same conjugates. The last step is a norm from a quadratic
//! subfield and costs three products of coordinates instead of a full product.

use rug::ops::Pow;
use rug::Integer;

use super::build::mul_in;
use super::defs::{FieldDef, Shape};
use crate::exactalg::{Mat8Q, Mat8Z, Vec8Q, Vec8Z};

#[derive(Clone, Default)]
pub(crate) struct PArith {
    shape: Option<Shape>,
    /// `d·basis_b`, integral.
    pub b_to_p: Mat8Z,
    pub d: Integer,
    /// `basis_b⁻¹`, integral because every `p_i` is an algebraic integer.
    pub p_to_b: Mat8Z,
    /// `2·S·basis_b⁻¹`: reference coordinates to twice the standard E8 coordinates.
    pub p_to_std_twice: Mat8Z,
    /// `g_1, g_2, g_3` with the 8 compositions `g_3^c·g_2^b·g_1^a` distinct,
    /// `g_2² ∈ ⟨g_1⟩` and `g_3² ∈ ⟨g_1, g_2⟩`.
    chain: [Mat8Z; 3],
    quad: Quadratic,
}

/// The quadratic subfield `L = Q(θ)` fixed by `g_1` and `g_2`.
///
/// An element of L with reference coordinates `c` is `(U + V·θ)/θ_j` with
/// `V = c_j` and `U = c_0·θ_j − V·θ_0`, and its norm to Q is
/// `(U² + t·U·V + n·V²)/θ_j²` with `t = θ + g_3(θ)`, `n = θ·g_3(θ)`.
#[derive(Clone, Default)]
struct Quadratic {
    theta: Vec8Z,
    j: usize,
    t: Integer,
    n: Integer,
}

fn significant_bits(v: &Vec8Z) -> u32 {
    v.0.iter().map(Integer::significant_bits).max().unwrap_or(0)
}

fn slot(shape: Shape, i: usize) -> u32 {
    match shape {
        Shape::Cyclotomic(_) => i as u32,
        // exponents of √3, √5, i as base-3 digits
        Shape::Biquadratic => ((i & 1) + 3 * ((i >> 1) & 1) + 9 * ((i >> 2) & 1)) as u32,
    }
}

fn product_slots(shape: Shape) -> usize {
    match shape {
        Shape::Cyclotomic(_) => 15,
        Shape::Biquadratic => 27,
    }
}

fn pack(shape: Shape, v: &Vec8Z, k: u32) -> Integer {
    let mut acc = Integer::new();
    for i in 0..8 {
        if v[i].cmp0().is_ne() {
            acc += Integer::from(&v[i] << (slot(shape, i) * k));
        }
    }
    acc
}

/// Signed base-`2^k` digits of `v`, least significant first.
fn unpack(mut v: Integer, n: usize, k: u32) -> Vec<Integer> {
    let half = Integer::from(1) << (k - 1);
    let full = Integer::from(1) << k;
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let mut t = Integer::from(v.keep_bits_ref(k));
        if t >= half {
            t -= &full;
        }
        v -= &t;
        v >>= k;
        out.push(t);
    }
    debug_assert!(v.cmp0().is_eq());
    out
}

fn rational_part(v: &Vec8Q) -> Option<Integer> {
    if (1..8).any(|i| v[i].cmp0().is_ne()) {
        return None;
    }
    (*v[0].denom() == 1).then(|| v[0].numer().clone())
}

fn quadratic_subfield(table: &[Vec<Vec8Q>], chain: &[Mat8Z; 3]) -> Result<Quadratic, String> {
    let [g1, g2, g3] = chain;
    for k in 1..8 {
        // θ = sum of the orbit of p_k under ⟨g_1, g_2⟩
        let e = Vec8Z::unit(k);
        let theta = e.add(&g1.mul_vec(&e)).add(&g2.mul_vec(&e)).add(&g2.mul_vec(&g1.mul_vec(&e)));
        let Some(j) = (1..8).find(|&i| theta[i].cmp0().is_ne()) else {
            continue;
        };
        let conj = g3.mul_vec(&theta);
        let t = rational_part(&theta.add(&conj).to_rational()).ok_or("θ + g_3(θ) is not an integer")?;
        let n = rational_part(&mul_in(table, &theta.to_rational(), &conj.to_rational()))
            .ok_or("θ·g_3(θ) is not an integer")?;
        return Ok(Quadratic { theta, j, t, n });
    }
    Err("no generator for the quadratic subfield".into())
}

impl PArith {
    /// Precomputes the tables, checking that every listed automorphism is
    /// one and that a norm tower exists. Returns a description of the first
    /// failure.
    pub(crate) fn new(def: &FieldDef, basis_b: &Mat8Q, basis_b_inv: &Mat8Q, s_twice: &Mat8Z) -> Result<PArith, String> {
        let mut d = Integer::from(1);
        for x in basis_b.0.iter().flatten() {
            d.lcm_mut(x.denom());
        }
        let b_to_p = basis_b
            .scale(&rug::Rational::from(&d))
            .to_integer()
            .expect("scaled by the common denominator");
        let p_to_b = basis_b_inv.to_integer().ok_or("reference basis is not integral")?;
        let p_to_std_twice = Mat8Z::from_fn(|i, j| {
            let mut acc = Integer::new();
            for k in 0..8 {
                acc += &s_twice[i][k] * &p_to_b[k][j];
            }
            acc
        });

        let table = &def.table[..];
        let mut autos = Vec::with_capacity(8);
        for images in &def.galois {
            let g = Mat8Q::from_columns(&std::array::from_fn(|j| images[j].clone()));
            for i in 0..8 {
                for j in 0..8 {
                    let lhs = g.mul_vec(&table[i][j]);
                    let rhs = mul_in(table, &images[i], &images[j]);
                    if lhs != rhs {
                        return Err("a listed automorphism is not multiplicative".into());
                    }
                }
            }
            autos.push(g);
        }
        let identity = Mat8Q::identity();
        let conj = Mat8Q::from_columns(&std::array::from_fn(|j| def.conj[j].clone()));
        if autos.len() != 8 || !autos.contains(&identity) || !autos.contains(&conj) {
            return Err("automorphism group is not complete".into());
        }
        let g1 = conj;
        let (g2, g3) = autos
            .iter()
            .flat_map(|g2| autos.iter().map(move |g3| (g2, g3)))
            .find(|(g2, g3)| {
                // ⟨g_1⟩ ⊂ ⟨g_1, g_2⟩ ⊂ G, so c_1 and c_2 lie in subfields of degree 4 and 2
                let h1 = [identity.clone(), g1.clone()];
                let h2 = [identity.clone(), g1.clone(), (*g2).clone(), g2.mul(&g1)];
                if !h1.contains(&g2.mul(g2)) || !h2.contains(&g3.mul(g3)) {
                    return false;
                }
                let mut seen: Vec<Mat8Q> = Vec::with_capacity(8);
                for mask in 0..8 {
                    let mut m = identity.clone();
                    if mask & 4 != 0 {
                        m = m.mul(g3);
                    }
                    if mask & 2 != 0 {
                        m = m.mul(g2);
                    }
                    if mask & 1 != 0 {
                        m = m.mul(&g1);
                    }
                    if seen.contains(&m) {
                        return false;
                    }
                    seen.push(m);
                }
                true
            })
            .ok_or("no norm tower through complex conjugation")?;
        let to_z = |m: &Mat8Q| m.to_integer().ok_or("automorphism is not integral");
        let chain = [to_z(&g1)?, to_z(g2)?, to_z(g3)?];
        let quad = quadratic_subfield(table, &chain)?;
        Ok(PArith { shape: Some(def.shape), b_to_p, d, p_to_b, p_to_std_twice, chain, quad })
    }

    fn shape(&self) -> Shape {
        self.shape.expect("arithmetic tables are initialized")
    }

    /// Product of two elements given by integer reference coordinates.
    pub fn mul(&self, a: &Vec8Z, b: &Vec8Z) -> Vec8Z {
        if a.is_zero() || b.is_zero() {
            return Vec8Z::zero();
        }
        let shape = self.shape();
        // each product coefficient is a sum of at most 8 terms
        let k = significant_bits(a) + significant_bits(b) + 5;
        let prod = Integer::from(&pack(shape, a, k) * &pack(shape, b, k));
        let mut c = unpack(prod, product_slots(shape), k);
        match shape {
            Shape::Cyclotomic(phi) => {
                // x^8 = −Σ phi_i x^i
                for deg in (8..15).rev() {
                    let t = std::mem::take(&mut c[deg]);
                    if t.cmp0().is_eq() {
                        continue;
                    }
                    for (i, &p) in phi.iter().enumerate() {
                        if p != 0 {
                            c[deg - 8 + i] -= Integer::from(&t * p);
                        }
                    }
                }
                c.truncate(8);
                Vec8Z::from_fn(|i| std::mem::take(&mut c[i]))
            }
            Shape::Biquadratic => {
                let mut out = Vec8Z::zero();
                for (s, v) in c.into_iter().enumerate() {
                    if v.cmp0().is_eq() {
                        continue;
                    }
                    let (e0, e1, e2) = (s % 3, s / 3 % 3, s / 9);
                    let idx = (e0 % 2) | (e1 % 2) << 1 | (e2 % 2) << 2;
                    let mut v = v;
                    if e0 == 2 {
                        v *= 3;
                    }
                    if e1 == 2 {
                        v *= 5;
                    }
                    if e2 == 2 {
                        v = -v;
                    }
                    out[idx] += v;
                }
                out
            }
        }
    }

    /// `(N(b), g_1(b), g_2(c_1), c_2)`.
    fn tower(&self, b: &Vec8Z) -> (Integer, Vec8Z, Vec8Z, Vec8Z) {
        let g1b = self.chain[0].mul_vec(b);
        let c1 = self.mul(b, &g1b);
        let g2c1 = self.chain[1].mul_vec(&c1);
        let c2 = self.mul(&c1, &g2c1);
        (self.quadratic_norm(&c2), g1b, g2c1, c2)
    }

    /// `N_{L/Q}(c)` for `c` in the quadratic subfield.
    fn quadratic_norm(&self, c: &Vec8Z) -> Integer {
        let q = &self.quad;
        let tj = &q.theta[q.j];
        let v = &c[q.j];
        let u = Integer::from(&c[0] * tj) - Integer::from(v * &q.theta[0]);
        debug_assert_eq!(c.scale(tj), Vec8Z::unit(0).scale(&u).add(&q.theta.scale(v)), "not in L");
        let mut num = Integer::from(u.square_ref());
        num += Integer::from(&u * v) * &q.t;
        num += Integer::from(v.square_ref()) * &q.n;
        num.div_exact(&Integer::from(tj.square_ref()))
    }

    /// `N(b)` for integer reference coordinates.
    pub fn norm(&self, b: &Vec8Z) -> Integer {
        self.tower(b).0
    }

    /// `(N(b), a·N(b)/b)` for integer reference coordinates.
    pub fn norm_and_scaled_quotient(&self, a: &Vec8Z, b: &Vec8Z) -> (Integer, Vec8Z) {
        let (n, g1b, g2c1, c2) = self.tower(b);
        let g3c2 = self.chain[2].mul_vec(&c2);
        // balanced products: n×n, 2n×2n, 4n×4n bits
        let y = self.mul(&self.mul(&self.mul(a, &g1b), &g2c1), &g3c2);
        (n, y)
    }

    /// `d·x` in reference coordinates, for `x` in B-coordinates.
    pub fn to_p(&self, x: &Vec8Z) -> Vec8Z {
        self.b_to_p.mul_vec(x)
    }

    /// B-coordinates of `z / d^k`, for `z` in reference coordinates.
    pub fn from_p_scaled(&self, z: &Vec8Z, k: u32) -> Vec8Z {
        let v = self.p_to_b.mul_vec(z);
        if self.d == 1 {
            return v;
        }
        let dk = Integer::from((&self.d).pow(k));
        Vec8Z::from_fn(|i| v[i].clone().div_exact(&dk))
    }

    /// Product of two elements in B-coordinates.
    pub fn mul_b(&self, x: &Vec8Z, y: &Vec8Z) -> Vec8Z {
        self.from_p_scaled(&self.mul(&self.to_p(x), &self.to_p(y)), 2)
    }

    /// Norm of an element in B-coordinates.
    pub fn norm_b(&self, x: &Vec8Z) -> Integer {
        self.unscale_norm(self.norm(&self.to_p(x)))
    }

    /// `N(x)` from `N(d·x) = d^8·N(x)`.
    pub fn unscale_norm(&self, n: Integer) -> Integer {
        if self.d == 1 {
            n
        } else {
            n.div_exact(&Integer::from((&self.d).pow(8u32)))
        }
    }
}
