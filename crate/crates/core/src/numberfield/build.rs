//! Certified construction of [`FieldData`].
//!
//! Every step is exact and ends in a checked certificate; any failure is a
//! [`Error::CertificateFailure`] rather than a silently wrong table.

use std::collections::HashSet;

use rug::{Integer, Rational};

use super::defs::{self, FieldDef};
use super::{FieldData, FieldId, SCHEMA_VERSION};
use crate::e8::{bourbaki_simple_roots, CARTAN};
use crate::error::{Error, Result};
use crate::exactalg::dense::{self, MatQ, MatZ};
use crate::exactalg::{determinant, inverse, Mat8Q, Mat8Z, Vec8Q, Vec8Z};

type Table = [Vec<Vec8Q>];

pub(crate) fn mul_in(table: &Table, x: &Vec8Q, y: &Vec8Q) -> Vec8Q {
    let mut out = Vec8Q::zero();
    for i in 0..8 {
        if x[i].cmp0().is_eq() {
            continue;
        }
        for j in 0..8 {
            if y[j].cmp0().is_eq() {
                continue;
            }
            let c = Rational::from(&x[i] * &y[j]);
            for k in 0..8 {
                if table[i][j][k].cmp0().is_ne() {
                    out[k] += Rational::from(&c * &table[i][j][k]);
                }
            }
        }
    }
    out
}

/// Column j is `x · p_j`.
fn mult_matrix_in(table: &Table, x: &Vec8Q) -> Mat8Q {
    let cols: [Vec8Q; 8] = std::array::from_fn(|j| mul_in(table, x, &Vec8Q::unit(j)));
    Mat8Q::from_columns(&cols)
}

pub(crate) fn invert_in(table: &Table, x: &Vec8Q) -> Option<Vec8Q> {
    crate::exactalg::solve_linear(&mult_matrix_in(table, x), &Vec8Q::unit(0)).ok()
}

fn trace_in(table: &Table, x: &Vec8Q) -> Rational {
    let m = mult_matrix_in(table, x);
    let mut t = Rational::new();
    for i in 0..8 {
        t += &m[i][i];
    }
    t
}

fn is_algebraic_integer(table: &Table, x: &Vec8Q) -> bool {
    dense::charpoly_q(&mult_matrix_in(table, x).to_dense())
        .iter()
        .all(|c| *c.denom() == 1)
}

fn fail(field: FieldId, what: impl Into<String>) -> Error {
    Error::CertificateFailure { field, what: what.into() }
}

fn positive_definite(m: &MatQ) -> bool {
    (1..=m.len()).all(|k| {
        let minor: MatQ = m[..k].iter().map(|r| r[..k].to_vec()).collect();
        dense::det_q(minor).cmp0().is_gt()
    })
}

/// Primes p with p² dividing `n` (n ≠ 0), by trial division.
fn square_prime_divisors(n: &Integer) -> Vec<u32> {
    let mut n = Integer::from(n.abs_ref());
    let mut out = Vec::new();
    let mut p = 2u32;
    while Integer::from(p) * p <= n {
        let mut e = 0;
        while n.is_divisible_u(p) {
            n /= p;
            e += 1;
        }
        if e >= 2 {
            out.push(p);
        }
        p += 1;
    }
    out
}

/// Basis (over F_p) of the kernel of `a mod p`.
fn kernel_mod_p(a: &MatZ, p: u32) -> Vec<Vec<u32>> {
    let n = a.len();
    let pp = u64::from(p);
    let mut m: Vec<Vec<u64>> = a
        .iter()
        .map(|r| r.iter().map(|x| u64::from(x.mod_u(p))).collect())
        .collect();
    let inv = |x: u64| -> u64 {
        let mut r = 1u64;
        let (mut b, mut e) = (x % pp, pp - 2);
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % pp;
            }
            b = b * b % pp;
            e >>= 1;
        }
        r
    };
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..n {
        let Some(piv) = (row..n).find(|&r| m[r][col] != 0) else { continue };
        m.swap(row, piv);
        let s = inv(m[row][col]);
        for x in &mut m[row] {
            *x = *x * s % pp;
        }
        for r in 0..n {
            if r != row && m[r][col] != 0 {
                let f = m[r][col];
                for c in 0..n {
                    m[r][c] = (m[r][c] + pp * pp - f * m[row][c]) % pp;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![0u32; n];
            v[f] = 1;
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = ((pp - m[r][f]) % pp) as u32;
            }
            v
        })
        .collect()
}

/// Columns of `w` plus `extra`, reduced to a basis of the lattice they span.
fn lattice_sum(w: &Mat8Q, extra: &Vec8Q) -> Mat8Q {
    let mut den = Integer::from(1);
    for x in w.0.iter().flatten().chain(extra.0.iter()) {
        den.lcm_mut(x.denom());
    }
    let scaled = |x: &Rational| Rational::from(x * &den).numer().clone();
    let a: MatZ = (0..8)
        .map(|i| {
            let mut row: Vec<Integer> = (0..8).map(|j| scaled(&w[i][j])).collect();
            row.push(scaled(&extra[i]));
            row
        })
        .collect();
    let (h, _, rank) = dense::hnf_columns(&a);
    assert_eq!(rank, 8);
    Mat8Q::from_fn(|i, j| Rational::from((h[i][j].clone(), den.clone())))
}

/// Trace-form discriminant of the lattice with basis columns `w`.
fn discriminant(table: &Table, w: &Mat8Q) -> Rational {
    let cols: Vec<Vec8Q> = (0..8).map(|j| w.column(j)).collect();
    let g = Mat8Q::from_fn(|i, j| trace_in(table, &mul_in(table, &cols[i], &cols[j])));
    determinant(&g)
}

/// Enlarges the reference order to the ring of integers by adjoining
/// elements `x/p`, x in the current order, that are algebraic integers.
///
/// Stops when the discriminant reaches `target`, the discriminant of the ring
/// of integers; only primes dividing the remaining index are searched.
fn maximal_order(def: &FieldDef, target: &Integer) -> Option<Mat8Q> {
    let table = &def.table;
    let mut w = Mat8Q::identity();
    'grow: loop {
        let disc = discriminant(table, &w);
        if disc == *target {
            return Some(w);
        }
        let (index_sq, rem) = disc.numer().clone().div_rem(target.clone());
        if rem.cmp0().is_ne() {
            return None;
        }
        let cols: Vec<Vec8Q> = (0..8).map(|j| w.column(j)).collect();
        let tr = Mat8Z::from_fn(|i, j| trace_in(table, &mul_in(table, &cols[i], &cols[j])).numer().clone());
        for p in square_prime_divisors(&index_sq) {
            let ker = kernel_mod_p(&tr.to_dense(), p);
            let r = ker.len() as u32;
            // every nonzero F_p-combination of the kernel basis
            for code in 1..u64::from(p).pow(r) {
                let mut c = [0u64; 8];
                let mut t = code;
                for k in &ker {
                    let a = t % u64::from(p);
                    t /= u64::from(p);
                    for i in 0..8 {
                        c[i] = (c[i] + a * u64::from(k[i])) % u64::from(p);
                    }
                }
                let y = Vec8Q::from_fn(|i| {
                    let mut acc = Rational::new();
                    for j in 0..8 {
                        acc += Rational::from(&w[i][j] * c[j]);
                    }
                    acc / p
                });
                if is_algebraic_integer(table, &y) {
                    w = lattice_sum(&w, &y);
                    continue 'grow;
                }
            }
        }
        return None;
    }
}

/// Exact data about the order with basis W, in W-coordinates.
struct Order {
    w: Mat8Q,
    /// `mult[k]`: multiplication by `w_k`.
    mult: Vec<Mat8Z>,
    conj: Mat8Z,
    trace: Vec8Z,
}

impl Order {
    fn new(id: FieldId, def: &FieldDef, w: Mat8Q) -> Result<Self> {
        let table = &def.table[..];
        let w_inv = inverse(&w).map_err(|_| fail(id, "order basis is singular"))?;
        let mut mult = Vec::with_capacity(8);
        for k in 0..8 {
            let m = w_inv.mul(&mult_matrix_in(table, &w.column(k)).mul(&w));
            mult.push(m.to_integer().ok_or_else(|| fail(id, "order is not closed under multiplication"))?);
        }
        let conj_p = Mat8Q::from_columns(&std::array::from_fn(|j| def.conj[j].clone()));
        let conj = w_inv
            .mul(&conj_p.mul(&w))
            .to_integer()
            .ok_or_else(|| fail(id, "order is not closed under conjugation"))?;
        let trace = Vec8Z::from_fn(|k| {
            let mut t = Integer::new();
            for i in 0..8 {
                t += &mult[k][i][i];
            }
            t
        });
        Ok(Order { w, mult, conj, trace })
    }

    fn mult_matrix(&self, x: &Vec8Z) -> Mat8Z {
        let mut out = Mat8Z::default();
        for (k, xk) in x.0.iter().enumerate() {
            if xk.cmp0().is_eq() {
                continue;
            }
            for i in 0..8 {
                for j in 0..8 {
                    if self.mult[k][i][j].cmp0().is_ne() {
                        out[i][j] += xk * &self.mult[k][i][j];
                    }
                }
            }
        }
        out
    }

    fn mult_matrix_q(&self, x: &Vec8Q) -> Mat8Q {
        let mut out = Mat8Q::zero();
        for (k, xk) in x.0.iter().enumerate() {
            if xk.cmp0().is_eq() {
                continue;
            }
            for i in 0..8 {
                for j in 0..8 {
                    if self.mult[k][i][j].cmp0().is_ne() {
                        out[i][j] += Rational::from(xk * &self.mult[k][i][j]);
                    }
                }
            }
        }
        out
    }

    fn trace_z(&self, x: &Vec8Z) -> Integer {
        let mut t = Integer::new();
        for i in 0..8 {
            t += &x[i] * &self.trace[i];
        }
        t
    }

    fn trace_q(&self, x: &Vec8Q) -> Rational {
        x.dot(&self.trace.to_rational())
    }

    fn to_p(&self, x: &Vec8Q) -> Vec8Q {
        self.w.mul_vec(x)
    }
}

/// A certified choice of δ: the trace form `Tr(x·ȳ/δ)` on the order.
struct E8Form {
    delta_w: Vec8Z,
    gram_w: Mat8Q,
    roots_w: Vec<Vec8Z>,
}

/// Checks that `Tr(x·ȳ/δ)` makes the order an even unimodular positive
/// definite lattice with 240 roots.
fn e8_form(order: &Order, delta_w: &Vec8Z) -> Option<E8Form> {
    let l = order.mult_matrix(delta_w).to_rational();
    let one_w = {
        // 1 in W-coordinates: the unique e with e·w_0 = w_0
        let m0 = order.mult_matrix_q(&Vec8Q::unit(0));
        crate::exactalg::solve_linear(&m0, &Vec8Q::unit(0)).ok()?
    };
    let delta_inv = crate::exactalg::solve_linear(&l, &one_w).ok()?;
    let dinv = order.mult_matrix_q(&delta_inv);
    let conj = order.conj.to_rational();
    let gram = Mat8Q::from_fn(|i, j| {
        // Tr(w_i · conj(w_j) · δ⁻¹)
        let cj = dinv.mul_vec(&conj.column(j));
        let prod = order.mult_matrix_q(&Vec8Q::unit(i)).mul_vec(&cj);
        order.trace_q(&prod)
    });
    gram.to_integer()?;
    if (0..8).any(|i| !gram[i][i].numer().is_even()) {
        return None;
    }
    let dense_gram = gram.to_dense();
    if !positive_definite(&dense_gram) || determinant(&gram) != 1 {
        return None;
    }
    let roots_w = enumerate_roots(&gram);
    if roots_w.len() != 240 {
        return None;
    }
    Some(E8Form { delta_w: delta_w.clone(), gram_w: gram, roots_w })
}

/// All vectors of inner square 2 under `gram`, sorted.
pub fn enumerate_roots(gram: &Mat8Q) -> Vec<Vec8Z> {
    let mut out: Vec<Vec8Z> = dense::short_vectors(&gram.to_dense(), &Rational::from(2))
        .into_iter()
        .map(|v| Vec8Z::from_fn(|i| v[i].clone()))
        .filter(|v| gram.bilinear(&v.to_rational(), &v.to_rational()) == 2)
        .collect();
    out.sort();
    out
}

/// A base of simple roots of the root system `roots` (coordinates in the
/// lattice basis underlying `gram`), ordered so that its Gram matrix is the
/// E8 Cartan matrix.
pub fn find_simple_roots(gram: &Mat8Q, roots: &[Vec8Z]) -> Result<[Vec8Z; 8]> {
    let max = roots
        .iter()
        .flat_map(|r| r.0.iter())
        .map(|x| x.clone().abs())
        .max()
        .ok_or(Error::BaseNotFound)?;
    // Σ v_i·K^i with K > 2·max is nonzero on every nonzero difference of roots
    let k = Integer::from(&max * 2u32) + 1u32;
    let functional = |v: &Vec8Z| {
        let mut acc = Integer::new();
        let mut pow = Integer::from(1);
        for x in &v.0 {
            acc += x * &pow;
            pow *= &k;
        }
        acc
    };
    let positive: Vec<&Vec8Z> = roots.iter().filter(|r| functional(r).cmp0().is_gt()).collect();
    let pos_set: HashSet<&Vec8Z> = positive.iter().copied().collect();
    let simple: Vec<&Vec8Z> = positive
        .iter()
        .copied()
        .filter(|a| !positive.iter().any(|b| pos_set.contains(&a.sub(b))))
        .collect();
    if simple.len() != 8 {
        return Err(Error::BaseNotFound);
    }
    let ip = |a: &Vec8Z, b: &Vec8Z| gram.bilinear(&a.to_rational(), &b.to_rational());
    let pair: Vec<Vec<Rational>> = simple.iter().map(|a| simple.iter().map(|b| ip(a, b)).collect()).collect();

    fn place(pos: usize, perm: &mut Vec<usize>, used: &mut [bool; 8], pair: &[Vec<Rational>]) -> bool {
        if pos == 8 {
            return true;
        }
        for c in 0..8 {
            if used[c] {
                continue;
            }
            let fits = perm
                .iter()
                .enumerate()
                .all(|(q, &pc)| pair[c][pc] == CARTAN[pos][q])
                && pair[c][c] == CARTAN[pos][pos];
            if fits {
                used[c] = true;
                perm.push(c);
                if place(pos + 1, perm, used, pair) {
                    return true;
                }
                perm.pop();
                used[c] = false;
            }
        }
        false
    }
    let mut perm = Vec::with_capacity(8);
    if !place(0, &mut perm, &mut [false; 8], &pair) {
        return Err(Error::BaseNotFound);
    }
    let base: [Vec8Z; 8] = std::array::from_fn(|i| simple[perm[i]].clone());

    // every root is an integer combination of the base with coefficients of one sign
    let m = Mat8Q::from_columns(&std::array::from_fn(|i| base[i].to_rational()));
    for r in roots {
        let c = crate::exactalg::solve_linear(&m, &r.to_rational()).map_err(|_| Error::BaseNotFound)?;
        let c = c.to_integer().ok_or(Error::BaseNotFound)?;
        let nonneg = c.0.iter().all(|x| x.cmp0().is_ge());
        let nonpos = c.0.iter().all(|x| x.cmp0().is_le());
        if !(nonneg || nonpos) {
            return Err(Error::BaseNotFound);
        }
    }
    Ok(base)
}

/// Strictly alternating coefficients: all roots positive for a real-rooted
/// polynomial.
fn roots_all_positive(coeffs: &[Rational]) -> bool {
    let n = coeffs.len() - 1;
    coeffs.iter().enumerate().all(|(k, c)| {
        let want_positive = (n - k) % 2 == 0;
        if want_positive {
            c.cmp0().is_gt()
        } else {
            c.cmp0().is_lt()
        }
    })
}

pub(crate) fn build(id: FieldId) -> Result<FieldData> {
    let def = defs::definition(id);
    let table = &def.table[..];

    // multiplication table sanity: p_0 = 1 and commutativity
    for i in 0..8 {
        if table[0][i] != Vec8Q::unit(i) {
            return Err(fail(id, "p_0 is not the identity"));
        }
        for j in 0..8 {
            if table[i][j] != table[j][i] {
                return Err(fail(id, "multiplication is not commutative"));
            }
        }
    }

    let delta_k = Integer::from(def.disc_k);
    let disc_f = Integer::from(delta_k.square_ref());

    // F/K is unramified, so the ring of integers has discriminant Δ_K²
    let w = maximal_order(&def, &disc_f).ok_or_else(|| fail(id, "could not reach discriminant Δ_K²"))?;
    let order = Order::new(id, &def, w)?;

    // O_K = fixed points of conjugation
    let fix: MatZ = (0..8)
        .map(|i| (0..8).map(|j| Integer::from(&order.conj[i][j] - u8::from(i == j))).collect())
        .collect();
    let (_, u, rank) = dense::hnf_columns(&fix);
    if rank != 4 {
        return Err(fail(id, format!("conjugation fixes a rank-{} sublattice", 8 - rank)));
    }
    let k_basis: Vec<Vec8Z> = (rank..8).map(|j| Vec8Z::from_fn(|i| u[i][j].clone())).collect();
    let tr_f = |a: &Vec8Z, b: &Vec8Z| order.trace_z(&order.mult_matrix(a).mul_vec(b));
    let g_k: MatQ = k_basis
        .iter()
        .map(|a| k_basis.iter().map(|b| Rational::from(tr_f(a, b))).collect())
        .collect();
    let red = dense::lll_gram(&g_k);
    let k_basis: Vec<Vec8Z> = (0..4)
        .map(|j| {
            let mut v = Vec8Z::zero();
            for (i, b) in k_basis.iter().enumerate() {
                v = v.add(&b.scale(&red[i][j]));
            }
            v
        })
        .collect();
    let g_k: MatQ = k_basis
        .iter()
        .map(|a| k_basis.iter().map(|b| Rational::from(tr_f(a, b))).collect())
        .collect();
    // Tr_F = 2·Tr_K on K
    if dense::det_q(g_k.clone()) != Integer::from(&delta_k * 16u32) {
        return Err(fail(id, "totally real subfield does not have discriminant Δ_K"));
    }

    let form = search_delta(id, &def, &order, &k_basis, &g_k, &delta_k)?;

    // simple roots, in W-coordinates
    let base = find_simple_roots(&form.gram_w, &form.roots_w)?;
    let base_w = Mat8Q::from_columns(&std::array::from_fn(|i| base[i].to_rational()));
    let basis_b = order.w.mul(&base_w);
    let base_w_inv = inverse(&base_w).map_err(|_| fail(id, "simple roots are dependent"))?;
    let mut roots: Vec<Vec8Z> = form
        .roots_w
        .iter()
        .map(|r| base_w_inv.mul_vec(&r.to_rational()).to_integer())
        .collect::<Option<_>>()
        .ok_or_else(|| fail(id, "roots are not integral in the simple-root basis"))?;
    roots.sort();

    let delta_p = order.to_p(&form.delta_w.to_rational());
    let delta_inv = invert_in(table, &delta_p).ok_or_else(|| fail(id, "δ is not invertible"))?;
    let conj_matrix = Mat8Q::from_columns(&std::array::from_fn(|j| def.conj[j].clone()));
    let gram_p = Mat8Q::from_fn(|i, j| {
        let cj = conj_matrix.column(j);
        trace_in(table, &mul_in(table, &mul_in(table, &Vec8Q::unit(i), &cj), &delta_inv))
    });
    let s = bourbaki_simple_roots();
    let embedding_s = Mat8Q::from_columns(&std::array::from_fn(|j| s[j].to_std().0));

    let norm = determinant(&mult_matrix_in(table, &def.maximizer));
    if norm != def.sup {
        return Err(fail(id, format!("maximizer has norm {norm}, expected {}", def.sup)));
    }

    let data = FieldData {
        schema_version: SCHEMA_VERSION,
        id,
        power_mult_table: def.table.clone(),
        conj_matrix,
        delta: delta_p,
        disc_k: def.disc_k,
        basis_b,
        gram_p,
        embedding_s,
        roots,
        euclidean_minimum: def.euclidean_minimum.clone(),
        norm_sup_voronoi: def.sup.clone(),
        sup_maximizer: def.maximizer.clone(),
        derived: Default::default(),
    }
    .complete()?;
    if !data.in_voronoi(&data.from_p(&data.sup_maximizer)) {
        return Err(fail(id, "maximizer is outside the Voronoi cell"));
    }
    Ok(data)
}

/// Finds the canonical δ: among totally positive generators of the different
/// of K, ordered by `(Tr(δ²), P-coordinates)`, the first whose trace form is
/// E8 and whose Voronoi cell contains the recorded maximizer.
fn search_delta(
    id: FieldId,
    def: &FieldDef,
    order: &Order,
    k_basis: &[Vec8Z],
    g_k: &MatQ,
    delta_k: &Integer,
) -> Result<E8Form> {
    let target_norm = Integer::from(delta_k.square_ref());
    // Tr_F(δ²) ≥ 8·√Δ_K for a totally positive δ of norm Δ_K over K
    let mut bound = Integer::from(Integer::from(delta_k * 64u32).sqrt_ref()) + 1u32;
    let max_bound = Integer::from(&bound << 12);
    let maximizer_w = inverse(&order.w)
        .map_err(|_| fail(id, "order basis is singular"))?
        .mul_vec(&def.maximizer);
    let mut seen = HashSet::new();
    while bound <= max_bound {
        let mut cands: Vec<(Integer, Vec8Q, Vec8Z)> = Vec::new();
        for v in dense::short_vectors(g_k, &Rational::from(&bound)) {
            let mut d = Vec8Z::zero();
            for (i, b) in k_basis.iter().enumerate() {
                d = d.add(&b.scale(&v[i]));
            }
            let tr = order.trace_z(&d);
            // Tr_F(δ) = 2·Tr_K(δ) ≥ 8·Δ_K^(1/4)
            if tr.cmp0().is_le() || Integer::from(tr.square_ref()).square() < Integer::from(delta_k * 4096u32) {
                continue;
            }
            let l = order.mult_matrix(&d);
            if crate::exactalg::determinant_z(&l) != target_norm {
                continue;
            }
            if !roots_all_positive(&dense::charpoly_q(&l.to_rational().to_dense())) {
                continue;
            }
            let t2 = order.trace_z(&l.mul_vec(&d));
            cands.push((t2, order.to_p(&d.to_rational()), d));
        }
        cands.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1 .0.cmp(&b.1 .0)));
        for (_, _, d) in cands {
            if !seen.insert(d.clone()) {
                continue;
            }
            let Some(form) = e8_form(order, &d) else { continue };
            // ⟨m, ρ⟩ ≤ 1 for every root ρ
            let inside = form.roots_w.iter().all(|r| {
                let ip = form.gram_w.bilinear(&maximizer_w, &r.to_rational());
                ip.cmp_abs(&Rational::from(1)).is_le()
            });
            if inside {
                return Ok(form);
            }
        }
        bound *= 2u32;
    }
    Err(fail(id, "no totally positive generator of the different gives an E8 form"))
}
