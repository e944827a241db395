//! Small dense exact routines on `Vec<Vec<_>>` matrices.
//!
//! These back the fixed-size 8x8 API and the field construction, which also
//! needs 4x4 and 8x9 shapes. Matrices are row-major.

use rug::ops::DivRounding;
use rug::{Integer, Rational};

pub type MatQ = Vec<Vec<Rational>>;
pub type MatZ = Vec<Vec<Integer>>;

fn pivot_row<T>(a: &[Vec<T>], col: usize, from: usize, nonzero: impl Fn(&T) -> bool) -> Option<usize> {
    (from..a.len()).find(|&r| nonzero(&a[r][col]))
}

pub fn det_q(mut a: MatQ) -> Rational {
    let n = a.len();
    let mut det = Rational::from(1);
    for k in 0..n {
        let Some(p) = pivot_row(&a, k, k, |x: &Rational| x.cmp0().is_ne()) else {
            return Rational::new();
        };
        if p != k {
            a.swap(p, k);
            det = -det;
        }
        det *= &a[k][k];
        for i in k + 1..n {
            if a[i][k].cmp0().is_eq() {
                continue;
            }
            let f = Rational::from(&a[i][k] / &a[k][k]);
            for j in k..n {
                let t = Rational::from(&f * &a[k][j]);
                a[i][j] -= t;
            }
        }
    }
    det
}

/// Reduces `[a | b]` to reduced row echelon form; `None` when `a` is singular.
fn gauss_jordan(mut a: MatQ, mut b: MatQ) -> Option<MatQ> {
    let n = a.len();
    let m = b.first().map_or(0, Vec::len);
    for k in 0..n {
        let p = pivot_row(&a, k, k, |x: &Rational| x.cmp0().is_ne())?;
        a.swap(p, k);
        b.swap(p, k);
        let inv = Rational::from(a[k][k].recip_ref());
        for j in k..n {
            a[k][j] *= &inv;
        }
        for j in 0..m {
            b[k][j] *= &inv;
        }
        for i in 0..n {
            if i == k || a[i][k].cmp0().is_eq() {
                continue;
            }
            let f = a[i][k].clone();
            for j in k..n {
                let t = Rational::from(&f * &a[k][j]);
                a[i][j] -= t;
            }
            for j in 0..m {
                let t = Rational::from(&f * &b[k][j]);
                b[i][j] -= t;
            }
        }
    }
    Some(b)
}

pub fn solve_q(a: MatQ, rhs: Vec<Rational>) -> Option<Vec<Rational>> {
    let b = rhs.into_iter().map(|x| vec![x]).collect();
    gauss_jordan(a, b).map(|b| b.into_iter().map(|mut r| r.pop().unwrap()).collect())
}

pub fn inverse_q(a: MatQ) -> Option<MatQ> {
    let n = a.len();
    let id = (0..n)
        .map(|i| (0..n).map(|j| Rational::from(u8::from(i == j))).collect())
        .collect();
    gauss_jordan(a, id)
}

pub fn mat_mul_q(a: &MatQ, b: &MatQ) -> MatQ {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    let mut acc = Rational::new();
                    for k in 0..inner {
                        acc += Rational::from(&row[k] * &b[k][j]);
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

/// Characteristic polynomial `det(xI - a)`, coefficients from constant term
/// up to the monic leading 1 (Faddeev–LeVerrier).
pub fn charpoly_q(a: &MatQ) -> Vec<Rational> {
    let n = a.len();
    let mut coeffs = vec![Rational::new(); n + 1];
    coeffs[n] = Rational::from(1);
    let mut m: MatQ = vec![vec![Rational::new(); n]; n];
    for k in 1..=n {
        // M_k = A·M_{k-1} + c_{n-k+1}·I
        let mut next = mat_mul_q(a, &m);
        for (i, row) in next.iter_mut().enumerate() {
            row[i] += &coeffs[n - k + 1];
        }
        m = next;
        let am = mat_mul_q(a, &m);
        let mut tr = Rational::new();
        for (i, row) in am.iter().enumerate() {
            tr += &row[i];
        }
        coeffs[n - k] = -tr / Rational::from(k as u32);
    }
    coeffs
}

/// Bareiss fraction-free determinant.
pub fn det_z(mut a: MatZ) -> Integer {
    let n = a.len();
    if n == 0 {
        return Integer::from(1);
    }
    let mut sign = 1;
    let mut prev = Integer::from(1);
    for k in 0..n - 1 {
        let Some(p) = pivot_row(&a, k, k, |x: &Integer| x.cmp0().is_ne()) else {
            return Integer::new();
        };
        if p != k {
            a.swap(p, k);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let mut t = Integer::from(&a[i][j] * &a[k][k]);
                t -= &a[i][k] * &a[k][j];
                t.div_exact_mut(&prev);
                a[i][j] = t;
            }
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    if sign < 0 {
        -d
    } else {
        d
    }
}

/// Bareiss solve of `a·x = rhs`. Returns `(y, d)` with `d > 0`, `x = y/d`,
/// and `d = |det a|`.
pub fn solve_z(mut a: MatZ, mut rhs: Vec<Integer>) -> Option<(Vec<Integer>, Integer)> {
    let n = a.len();
    let mut prev = Integer::from(1);
    for k in 0..n {
        let p = pivot_row(&a, k, k, |x: &Integer| x.cmp0().is_ne())?;
        if p != k {
            a.swap(p, k);
            rhs.swap(p, k);
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let mut t = Integer::from(&a[i][j] * &a[k][k]);
                t -= &a[i][k] * &a[k][j];
                t.div_exact_mut(&prev);
                a[i][j] = t;
            }
            let mut t = Integer::from(&rhs[i] * &a[k][k]);
            t -= &a[i][k] * &rhs[k];
            t.div_exact_mut(&prev);
            rhs[i] = t;
            a[i][k] = Integer::new();
        }
        prev = a[k][k].clone();
    }
    // a is upper triangular with a[n-1][n-1] = ±det; back-substitute y = d·x.
    let d = a[n - 1][n - 1].clone();
    let mut y = vec![Integer::new(); n];
    for i in (0..n).rev() {
        let mut acc = Integer::from(&d * &rhs[i]);
        for j in i + 1..n {
            acc -= &a[i][j] * &y[j];
        }
        acc.div_exact_mut(&a[i][i]);
        y[i] = acc;
    }
    if d.cmp0().is_lt() {
        for v in &mut y {
            *v = Integer::from(-&*v);
        }
        Some((y, -d))
    } else {
        Some((y, d))
    }
}

/// Column-style Hermite reduction: returns `(h, u)` with `a·u = h`, `u`
/// unimodular, and the nonzero columns of `h` first, in echelon form. The
/// trailing columns of `u` matching zero columns of `h` span the integer
/// kernel of `a`.
pub fn hnf_columns(a: &MatZ) -> (MatZ, MatZ, usize) {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut h = a.clone();
    let mut u: MatZ = (0..cols)
        .map(|i| (0..cols).map(|j| Integer::from(u8::from(i == j))).collect())
        .collect();
    let col_op = |m: &mut MatZ, k: usize, c: usize, s: &Integer, t: &Integer, x: &Integer, y: &Integer| {
        // (col_k, col_c) <- (s·col_k + t·col_c, x·col_k + y·col_c)
        for row in m.iter_mut() {
            let nk = Integer::from(s * &row[k]) + Integer::from(t * &row[c]);
            let nc = Integer::from(x * &row[k]) + Integer::from(y * &row[c]);
            row[k] = nk;
            row[c] = nc;
        }
    };
    let mut k = 0;
    for r in 0..rows {
        if k == cols {
            break;
        }
        for c in k + 1..cols {
            if h[r][c].cmp0().is_eq() {
                continue;
            }
            let a0 = h[r][k].clone();
            let b0 = h[r][c].clone();
            let (g, s, t) = a0.clone().extended_gcd(b0.clone(), Integer::new());
            let x = Integer::from(-&b0) / &g;
            let y = a0 / &g;
            col_op(&mut h, k, c, &s, &t, &x, &y);
            col_op(&mut u, k, c, &s, &t, &x, &y);
        }
        if h[r][k].cmp0().is_ne() {
            if h[r][k].cmp0().is_lt() {
                for m in [&mut h, &mut u] {
                    for row in m.iter_mut() {
                        row[k] = Integer::from(-&row[k]);
                    }
                }
            }
            // Reduce earlier pivot columns modulo this one.
            for c in 0..k {
                let q = h[r][c].clone().div_floor(&h[r][k]);
                if q.cmp0().is_ne() {
                    for m in [&mut h, &mut u] {
                        for row in m.iter_mut() {
                            let t = Integer::from(&q * &row[k]);
                            row[c] -= t;
                        }
                    }
                }
            }
            k += 1;
        }
    }
    (h, u, k)
}

/// LLL reduction of a basis given only through its Gram matrix (δ = 3/4).
/// Returns the unimodular transform `u` (columns are new basis vectors in old
/// coordinates).
pub fn lll_gram(gram: &MatQ) -> MatZ {
    let n = gram.len();
    let mut u: MatZ = (0..n)
        .map(|i| (0..n).map(|j| Integer::from(u8::from(i == j))).collect())
        .collect();
    let mut g = gram.clone();
    let gso = |g: &MatQ| -> (MatQ, Vec<Rational>) {
        let mut mu = vec![vec![Rational::new(); n]; n];
        let mut b = vec![Rational::new(); n];
        for i in 0..n {
            for j in 0..i {
                let mut s = g[i][j].clone();
                for k in 0..j {
                    s -= Rational::from(&mu[j][k] * &mu[i][k]) * &b[k];
                }
                mu[i][j] = s / &b[j];
            }
            let mut s = g[i][i].clone();
            for k in 0..i {
                s -= Rational::from(&mu[i][k] * &mu[i][k]) * &b[k];
            }
            b[i] = s;
        }
        (mu, b)
    };
    // Apply basis change b_i <- b_i - q·b_j to gram and u.
    let reduce = |g: &mut MatQ, u: &mut MatZ, i: usize, j: usize, q: &Integer| {
        let qr = Rational::from(q);
        for row in u.iter_mut() {
            let t = Integer::from(q * &row[j]);
            row[i] -= t;
        }
        for k in 0..n {
            let t = Rational::from(&qr * &g[j][k]);
            g[i][k] -= t;
        }
        for k in 0..n {
            let t = Rational::from(&qr * &g[k][j]);
            g[k][i] -= t;
        }
    };
    let swap = |g: &mut MatQ, u: &mut MatZ, i: usize, j: usize| {
        g.swap(i, j);
        for row in g.iter_mut() {
            row.swap(i, j);
        }
        for row in u.iter_mut() {
            row.swap(i, j);
        }
    };
    let three_quarters = Rational::from((3, 4));
    let mut k = 1;
    while k < n {
        for j in (0..k).rev() {
            let (mu, _) = gso(&g);
            let q = mu[k][j].clone().round().into_numer_denom().0;
            if q.cmp0().is_ne() {
                reduce(&mut g, &mut u, k, j, &q);
            }
        }
        let (mu, b) = gso(&g);
        let lhs = b[k].clone();
        let rhs = (three_quarters.clone() - Rational::from(&mu[k][k - 1] * &mu[k][k - 1])) * &b[k - 1];
        if lhs >= rhs {
            k += 1;
        } else {
            swap(&mut g, &mut u, k, k - 1);
            k = (k - 1).max(1);
        }
    }
    u
}

/// All nonzero integer vectors `v` with `vᵀ·gram·v ≤ bound`, by exact
/// Fincke–Pohst enumeration. `gram` must be positive definite.
pub fn short_vectors(gram: &MatQ, bound: &Rational) -> Vec<Vec<Integer>> {
    let n = gram.len();
    // Q(v) = Σ_i q_ii (v_i + Σ_{j>i} q_ij v_j)²
    let mut a = gram.clone();
    let mut q = vec![vec![Rational::new(); n]; n];
    for i in 0..n {
        q[i][i] = a[i][i].clone();
        assert!(q[i][i].cmp0().is_gt(), "form is not positive definite");
        for j in i + 1..n {
            q[i][j] = Rational::from(&a[i][j] / &a[i][i]);
        }
        for j in i + 1..n {
            for k in j..n {
                let t = Rational::from(&q[i][j] * &q[i][k]) * &q[i][i];
                a[j][k] -= &t;
                if j != k {
                    a[k][j] -= t;
                }
            }
        }
    }
    let mut out = Vec::new();
    let mut v = vec![Integer::new(); n];
    enumerate_level(&q, n - 1, bound.clone(), &mut v, &mut out);
    out.retain(|w| w.iter().any(|x| x.cmp0().is_ne()));
    out
}

fn enumerate_level(q: &MatQ, i: usize, rem: Rational, v: &mut Vec<Integer>, out: &mut Vec<Vec<Integer>>) {
    let n = q.len();
    let mut center = Rational::new();
    for j in i + 1..n {
        center -= Rational::from(&q[i][j] * &v[j]);
    }
    let t = Rational::from(&rem / &q[i][i]);
    let radius = Integer::from(t.floor_ref()).sqrt() + 1u32;
    let lo = Integer::from(center.floor_ref()) - &radius;
    let hi = Integer::from(center.ceil_ref()) + &radius;
    let mut x = lo;
    while x <= hi {
        let d = Rational::from(&x - &center);
        let val = Rational::from(d.square_ref()) * &q[i][i];
        if val <= rem {
            v[i] = x.clone();
            let left = Rational::from(&rem - &val);
            if i == 0 {
                out.push(v.clone());
            } else {
                enumerate_level(q, i - 1, left, v, out);
            }
        }
        x += 1u32;
    }
    v[i] = Integer::new();
}
