//! The standard E8 lattice in rational 8-space.
//!
//! E8 = D8 ∪ (D8 + ½·1), where D8 is the set of integer vectors with even
//! coordinate sum. The fast decoder rounds into each of the two cosets and
//! keeps the nearer candidate; [`cvp_bruteforce`] is an independent
//! exhaustive oracle used to check it.

use std::cmp::Ordering;
use std::fmt;

use rug::ops::DivRounding;
use rug::{Integer, Rational};
use serde::{Deserialize, Serialize};

use crate::exactalg::{Mat8Q, Vec8Q, Vec8Z};

/// The Gram matrix of the E8 simple roots (Bourbaki numbering).
pub const CARTAN: [[i64; 8]; 8] = [
    [2, 0, -1, 0, 0, 0, 0, 0],
    [0, 2, 0, -1, 0, 0, 0, 0],
    [-1, 0, 2, -1, 0, 0, 0, 0],
    [0, -1, -1, 2, -1, 0, 0, 0],
    [0, 0, 0, -1, 2, -1, 0, 0],
    [0, 0, 0, 0, -1, 2, -1, 0],
    [0, 0, 0, 0, 0, -1, 2, -1],
    [0, 0, 0, 0, 0, 0, -1, 2],
];

pub fn cartan_matrix() -> Mat8Q {
    Mat8Q::from_ints(CARTAN)
}

/// A point of rational 8-space in standard coordinates.
#[derive(Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StdVec8(pub Vec8Q);

impl StdVec8 {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_fn(f: impl FnMut(usize) -> Rational) -> Self {
        StdVec8(Vec8Q::from_fn(f))
    }

    pub fn from_ints(xs: [i64; 8]) -> Self {
        StdVec8(Vec8Q::from_ints(xs))
    }

    pub fn entries(&self) -> &[Rational; 8] {
        &self.0 .0
    }

    pub fn dot(&self, o: &StdVec8) -> Rational {
        self.0.dot(&o.0)
    }

    pub fn sub(&self, o: &StdVec8) -> StdVec8 {
        StdVec8(self.0.sub(&o.0))
    }

    pub fn add(&self, o: &StdVec8) -> StdVec8 {
        StdVec8(self.0.add(&o.0))
    }
}

impl From<Vec8Q> for StdVec8 {
    fn from(v: Vec8Q) -> Self {
        StdVec8(v)
    }
}

impl fmt::Debug for StdVec8 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

/// A point of the standard E8 lattice, stored as twice its coordinates.
///
/// Invariant: the doubled coordinates are all even or all odd, and their sum
/// is divisible by 4 (the coordinate sum is even).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct E8Point {
    twice: Vec8Z,
}

impl E8Point {
    pub fn origin() -> Self {
        E8Point { twice: Vec8Z::zero() }
    }

    pub fn from_twice(twice: Vec8Z) -> Option<Self> {
        let parity = twice[0].is_odd();
        if twice.0.iter().any(|t| t.is_odd() != parity) {
            return None;
        }
        let mut sum = Integer::new();
        for t in &twice.0 {
            sum += t;
        }
        if !sum.is_divisible_u(4) {
            return None;
        }
        Some(E8Point { twice })
    }

    /// The lattice point equal to `x`, if `x` lies in E8.
    pub fn from_std(x: &StdVec8) -> Option<Self> {
        let twice = x.0.scale(&Rational::from(2)).to_integer()?;
        Self::from_twice(twice)
    }

    pub fn twice(&self) -> &Vec8Z {
        &self.twice
    }

    pub fn is_half_integral(&self) -> bool {
        self.twice[0].is_odd()
    }

    pub fn to_std(&self) -> StdVec8 {
        StdVec8::from_fn(|i| Rational::from((self.twice[i].clone(), 2)))
    }

    pub fn add(&self, o: &E8Point) -> E8Point {
        E8Point { twice: self.twice.add(&o.twice) }
    }

    pub fn neg(&self) -> E8Point {
        E8Point { twice: self.twice.neg() }
    }

    pub fn norm2(&self) -> Rational {
        let mut acc = Integer::new();
        for t in &self.twice.0 {
            acc += t.square_ref();
        }
        Rational::from((acc, 4))
    }
}

impl fmt::Debug for E8Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "E8{:?}", self.to_std())
    }
}

/// `ceil((2x - d) / 2d)`: nearest integer to `x/d`, halves rounded down.
fn nearest_scaled(x: &Integer, d: &Integer) -> Integer {
    let num = Integer::from(x * 2u32) - d;
    let den = Integer::from(d * 2u32);
    num.div_ceil(den)
}

fn round_scaled(x: &Vec8Z, d: &Integer) -> Vec8Z {
    Vec8Z::from_fn(|i| nearest_scaled(&x[i], d))
}

fn wrong_way_scaled(x: &Vec8Z, d: &Integer, rounded: &Vec8Z) -> Vec8Z {
    // The first coordinate with maximal |x_i - d·r_i| is flipped.
    let offsets: Vec<Integer> = (0..8).map(|i| Integer::from(&x[i] - Integer::from(d * &rounded[i]))).collect();
    let mut best = 0;
    for i in 1..8 {
        if offsets[i].cmp_abs(&offsets[best]) == Ordering::Greater {
            best = i;
        }
    }
    let mut out = rounded.clone();
    if offsets[best].cmp0().is_lt() {
        out[best] -= 1u32;
    } else {
        out[best] += 1u32;
    }
    out
}

fn is_even_sum(v: &Vec8Z) -> bool {
    let mut s = Integer::new();
    for x in &v.0 {
        s += x;
    }
    s.is_even()
}

/// Closest point of D8 to `x/d` (`d > 0`).
fn decode_d8_scaled(x: &Vec8Z, d: &Integer) -> Vec8Z {
    let r = round_scaled(x, d);
    if is_even_sum(&r) {
        r
    } else {
        wrong_way_scaled(x, d, &r)
    }
}

/// `(2d)²·‖twice/2 − x/d‖²`, as an integer.
fn scaled_dist2(twice: &Vec8Z, x: &Vec8Z, d: &Integer) -> Integer {
    let mut acc = Integer::new();
    for i in 0..8 {
        let mut t = Integer::from(d * &twice[i]);
        t -= Integer::from(&x[i] * 2u32);
        acc += t.square();
    }
    acc
}

/// Bits kept by [`closer_coset`].
const COMPARE_BITS: u32 = 128;

/// `Some(true)` if `y0` is strictly closer to `x/d` than `y1`, `Some(false)`
/// if `y1` is, `None` when truncated offsets cannot separate them.
fn closer_coset(y0: &Vec8Z, y1: &Vec8Z, x: &Vec8Z, d: &Integer) -> Option<bool> {
    let shift = d.significant_bits().saturating_sub(COMPARE_BITS);
    if shift == 0 {
        return None;
    }
    // each offset lies in [2^shift·t, 2^shift·(t+1)) with t = floor(offset / 2^shift)
    let bounds = |y: &Vec8Z| {
        let (mut lo, mut hi) = (Integer::new(), Integer::new());
        for i in 0..8 {
            let mut t = Integer::from(d * &y[i]);
            t -= Integer::from(&x[i] * 2u32);
            t >>= shift;
            let t1 = Integer::from(&t + 1u32);
            let (a, b) = (Integer::from(t.square_ref()), Integer::from(t1.square_ref()));
            if t.cmp0().is_lt() && t1.cmp0().is_ge() {
                // t = −1: the interval contains 0
            } else {
                lo += a.clone().min(b.clone());
            }
            hi += a.max(b);
        }
        (lo, hi)
    };
    let (lo0, hi0) = bounds(y0);
    let (lo1, hi1) = bounds(y1);
    if hi0 < lo1 {
        Some(true)
    } else if hi1 < lo0 {
        Some(false)
    } else {
        None
    }
}

/// Fast exact E8 decoding of the point `x/d`, `d > 0`.
pub fn decode_scaled(x: &Vec8Z, d: &Integer) -> E8Point {
    assert!(d.cmp0().is_gt(), "denominator must be positive");
    let y0 = decode_d8_scaled(x, d).scale(&Integer::from(2));
    // x - ½·1 = (2x - d) / 2d
    let shifted = Vec8Z::from_fn(|i| Integer::from(&x[i] * 2u32) - d);
    let d2 = Integer::from(d * 2u32);
    let y1 = Vec8Z::from_fn({
        let r = decode_d8_scaled(&shifted, &d2);
        move |i| Integer::from(&r[i] * 2u32) + 1u32
    });
    let twice = match closer_coset(&y0, &y1, x, d) {
        Some(first) => if first { y0 } else { y1 },
        None => {
            if scaled_dist2(&y0, x, d) <= scaled_dist2(&y1, x, d) {
                y0
            } else {
                y1
            }
        }
    };
    E8Point { twice }
}

/// Per-coordinate nearest integer; exact halves round down.
pub fn round_nearest(x: &StdVec8) -> Vec8Z {
    let (nums, d) = x.0.common_denominator();
    round_scaled(&nums, &d)
}

/// [`round_nearest`] with the first coordinate farthest from an integer
/// rounded the other way (an exact integer there moves up by one).
pub fn wrong_way_round(x: &StdVec8) -> Vec8Z {
    let (nums, d) = x.0.common_denominator();
    let r = round_scaled(&nums, &d);
    wrong_way_scaled(&nums, &d, &r)
}

/// A closest E8 point to `x`. On exact ties between the two cosets the
/// integer coset wins.
pub fn decode_e8(x: &StdVec8) -> E8Point {
    let (nums, d) = x.0.common_denominator();
    decode_scaled(&nums, &d)
}

/// Exact squared Euclidean distance.
pub fn dist2(x: &StdVec8, y: &StdVec8) -> Rational {
    let diff = x.sub(y);
    diff.dot(&diff)
}

/// Exhaustive closest-point search. Each coordinate of a closest point lies
/// within 1 of `x` (the covering radius is 1), so the search box is
/// `[x_i - 1, x_i + 1]` per coordinate in each coset. Ties are broken by the
/// lexicographically smallest point.
pub fn cvp_bruteforce(x: &StdVec8) -> (E8Point, Rational) {
    let (nums, d) = x.0.common_denominator();
    // Work with doubled candidates t and cost (d·t - 2x)².
    let mut best: Option<(Integer, Vec<Integer>)> = None;
    for odd in [false, true] {
        let cands: Vec<Vec<(Integer, Integer)>> = (0..8)
            .map(|i| {
                let two_x = Integer::from(&nums[i] * 2u32);
                // t/2 ∈ [x - 1, x + 1]  ⇔  d·t ∈ [2x - 2d, 2x + 2d]
                let lo = Integer::from(&two_x - Integer::from(&d * 2u32)).div_ceil(d.clone());
                let hi = Integer::from(&two_x + Integer::from(&d * 2u32)).div_floor(d.clone());
                let mut out = Vec::new();
                let mut t = lo;
                while t <= hi {
                    if t.is_odd() == odd {
                        let c = Integer::from(&d * &t) - &two_x;
                        out.push((t.clone(), c.square()));
                    }
                    t += 1u32;
                }
                out
            })
            .collect();
        let mut stack = Vec::with_capacity(8);
        search(&cands, 0, Integer::new(), &mut stack, &mut best);
    }
    let (cost, twice) = best.expect("search box always contains a lattice point");
    let point = E8Point::from_twice(Vec8Z::from_fn(|i| twice[i].clone())).expect("coset conditions hold");
    let den = Integer::from(d.square_ref()) * 4u32;
    (point, Rational::from((cost, den)))
}

fn search(
    cands: &[Vec<(Integer, Integer)>],
    i: usize,
    cost: Integer,
    stack: &mut Vec<Integer>,
    best: &mut Option<(Integer, Vec<Integer>)>,
) {
    if let Some((b, _)) = best {
        if cost > *b {
            return;
        }
    }
    if i == 8 {
        let mut sum = Integer::new();
        for t in stack.iter() {
            sum += t;
        }
        if !sum.is_divisible_u(4) {
            return;
        }
        let better = match best {
            None => true,
            Some((b, pt)) => cost < *b || (cost == *b && stack.as_slice() < pt.as_slice()),
        };
        if better {
            *best = Some((cost, stack.clone()));
        }
        return;
    }
    for (t, c) in &cands[i] {
        stack.push(t.clone());
        search(cands, i + 1, Integer::from(&cost + c), stack, best);
        stack.pop();
    }
}

/// The 240 roots of the standard E8 lattice: ±e_i ± e_j and ½(±1, …, ±1)
/// with an even number of minus signs.
pub fn standard_roots() -> Vec<E8Point> {
    let mut out = Vec::with_capacity(240);
    for i in 0..8 {
        for j in i + 1..8 {
            for si in [-2i64, 2] {
                for sj in [-2i64, 2] {
                    let mut t = [0i64; 8];
                    t[i] = si;
                    t[j] = sj;
                    out.push(E8Point { twice: Vec8Z::from_i64(t) });
                }
            }
        }
    }
    for mask in 0u32..256 {
        if mask.count_ones() % 2 == 0 {
            let t = std::array::from_fn(|i| if mask >> i & 1 == 1 { -1 } else { 1 });
            out.push(E8Point { twice: Vec8Z::from_i64(t) });
        }
    }
    out
}

/// Closed Voronoi cell of the origin: `|⟨x, ρ⟩| ≤ 1` for every root ρ.
pub fn in_voronoi(x: &StdVec8, roots_std: &[E8Point]) -> bool {
    let (nums, d) = x.0.common_denominator();
    // ⟨x, ρ⟩ = Σ nums_i·twice_i / (2d)
    let limit = Integer::from(&d * 2u32);
    roots_std.iter().all(|r| {
        let mut acc = Integer::new();
        for i in 0..8 {
            acc += &nums[i] * &r.twice[i];
        }
        acc.cmp_abs(&limit) != Ordering::Greater
    })
}

/// The standard simple roots of E8 (half-vector first), numbered so that
/// their Gram matrix is [`CARTAN`].
pub fn bourbaki_simple_roots() -> [E8Point; 8] {
    let mut twice = [[0i64; 8]; 8];
    twice[0] = [1, -1, -1, -1, -1, -1, -1, 1];
    twice[1][0] = 2;
    twice[1][1] = 2;
    // α_{k} = e_{k-2} - e_{k-3} for k = 3..8 (1-based)
    for k in 2..8 {
        twice[k][k - 1] = 2;
        twice[k][k - 2] = -2;
    }
    twice.map(|t| E8Point { twice: Vec8Z::from_i64(t) })
}
