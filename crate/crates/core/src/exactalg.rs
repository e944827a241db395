//! Exact rational and integer linear algebra in dimension 8.
//!
//! Every scalar is a [`Rational`] in canonical reduced form or an [`Integer`];
//! nothing on the correctness path touches floating point.

use std::fmt;
use std::ops::{Index, IndexMut};

use rug::{Integer, Rational};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub mod dense;

/// Parses a rational written as `"p/q"` or `"p"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    let r: Rational = t
        .parse()
        .map_err(|_| Error::Parse(format!("not a rational: {s:?}")))?;
    Ok(r)
}

pub fn parse_integer(s: &str) -> Result<Integer> {
    let t = s.trim();
    t.parse()
        .map_err(|_| Error::Parse(format!("not an integer: {s:?}")))
}

/// An 8-vector of rationals.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Vec8Q(pub [Rational; 8]);

/// An 8-vector of integers.
#[derive(Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct Vec8Z(pub [Integer; 8]);

/// A row-major 8x8 rational matrix.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct Mat8Q(pub [[Rational; 8]; 8]);

/// A row-major 8x8 integer matrix.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct Mat8Z(pub [[Integer; 8]; 8]);

macro_rules! index_impls {
    ($ty:ty, $out:ty) => {
        impl Index<usize> for $ty {
            type Output = $out;
            fn index(&self, i: usize) -> &$out {
                &self.0[i]
            }
        }
        impl IndexMut<usize> for $ty {
            fn index_mut(&mut self, i: usize) -> &mut $out {
                &mut self.0[i]
            }
        }
    };
}

index_impls!(Vec8Q, Rational);
index_impls!(Vec8Z, Integer);
index_impls!(Mat8Q, [Rational; 8]);
index_impls!(Mat8Z, [Integer; 8]);

impl Vec8Q {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_fn(mut f: impl FnMut(usize) -> Rational) -> Self {
        Vec8Q(std::array::from_fn(|i| f(i)))
    }

    pub fn unit(i: usize) -> Self {
        let mut v = Self::zero();
        v[i] = Rational::from(1);
        v
    }

    pub fn from_ints<T: Into<Integer> + Copy>(xs: [T; 8]) -> Self {
        Self::from_fn(|i| Rational::from(xs[i].into()))
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|x| x.cmp0().is_eq())
    }

    pub fn add(&self, o: &Vec8Q) -> Vec8Q {
        Self::from_fn(|i| Rational::from(&self[i] + &o[i]))
    }

    pub fn sub(&self, o: &Vec8Q) -> Vec8Q {
        Self::from_fn(|i| Rational::from(&self[i] - &o[i]))
    }

    pub fn neg(&self) -> Vec8Q {
        Self::from_fn(|i| Rational::from(-&self[i]))
    }

    pub fn scale(&self, c: &Rational) -> Vec8Q {
        Self::from_fn(|i| Rational::from(&self[i] * c))
    }

    pub fn dot(&self, o: &Vec8Q) -> Rational {
        let mut acc = Rational::new();
        for i in 0..8 {
            acc += Rational::from(&self[i] * &o[i]);
        }
        acc
    }

    /// Integer vector when every entry has denominator 1.
    pub fn to_integer(&self) -> Option<Vec8Z> {
        if self.0.iter().all(|x| *x.denom() == 1) {
            Some(Vec8Z(std::array::from_fn(|i| self[i].numer().clone())))
        } else {
            None
        }
    }

    /// Splits into integer numerators over a common positive denominator.
    pub fn common_denominator(&self) -> (Vec8Z, Integer) {
        let mut den = Integer::from(1);
        for x in &self.0 {
            den.lcm_mut(x.denom());
        }
        let nums = std::array::from_fn(|i| {
            let f = Integer::from(&den / self[i].denom());
            f * self[i].numer()
        });
        (Vec8Z(nums), den)
    }
}

impl Vec8Z {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_fn(mut f: impl FnMut(usize) -> Integer) -> Self {
        Vec8Z(std::array::from_fn(|i| f(i)))
    }

    pub fn from_i64(xs: [i64; 8]) -> Self {
        Self::from_fn(|i| Integer::from(xs[i]))
    }

    pub fn unit(i: usize) -> Self {
        let mut v = Self::zero();
        v[i] = Integer::from(1);
        v
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|x| x.cmp0().is_eq())
    }

    pub fn add(&self, o: &Vec8Z) -> Vec8Z {
        Self::from_fn(|i| Integer::from(&self[i] + &o[i]))
    }

    pub fn sub(&self, o: &Vec8Z) -> Vec8Z {
        Self::from_fn(|i| Integer::from(&self[i] - &o[i]))
    }

    pub fn neg(&self) -> Vec8Z {
        Self::from_fn(|i| Integer::from(-&self[i]))
    }

    pub fn scale(&self, c: &Integer) -> Vec8Z {
        Self::from_fn(|i| Integer::from(&self[i] * c))
    }

    pub fn to_rational(&self) -> Vec8Q {
        Vec8Q::from_fn(|i| Rational::from(&self[i]))
    }
}

impl Mat8Q {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn identity() -> Self {
        Self::from_fn(|i, j| Rational::from(u8::from(i == j)))
    }

    pub fn from_fn(mut f: impl FnMut(usize, usize) -> Rational) -> Self {
        Mat8Q(std::array::from_fn(|i| std::array::from_fn(|j| f(i, j))))
    }

    pub fn from_ints(rows: [[i64; 8]; 8]) -> Self {
        Self::from_fn(|i, j| Rational::from(rows[i][j]))
    }

    pub fn from_columns(cols: &[Vec8Q; 8]) -> Self {
        Self::from_fn(|i, j| cols[j][i].clone())
    }

    pub fn column(&self, j: usize) -> Vec8Q {
        Vec8Q::from_fn(|i| self[i][j].clone())
    }

    pub fn transpose(&self) -> Mat8Q {
        Self::from_fn(|i, j| self[j][i].clone())
    }

    pub fn scale(&self, c: &Rational) -> Mat8Q {
        Self::from_fn(|i, j| Rational::from(&self[i][j] * c))
    }

    pub fn mul(&self, o: &Mat8Q) -> Mat8Q {
        Self::from_fn(|i, j| {
            let mut acc = Rational::new();
            for k in 0..8 {
                acc += Rational::from(&self[i][k] * &o[k][j]);
            }
            acc
        })
    }

    pub fn mul_vec(&self, v: &Vec8Q) -> Vec8Q {
        Vec8Q::from_fn(|i| {
            let mut acc = Rational::new();
            for k in 0..8 {
                acc += Rational::from(&self[i][k] * &v[k]);
            }
            acc
        })
    }

    /// `vᵀ · self · w`.
    pub fn bilinear(&self, v: &Vec8Q, w: &Vec8Q) -> Rational {
        v.dot(&self.mul_vec(w))
    }

    pub fn to_integer(&self) -> Option<Mat8Z> {
        if self.0.iter().flatten().all(|x| *x.denom() == 1) {
            Some(Mat8Z::from_fn(|i, j| self[i][j].numer().clone()))
        } else {
            None
        }
    }

    pub fn to_dense(&self) -> Vec<Vec<Rational>> {
        self.0.iter().map(|r| r.to_vec()).collect()
    }

    pub fn from_dense(d: &[Vec<Rational>]) -> Mat8Q {
        Self::from_fn(|i, j| d[i][j].clone())
    }
}

impl Mat8Z {
    pub fn from_fn(mut f: impl FnMut(usize, usize) -> Integer) -> Self {
        Mat8Z(std::array::from_fn(|i| std::array::from_fn(|j| f(i, j))))
    }

    pub fn mul_vec(&self, v: &Vec8Z) -> Vec8Z {
        Vec8Z::from_fn(|i| {
            let mut acc = Integer::new();
            for k in 0..8 {
                acc += &self[i][k] * &v[k];
            }
            acc
        })
    }

    pub fn to_rational(&self) -> Mat8Q {
        Mat8Q::from_fn(|i, j| Rational::from(&self[i][j]))
    }

    pub fn to_dense(&self) -> Vec<Vec<Integer>> {
        self.0.iter().map(|r| r.to_vec()).collect()
    }
}

/// Exact determinant by Gaussian elimination over Q.
pub fn determinant(m: &Mat8Q) -> Rational {
    dense::det_q(m.to_dense())
}

/// The unique `x` with `m·x = rhs`.
pub fn solve_linear(m: &Mat8Q, rhs: &Vec8Q) -> Result<Vec8Q> {
    let x = dense::solve_q(m.to_dense(), rhs.0.to_vec()).ok_or(Error::SingularMatrix)?;
    Ok(Vec8Q::from_fn(|i| x[i].clone()))
}

pub fn inverse(m: &Mat8Q) -> Result<Mat8Q> {
    let inv = dense::inverse_q(m.to_dense()).ok_or(Error::SingularMatrix)?;
    Ok(Mat8Q::from_dense(&inv))
}

/// `bᵀ · form · b`: the Gram matrix of the columns of `b` under `form`.
pub fn gram_of_columns(b: &Mat8Q, form: &Mat8Q) -> Mat8Q {
    b.transpose().mul(&form.mul(b))
}

/// Fraction-free (Bareiss) determinant of an integer matrix.
pub fn determinant_z(m: &Mat8Z) -> Integer {
    dense::det_z(m.to_dense())
}

/// Fraction-free solve of `m·x = rhs` over the integers.
///
/// Returns `(y, d)` with `d > 0` and `x = y / d`; `d` is `|det m|`.
pub fn solve_z(m: &Mat8Z, rhs: &Vec8Z) -> Result<(Vec8Z, Integer)> {
    let (y, d) = dense::solve_z(m.to_dense(), rhs.0.to_vec()).ok_or(Error::SingularMatrix)?;
    Ok((Vec8Z::from_fn(|i| y[i].clone()), d))
}

impl fmt::Display for Vec8Q {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for Vec8Q {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Vec8Z {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.to_rational(), f)
    }
}

impl fmt::Debug for Vec8Z {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Debug for Mat8Q {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.0 {
            writeln!(f, "{}", Vec8Q(row.clone()))?;
        }
        Ok(())
    }
}

impl fmt::Debug for Mat8Z {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(&self.to_rational(), f)
    }
}

// Serialization: rationals and integers as decimal strings ("p/q" or "p"),
// vectors as arrays, matrices as row-major arrays of rows.

pub mod ratstr {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&r.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(D::Error::custom)
    }
}

pub mod intstr {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Integer, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&r.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Integer, D::Error> {
        let s = String::deserialize(d)?;
        parse_integer(&s).map_err(D::Error::custom)
    }
}

impl Serialize for Vec8Q {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        v.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Vec8Q {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        if v.len() != 8 {
            return Err(D::Error::custom(format!("expected 8 entries, got {}", v.len())));
        }
        let mut out = Vec8Q::zero();
        for (i, s) in v.iter().enumerate() {
            out[i] = parse_rational(s).map_err(D::Error::custom)?;
        }
        Ok(out)
    }
}

impl Serialize for Vec8Z {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        v.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Vec8Z {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        if v.len() != 8 {
            return Err(D::Error::custom(format!("expected 8 entries, got {}", v.len())));
        }
        let mut out = Vec8Z::zero();
        for (i, s) in v.iter().enumerate() {
            out[i] = parse_integer(s).map_err(D::Error::custom)?;
        }
        Ok(out)
    }
}

impl Serialize for Mat8Q {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec8Q> = self.0.iter().map(|r| Vec8Q(r.clone())).collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Mat8Q {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec8Q>::deserialize(d)?;
        if rows.len() != 8 {
            return Err(D::Error::custom(format!("expected 8 rows, got {}", rows.len())));
        }
        Ok(Mat8Q::from_fn(|i, j| rows[i][j].clone()))
    }
}
