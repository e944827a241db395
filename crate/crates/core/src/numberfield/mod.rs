//! The four norm-Euclidean degree-8 fields and exact arithmetic in them.
//!
//! Each field F is a CM field, a totally imaginary unramified quadratic
//! extension of a totally real quartic field K. Under the trace form
//! `⟨x | y⟩ = Tr(x·ȳ/δ)`, with δ a totally positive generator of the
//! different of K, the ring of integers is an E8 lattice. [`FieldData`]
//! stores a basis B of simple roots of that lattice, so the Gram matrix of B
//! is the E8 Cartan matrix, together with an isometry onto standard E8
//! coordinates.
//!
//! Elements are coordinate vectors in B. [`FieldElement`] has rational
//! coordinates; [`RingElement`] has integer coordinates, which is exactly
//! membership in the ring of integers because B is a Z-basis of it.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::OnceLock;

use rug::{Integer, Rational};
use serde::{Deserialize, Serialize};

use crate::e8::{self, cartan_matrix, E8Point, StdVec8};
use crate::error::{Error, Result};
use crate::exactalg::{self, determinant, gram_of_columns, inverse, Mat8Q, Mat8Z, Vec8Q, Vec8Z};

mod arith;
mod build;
pub(crate) mod defs;

pub use build::{enumerate_roots, find_simple_roots};

/// Version of the serialized [`FieldData`] layout.
pub const SCHEMA_VERSION: u32 = 1;

/// Environment variable overriding the field-data cache directory.
pub const CACHE_DIR_ENV: &str = "NORMEUCLID_CACHE_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldId {
    /// Q(ζ15)
    Zeta15,
    /// Q(ζ20)
    Zeta20,
    /// Q(ζ24)
    Zeta24,
    /// Q(√3, √5, √−1)
    Biquadratic,
}

impl FieldId {
    pub const ALL: [FieldId; 4] = [
        FieldId::Zeta15,
        FieldId::Zeta20,
        FieldId::Zeta24,
        FieldId::Biquadratic,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FieldId::Zeta15 => "zeta15",
            FieldId::Zeta20 => "zeta20",
            FieldId::Zeta24 => "zeta24",
            FieldId::Biquadratic => "biquadratic",
        }
    }

    fn index(self) -> usize {
        self as usize
    }

    /// Δ_K / 4096, the worst-case remainder-to-divisor norm ratio.
    pub fn norm_bound(self) -> Rational {
        Rational::from((defs::definition(self).disc_k, 4096u32))
    }
}

impl fmt::Display for FieldId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FieldId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FieldId::ALL
            .into_iter()
            .find(|id| id.name() == s.trim().to_ascii_lowercase())
            .ok_or_else(|| Error::Parse(format!("unknown field {s:?}")))
    }
}

/// An element of F by its rational coordinates in the basis B.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FieldElement {
    pub field: FieldId,
    pub coords: Vec8Q,
}

/// An element of the ring of integers by its integer coordinates in B.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RingElement {
    pub field: FieldId,
    pub coords: Vec8Z,
}

impl FieldElement {
    pub fn new(field: FieldId, coords: Vec8Q) -> Self {
        FieldElement { field, coords }
    }

    pub fn is_zero(&self) -> bool {
        self.coords.is_zero()
    }

    pub fn add(&self, o: &FieldElement) -> Result<FieldElement> {
        same_field(self.field, o.field)?;
        Ok(FieldElement::new(self.field, self.coords.add(&o.coords)))
    }

    pub fn sub(&self, o: &FieldElement) -> Result<FieldElement> {
        same_field(self.field, o.field)?;
        Ok(FieldElement::new(self.field, self.coords.sub(&o.coords)))
    }

    pub fn scale(&self, c: &Rational) -> FieldElement {
        FieldElement::new(self.field, self.coords.scale(c))
    }

    /// The ring element with these coordinates, if they are all integers.
    pub fn to_ring(&self) -> Option<RingElement> {
        self.coords.to_integer().map(|c| RingElement::new(self.field, c))
    }
}

impl RingElement {
    pub fn new(field: FieldId, coords: Vec8Z) -> Self {
        RingElement { field, coords }
    }

    pub fn zero(field: FieldId) -> Self {
        RingElement::new(field, Vec8Z::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.coords.is_zero()
    }

    pub fn add(&self, o: &RingElement) -> Result<RingElement> {
        same_field(self.field, o.field)?;
        Ok(RingElement::new(self.field, self.coords.add(&o.coords)))
    }

    pub fn sub(&self, o: &RingElement) -> Result<RingElement> {
        same_field(self.field, o.field)?;
        Ok(RingElement::new(self.field, self.coords.sub(&o.coords)))
    }

    pub fn neg(&self) -> RingElement {
        RingElement::new(self.field, self.coords.neg())
    }

    pub fn to_field(&self) -> FieldElement {
        FieldElement::new(self.field, self.coords.to_rational())
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{:?}", self.field, self.coords)
    }
}

impl fmt::Debug for RingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{:?}", self.field, self.coords)
    }
}

pub(crate) fn same_field(a: FieldId, b: FieldId) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::FieldMismatch(a, b))
    }
}

/// Precomputed description of one field.
///
/// The reference basis P is (1, ζ, …, ζ⁷) for the cyclotomic fields and
/// (1, √3, √5, √15, i, i√3, i√5, i√15) for the biquadratic field.
#[derive(Clone, Serialize, Deserialize)]
pub struct FieldData {
    pub schema_version: u32,
    pub id: FieldId,
    /// `power_mult_table[i][j]` = P-coordinates of `p_i · p_j`.
    pub power_mult_table: Vec<Vec<Vec8Q>>,
    /// Complex conjugation in P (column j is the image of `p_j`).
    pub conj_matrix: Mat8Q,
    /// P-coordinates of the totally positive generator δ of the different of K.
    pub delta: Vec8Q,
    /// Discriminant of the totally real subfield K.
    pub disc_k: u64,
    /// Columns are the P-coordinates of the simple roots α_1..α_8.
    pub basis_b: Mat8Q,
    /// Gram matrix of the trace form on P.
    pub gram_p: Mat8Q,
    /// Maps B-coordinates to standard E8 coordinates; `SᵀS` is the Cartan matrix.
    pub embedding_s: Mat8Q,
    /// B-coordinates of the 240 roots, sorted.
    pub roots: Vec<Vec8Z>,
    #[serde(with = "opt_ratstr")]
    pub euclidean_minimum: Option<Rational>,
    #[serde(with = "exactalg::ratstr")]
    pub norm_sup_voronoi: Rational,
    /// P-coordinates of a point of the closed Voronoi cell attaining `norm_sup_voronoi`.
    pub sup_maximizer: Vec8Q,
    #[serde(skip)]
    derived: Derived,
}

/// Tables derived from the serialized fields on load.
#[derive(Clone, Default)]
struct Derived {
    basis_b_inv: Mat8Q,
    /// `mult_b[i]`: integer matrix of multiplication by `b_i` in B.
    mult_b: Vec<Mat8Z>,
    conj_b: Mat8Z,
    one_b: Vec8Z,
    trace_b: Vec8Z,
    delta_inv_b: Vec8Q,
    /// `2·S`
    s_twice: Mat8Z,
    /// `S⁻¹ = s_inv_num / s_inv_den`
    s_inv_num: Mat8Z,
    s_inv_den: Integer,
    roots_std: Vec<E8Point>,
    arith: arith::PArith,
}

mod opt_ratstr {
    use super::*;
    use serde::de::Error as _;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Option<Rational>, s: S) -> std::result::Result<S::Ok, S::Error> {
        match r {
            Some(r) => s.serialize_some(&r.to_string()),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<Rational>, D::Error> {
        let s = Option::<String>::deserialize(d)?;
        s.map(|s| exactalg::parse_rational(&s).map_err(D::Error::custom))
            .transpose()
    }
}

impl fmt::Debug for FieldData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldData")
            .field("id", &self.id)
            .field("disc_k", &self.disc_k)
            .field("delta", &self.delta)
            .finish_non_exhaustive()
    }
}

fn cert(field: FieldId, ok: bool, what: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::CertificateFailure { field, what: what() })
    }
}

impl FieldData {
    /// Runs the full certified construction for `id`.
    pub fn build(id: FieldId) -> Result<FieldData> {
        build::build(id)
    }

    /// Fills the derived tables and re-checks every invariant.
    pub(crate) fn complete(mut self) -> Result<FieldData> {
        let id = self.id;
        cert(id, self.schema_version == SCHEMA_VERSION, || {
            format!("schema version {} (expected {SCHEMA_VERSION})", self.schema_version)
        })?;
        let def = defs::definition(id);
        cert(id, self.power_mult_table.len() == 8 && self.power_mult_table.iter().all(|r| r.len() == 8), || {
            "multiplication table is not 8x8".into()
        })?;
        cert(id, self.power_mult_table == def.table, || "multiplication table differs from the definition".into())?;
        cert(id, self.conj_matrix == Mat8Q::from_columns(&std::array::from_fn(|j| def.conj[j].clone())), || {
            "conjugation differs from the definition".into()
        })?;
        cert(id, self.disc_k == def.disc_k, || format!("disc_K = {}", self.disc_k))?;
        cert(id, [1125, 2000, 2304, 3600].contains(&self.disc_k), || "unexpected disc_K".into())?;

        let m = cartan_matrix();
        cert(id, gram_of_columns(&self.basis_b, &self.gram_p) == m, || {
            "Gram matrix of B is not the Cartan matrix".into()
        })?;
        cert(id, determinant(&gram_of_columns(&self.basis_b, &self.gram_p)) == 1, || "Gram determinant ≠ 1".into())?;
        cert(id, gram_of_columns(&self.embedding_s, &Mat8Q::identity()) == m, || "SᵀS ≠ M".into())?;
        cert(id, self.roots.len() == 240, || format!("{} roots", self.roots.len()))?;
        cert(
            id,
            self.roots.iter().all(|r| m.bilinear(&r.to_rational(), &r.to_rational()) == 2),
            || "a root does not have inner square 2".into(),
        )?;

        let basis_b_inv = inverse(&self.basis_b).map_err(|_| Error::CertificateFailure {
            field: id,
            what: "basis B is singular".into(),
        })?;
        let to_b = |v: &Vec8Q| basis_b_inv.mul_vec(v);
        let mul_p = |x: &Vec8Q, y: &Vec8Q| build::mul_in(&self.power_mult_table, x, y);
        let cols: Vec<Vec8Q> = (0..8).map(|j| self.basis_b.column(j)).collect();

        let mut mult_b = Vec::with_capacity(8);
        for bi in &cols {
            let mut mat = Mat8Q::zero();
            for (j, bj) in cols.iter().enumerate() {
                let prod = to_b(&mul_p(bi, bj));
                for k in 0..8 {
                    mat[k][j] = prod[k].clone();
                }
            }
            let mat = mat.to_integer().ok_or_else(|| Error::CertificateFailure {
                field: id,
                what: "B is not closed under multiplication".into(),
            })?;
            mult_b.push(mat);
        }
        let conj_b = basis_b_inv
            .mul(&self.conj_matrix.mul(&self.basis_b))
            .to_integer()
            .ok_or_else(|| Error::CertificateFailure { field: id, what: "conjugation is not integral on B".into() })?;
        let one_b = to_b(&Vec8Q::unit(0))
            .to_integer()
            .ok_or_else(|| Error::CertificateFailure { field: id, what: "1 is not in the B-lattice".into() })?;
        let trace_b = Vec8Z::from_fn(|i| {
            let mut t = Integer::new();
            for k in 0..8 {
                t += &mult_b[i][k][k];
            }
            t
        });
        let delta_inv_p = build::invert_in(&self.power_mult_table, &self.delta).ok_or_else(|| Error::CertificateFailure {
            field: id,
            what: "δ is not invertible".into(),
        })?;
        let s_twice = self
            .embedding_s
            .scale(&Rational::from(2))
            .to_integer()
            .ok_or_else(|| Error::CertificateFailure { field: id, what: "2S is not integral".into() })?;
        let s_inv = inverse(&self.embedding_s).map_err(|_| Error::CertificateFailure {
            field: id,
            what: "S is singular".into(),
        })?;
        let mut s_inv_den = Integer::from(1);
        for x in s_inv.0.iter().flatten() {
            s_inv_den.lcm_mut(x.denom());
        }
        let s_inv_num = s_inv.scale(&Rational::from(&s_inv_den)).to_integer().expect("scaled by common denominator");

        let roots_std: Vec<E8Point> = self
            .roots
            .iter()
            .map(|r| {
                E8Point::from_std(&StdVec8(self.embedding_s.mul_vec(&r.to_rational())))
                    .ok_or_else(|| Error::CertificateFailure { field: id, what: "S does not map roots into E8".into() })
            })
            .collect::<Result<_>>()?;

        let arith = arith::PArith::new(&def, &self.basis_b, &basis_b_inv, &s_twice)
            .map_err(|what| Error::CertificateFailure { field: id, what })?;
        self.derived = Derived {
            arith,
            delta_inv_b: to_b(&delta_inv_p),
            basis_b_inv,
            mult_b,
            conj_b,
            one_b,
            trace_b,
            s_twice,
            s_inv_num,
            s_inv_den,
            roots_std,
        };
        cert(id, self.norm_sup_voronoi == def.sup && self.euclidean_minimum == def.euclidean_minimum, || {
            "table constants differ from the definition".into()
        })?;
        let maximizer = self.from_p(&self.sup_maximizer);
        cert(id, self.norm(&maximizer).abs() == self.norm_sup_voronoi, || "maximizer does not attain the sup".into())?;
        cert(id, self.in_voronoi(&maximizer), || "maximizer is outside the closed Voronoi cell".into())?;
        Ok(self)
    }

    // ----- elements -----

    pub fn one(&self) -> RingElement {
        RingElement::new(self.id, self.derived.one_b.clone())
    }

    pub fn ring_element(&self, coords: Vec8Z) -> RingElement {
        RingElement::new(self.id, coords)
    }

    pub fn element(&self, coords: Vec8Q) -> FieldElement {
        FieldElement::new(self.id, coords)
    }

    /// The element with the given P-coordinates.
    pub fn from_p(&self, coords_p: &Vec8Q) -> FieldElement {
        self.element(self.to_b(coords_p))
    }

    /// The ring element with the given P-coordinates; `None` if it is not an
    /// algebraic integer.
    pub fn ring_from_p(&self, coords_p: &Vec8Q) -> Option<RingElement> {
        self.from_p(coords_p).to_ring()
    }

    /// `p_k` as a ring element (ζ^k for the cyclotomic fields).
    pub fn reference_basis_element(&self, k: usize) -> RingElement {
        self.ring_from_p(&Vec8Q::unit(k)).expect("reference basis elements are integral")
    }

    /// P-coordinates to B-coordinates.
    pub fn to_b(&self, coords_p: &Vec8Q) -> Vec8Q {
        self.derived.basis_b_inv.mul_vec(coords_p)
    }

    /// B-coordinates to P-coordinates.
    pub fn from_b(&self, coords_b: &Vec8Q) -> Vec8Q {
        self.basis_b.mul_vec(coords_b)
    }

    fn check(&self, x: FieldId) -> Result<()> {
        same_field(self.id, x)
    }

    /// Matrix of multiplication by `x` in the basis B.
    pub fn mult_matrix(&self, x: &FieldElement) -> Mat8Q {
        let mut out = Mat8Q::zero();
        for (i, xi) in x.coords.0.iter().enumerate() {
            if xi.cmp0().is_eq() {
                continue;
            }
            let mi = &self.derived.mult_b[i];
            for k in 0..8 {
                for j in 0..8 {
                    if mi[k][j].cmp0().is_ne() {
                        out[k][j] += Rational::from(xi * &mi[k][j]);
                    }
                }
            }
        }
        out
    }

    /// Integer matrix of multiplication by `x` in the basis B.
    pub fn mult_matrix_ring(&self, x: &RingElement) -> Mat8Z {
        let mut out = Mat8Z::default();
        for (i, xi) in x.coords.0.iter().enumerate() {
            if xi.cmp0().is_eq() {
                continue;
            }
            let mi = &self.derived.mult_b[i];
            for k in 0..8 {
                for j in 0..8 {
                    if mi[k][j].cmp0().is_ne() {
                        out[k][j] += xi * &mi[k][j];
                    }
                }
            }
        }
        out
    }

    pub fn mul(&self, x: &FieldElement, y: &FieldElement) -> Result<FieldElement> {
        self.check(x.field)?;
        self.check(y.field)?;
        Ok(self.element(self.mult_matrix(x).mul_vec(&y.coords)))
    }

    pub fn mul_ring(&self, x: &RingElement, y: &RingElement) -> Result<RingElement> {
        self.check(x.field)?;
        self.check(y.field)?;
        Ok(self.ring_element(self.derived.arith.mul_b(&x.coords, &y.coords)))
    }

    pub fn inv(&self, x: &FieldElement) -> Result<FieldElement> {
        self.check(x.field)?;
        if x.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let y = exactalg::solve_linear(&self.mult_matrix(x), &self.derived.one_b.to_rational())?;
        Ok(self.element(y))
    }

    pub fn conj(&self, x: &FieldElement) -> FieldElement {
        self.element(self.derived.conj_b.to_rational().mul_vec(&x.coords))
    }

    pub fn conj_ring(&self, x: &RingElement) -> RingElement {
        self.ring_element(self.derived.conj_b.mul_vec(&x.coords))
    }

    pub fn trace(&self, x: &FieldElement) -> Rational {
        x.coords.dot(&self.derived.trace_b.to_rational())
    }

    /// The absolute norm, as the determinant of multiplication by `x`.
    pub fn norm(&self, x: &FieldElement) -> Rational {
        determinant(&self.mult_matrix(x))
    }

    pub fn norm_ring(&self, x: &RingElement) -> Integer {
        self.derived.arith.norm_b(&x.coords)
    }

    /// `⟨x | y⟩ = Tr(x·ȳ/δ)`.
    pub fn inner(&self, x: &FieldElement, y: &FieldElement) -> Result<Rational> {
        self.check(x.field)?;
        self.check(y.field)?;
        let xy = self.mul(x, &self.conj(y))?;
        let z = self.mul(&xy, &self.element(self.derived.delta_inv_b.clone()))?;
        Ok(self.trace(&z))
    }

    // ----- lattice geometry -----

    /// Standard E8 coordinates of a point given in B-coordinates.
    pub fn to_standard(&self, coords_b: &Vec8Q) -> StdVec8 {
        StdVec8(self.embedding_s.mul_vec(coords_b))
    }

    /// B-coordinates of a standard-coordinate point.
    pub fn from_standard(&self, x: &StdVec8) -> Vec8Q {
        let d = Rational::from(&self.derived.s_inv_den);
        self.derived.s_inv_num.to_rational().mul_vec(&x.0).scale(&d.recip())
    }

    /// The 240 roots in standard coordinates.
    pub fn roots_standard(&self) -> &[E8Point] {
        &self.derived.roots_std
    }

    pub(crate) fn s_twice(&self) -> &Mat8Z {
        &self.derived.s_twice
    }

    pub(crate) fn arith(&self) -> &arith::PArith {
        &self.derived.arith
    }

    /// B-coordinates (integers) of the lattice point `p`.
    pub fn lattice_point_to_b(&self, p: &E8Point) -> Vec8Z {
        // q = S⁻¹·(twice/2) = s_inv_num·twice / (2·s_inv_den)
        let num = self.derived.s_inv_num.mul_vec(p.twice());
        let den = Integer::from(&self.derived.s_inv_den * 2u32);
        Vec8Z::from_fn(|i| {
            let (q, r) = num[i].clone().div_rem(den.clone());
            assert!(r.cmp0().is_eq(), "E8 point does not map into the ring of integers");
            q
        })
    }

    /// Closest lattice point to `x` (B-coordinates), by the fast decoder.
    pub fn closest_vector(&self, x: &FieldElement) -> RingElement {
        let p = e8::decode_e8(&self.to_standard(&x.coords));
        self.ring_element(self.lattice_point_to_b(&p))
    }

    pub fn in_voronoi(&self, x: &FieldElement) -> bool {
        e8::in_voronoi(&self.to_standard(&x.coords), self.roots_standard())
    }

    /// Δ_K / 4096.
    pub fn norm_bound(&self) -> Rational {
        Rational::from((self.disc_k, 4096u32))
    }

    // ----- serialization -----

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("field data serializes");
        s.push('\n');
        s
    }

    pub fn from_json(s: &str) -> Result<FieldData> {
        let data: FieldData = serde_json::from_str(s)?;
        data.complete()
    }
}

/// Default location of the on-disk field-data cache.
pub fn default_cache_dir() -> PathBuf {
    if let Some(dir) = std::env::var_os(CACHE_DIR_ENV) {
        return PathBuf::from(dir);
    }
    if let Some(dir) = std::env::var_os("XDG_CACHE_HOME") {
        return PathBuf::from(dir).join("normeuclid");
    }
    if let Some(home) = std::env::var_os("HOME") {
        return PathBuf::from(home).join(".cache").join("normeuclid");
    }
    std::env::temp_dir().join("normeuclid")
}

pub fn cache_file(dir: &Path, id: FieldId) -> PathBuf {
    dir.join(format!("{}.v{SCHEMA_VERSION}.json", id.name()))
}

/// Loads `id` from the cache in `dir`, building and writing it on a miss or
/// when the cached copy fails its certificates.
pub fn load_or_build(id: FieldId, dir: &Path) -> Result<FieldData> {
    let path = cache_file(dir, id);
    if let Ok(text) = std::fs::read_to_string(&path) {
        if let Ok(data) = FieldData::from_json(&text) {
            if data.id == id {
                return Ok(data);
            }
        }
    }
    let data = FieldData::build(id)?;
    std::fs::create_dir_all(dir)?;
    let tmp = path.with_extension("json.tmp");
    std::fs::write(&tmp, data.to_json())?;
    std::fs::rename(&tmp, &path)?;
    Ok(data)
}

static REGISTRY: [OnceLock<FieldData>; 4] = [OnceLock::new(), OnceLock::new(), OnceLock::new(), OnceLock::new()];

/// The shared, lazily built data for `id`.
///
/// Panics if construction fails its certificates, which indicates a bug
/// rather than bad input.
pub fn field(id: FieldId) -> &'static FieldData {
    REGISTRY[id.index()].get_or_init(|| match FieldData::build(id) {
        Ok(d) => d,
        Err(e) => panic!("building {id}: {e}"),
    })
}

/// Installs previously loaded data (e.g. from the disk cache) into the shared
/// registry. Has no effect if `id` is already present.
pub fn install(data: FieldData) -> &'static FieldData {
    let id = data.id;
    REGISTRY[id.index()].get_or_init(|| data)
}

/// The registered data for `id`, if it has been built or installed.
pub fn installed(id: FieldId) -> Option<&'static FieldData> {
    REGISTRY[id.index()].get()
}

#[cfg(test)]
mod tests;
