//! Quantitative checks: the sup-norm table, remainder-ratio sampling, A_F
//! lower bounds and the division timing benchmark.
//!
//! Sampling is reproducible: sample `i` of a run with seed `s` draws from the
//! ChaCha8 stream `(s, i)`, so reports do not depend on the number of worker
//! threads.

use std::cmp::Ordering;
use std::time::Instant;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rug::integer::Order;
use rug::{Integer, Rational};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::euclid::{check_division, divide};
use crate::exactalg::{self, Vec8Q, Vec8Z};
use crate::numberfield::{defs, field, FieldId, RingElement};

/// Bit length of numerators and denominators of random field points.
pub const POINT_BITS: u32 = 16;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TableRow {
    pub field: FieldId,
    /// Δ_K / 4096
    #[serde(with = "exactalg::ratstr")]
    pub bound: Rational,
    #[serde(with = "exactalg::ratstr")]
    pub sup_value: Rational,
    pub maximizer_p_coords: Vec8Q,
    pub maximizer_in_voronoi: bool,
    #[serde(serialize_with = "ser_opt_rat")]
    pub euclidean_minimum: Option<Rational>,
    /// Whether `sup_value` equals `bound` (as opposed to lying strictly below).
    pub bound_attained: bool,
    /// The maximizer as listed in the published table, with its exact norm
    /// and Voronoi membership. Differs from `maximizer_p_coords` where the
    /// listed element does not attain the sup.
    pub listed_maximizer_p_coords: Vec8Q,
    #[serde(with = "exactalg::ratstr")]
    pub listed_maximizer_norm: Rational,
    pub listed_maximizer_in_voronoi: bool,
}

fn ser_opt_rat<S: serde::Serializer>(r: &Option<Rational>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match r {
        Some(r) => s.serialize_some(&r.to_string()),
        None => s.serialize_none(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StatsReport {
    pub field: FieldId,
    pub sample_count: u64,
    pub coord_bits: u32,
    #[serde(with = "exactalg::ratstr")]
    pub max_ratio: Rational,
    /// Display only.
    pub mean_ratio: f64,
    pub seed: u64,
    /// Wall-clock seconds; excluded from equality-sensitive comparisons.
    pub elapsed: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AfEstimate {
    pub field: FieldId,
    pub sample_count: u64,
    pub seed: u64,
    /// The largest `|N(x − cv(x))|` observed; a lower bound for A_F.
    #[serde(with = "exactalg::ratstr")]
    pub lower_bound: Rational,
    /// P-coordinates of a point attaining `lower_bound`.
    pub argmax_p_coords: Vec8Q,
    #[serde(with = "exactalg::ratstr")]
    pub bound: Rational,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub bits: u32,
    pub reps: u32,
    pub mean_seconds: f64,
    pub min_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub field: FieldId,
    pub seed: u64,
    pub rows: Vec<BenchRow>,
}

impl BenchReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("bits,mean_seconds\n");
        for r in &self.rows {
            out.push_str(&format!("{},{:.9}\n", r.bits, r.mean_seconds));
        }
        out
    }
}

fn verification(field: FieldId, what: String) -> Error {
    Error::VerificationFailed { field, what }
}

/// Checks the sup-norm table entry for `id` exactly.
pub fn verify_table(id: FieldId) -> Result<TableRow> {
    let f = field(id);
    let def = defs::definition(id);
    let bound = f.norm_bound();
    let x = f.from_p(&f.sup_maximizer);
    let norm = f.norm(&x).abs();
    if norm != f.norm_sup_voronoi {
        return Err(verification(id, format!("N(maximizer) = {norm}, table says {}", f.norm_sup_voronoi)));
    }
    let inside = f.in_voronoi(&x);
    if !inside {
        return Err(verification(id, "maximizer is outside the closed Voronoi cell".into()));
    }
    if norm > bound {
        return Err(verification(id, format!("sup {norm} exceeds Δ_K/4096 = {bound}")));
    }
    if let Some(m) = &f.euclidean_minimum {
        if *m > norm {
            return Err(verification(id, format!("Euclidean minimum {m} exceeds sup {norm}")));
        }
    }
    let listed = f.from_p(&def.listed_maximizer);
    Ok(TableRow {
        field: id,
        bound_attained: norm == bound,
        bound,
        sup_value: norm,
        maximizer_p_coords: f.sup_maximizer.clone(),
        maximizer_in_voronoi: inside,
        euclidean_minimum: f.euclidean_minimum.clone(),
        listed_maximizer_norm: f.norm(&listed).abs(),
        listed_maximizer_in_voronoi: f.in_voronoi(&listed),
        listed_maximizer_p_coords: def.listed_maximizer,
    })
}

pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Uniform integer in `[0, 2^bits)`.
fn random_bits(rng: &mut impl RngCore, bits: u32) -> Integer {
    let words = bits.div_ceil(64) as usize;
    let digits: Vec<u64> = (0..words).map(|_| rng.next_u64()).collect();
    let mut n = Integer::from_digits(&digits, Order::Lsf);
    n.keep_bits_mut(bits);
    n
}

/// Uniform integer in `[−2^bits, 2^bits]`.
pub fn random_coordinate(rng: &mut impl RngCore, bits: u32) -> Integer {
    let span = (Integer::from(1) << (bits + 1)) + 1u32;
    loop {
        let u = random_bits(rng, bits + 2);
        if u < span {
            return u - (Integer::from(1) << bits);
        }
    }
}

pub fn random_ring_element(id: FieldId, rng: &mut impl RngCore, bits: u32) -> RingElement {
    RingElement::new(id, Vec8Z::from_fn(|_| random_coordinate(rng, bits)))
}

fn random_nonzero(id: FieldId, rng: &mut impl RngCore, bits: u32) -> RingElement {
    loop {
        let b = random_ring_element(id, rng, bits);
        if !b.is_zero() {
            return b;
        }
    }
}

/// A random point of `[0, 1)^8` in B-coordinates with denominators up to
/// `2^bits`.
pub fn random_point(rng: &mut impl RngCore, bits: u32) -> Vec8Q {
    Vec8Q::from_fn(|_| {
        let d = random_bits(rng, bits) + 1u32;
        let n = Integer::from(rng.gen_range(0..u64::MAX)) % &d;
        Rational::from((n, d))
    })
}

/// One sampled division: returns its exact norm ratio after checking every
/// contract.
fn sampled_division(id: FieldId, bits: u32, seed: u64, index: u64) -> Result<Rational> {
    let f = field(id);
    let mut rng = sample_rng(seed, index);
    let a = random_ring_element(id, &mut rng, bits);
    let b = random_nonzero(id, &mut rng, bits);
    let d = divide(&a, &b)?;
    let fail = |what: String| Err(verification(id, format!("sample {index}: {what}")));
    if !check_division(&a, &b, &d)? {
        return fail("a ≠ b·q + r".into());
    }
    if !d.remainder.is_zero() && d.norm_remainder >= d.norm_divisor {
        return fail("|N(r)| ≥ |N(b)|".into());
    }
    let ratio = d.norm_ratio();
    if ratio > f.norm_bound() {
        return fail(format!("ratio {ratio} exceeds Δ_K/4096"));
    }
    if ratio > f.norm_sup_voronoi {
        return fail(format!("ratio {ratio} exceeds the Voronoi sup"));
    }
    Ok(ratio)
}

/// Runs `count` seeded random divisions with `coord_bits`-bit coordinates.
///
/// Every sample is checked against the Euclidean contract and both ratio
/// bounds; a single violation fails the whole run.
pub fn sample_remainder_ratios(id: FieldId, count: u64, coord_bits: u32, seed: u64) -> Result<StatsReport> {
    if count == 0 {
        return Err(Error::EmptyMeasurement("sample count is 0".into()));
    }
    field(id);
    let start = Instant::now();
    let ratios: Vec<Rational> = (0..count)
        .into_par_iter()
        .map(|i| sampled_division(id, coord_bits, seed, i))
        .collect::<Result<_>>()?;
    let max_ratio = ratios.iter().max().cloned().unwrap_or_default();
    let mean_ratio = ratios.iter().map(Rational::to_f64).sum::<f64>() / count as f64;
    Ok(StatsReport {
        field: id,
        sample_count: count,
        coord_bits,
        max_ratio,
        mean_ratio,
        seed,
        elapsed: start.elapsed().as_secs_f64(),
    })
}

/// `|N(x − cv(x))|` and the reduced point, for `x` in B-coordinates.
/// Points of the closed Voronoi cell are their own reduction, so boundary
/// ties never replace `x` by a different representative.
fn reduced_norm(id: FieldId, x: &Vec8Q) -> (Rational, Vec8Q) {
    let f = field(id);
    let x = f.element(x.clone());
    let e = if f.in_voronoi(&x) {
        x
    } else {
        x.sub(&f.closest_vector(&x).to_field()).expect("same field")
    };
    (f.norm(&e).abs(), e.coords)
}

/// Lower bound for A_F from `count` random points. Sample 0 is the table's
/// maximizer; samples `1..count` are random points from the seeded streams.
pub fn estimate_af(id: FieldId, count: u64, seed: u64) -> Result<AfEstimate> {
    if count == 0 {
        return Err(Error::EmptyMeasurement("sample count is 0".into()));
    }
    let f = field(id);
    let bound = f.norm_bound();
    let values: Vec<(Rational, Vec8Q)> = (0..count)
        .into_par_iter()
        .map(|i| {
            let x = if i == 0 {
                f.to_b(&f.sup_maximizer)
            } else {
                random_point(&mut sample_rng(seed, i), POINT_BITS)
            };
            reduced_norm(id, &x)
        })
        .collect();
    if let Some((v, _)) = values.iter().find(|(v, _)| *v > bound) {
        return Err(verification(id, format!("sampled norm {v} exceeds Δ_K/4096 = {bound}")));
    }
    // first index attaining the maximum
    let (lower_bound, arg) = values
        .into_iter()
        .reduce(|best, cur| if cur.0.cmp(&best.0) == Ordering::Greater { cur } else { best })
        .expect("count ≥ 1");
    Ok(AfEstimate {
        field: id,
        sample_count: count,
        seed,
        lower_bound,
        argmax_p_coords: f.from_b(&arg),
        bound,
    })
}

/// Mean wall-clock time of one division for each coordinate bit length.
///
/// Inputs are random ring elements whose B-coordinates have the given bit
/// length. Each size gets one untimed warm-up division; timing is
/// single-threaded.
pub fn bench_divide(id: FieldId, bit_sizes: &[u32], reps: u32, seed: u64) -> Result<BenchReport> {
    if reps == 0 {
        return Err(Error::EmptyMeasurement("reps is 0".into()));
    }
    if bit_sizes.is_empty() {
        return Err(Error::EmptyMeasurement("no bit sizes given".into()));
    }
    let mut sizes = bit_sizes.to_vec();
    sizes.sort_unstable();
    sizes.dedup();
    field(id);
    let mut rows = Vec::with_capacity(sizes.len());
    for (k, &bits) in sizes.iter().enumerate() {
        let mut rng = sample_rng(seed, k as u64);
        let pairs: Vec<(RingElement, RingElement)> = (0..=reps)
            .map(|_| (random_ring_element(id, &mut rng, bits), random_nonzero(id, &mut rng, bits)))
            .collect();
        divide(&pairs[0].0, &pairs[0].1)?;
        let mut total = 0.0;
        let mut min = f64::INFINITY;
        for (a, b) in &pairs[1..] {
            let t = Instant::now();
            let out = divide(a, b)?;
            let s = t.elapsed().as_secs_f64();
            std::hint::black_box(out);
            total += s;
            min = min.min(s);
        }
        rows.push(BenchRow { bits, reps, mean_seconds: total / f64::from(reps), min_seconds: min });
    }
    Ok(BenchReport { field: id, seed, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_coordinates_stay_in_range() {
        let mut rng = sample_rng(7, 0);
        let lim = Integer::from(1) << 5;
        let mut seen_extreme = false;
        for _ in 0..2000 {
            let c = random_coordinate(&mut rng, 5);
            assert!(c.cmp_abs(&lim).is_le());
            seen_extreme |= c.cmp_abs(&lim).is_eq();
        }
        assert!(seen_extreme);
    }

    #[test]
    fn streams_are_independent_of_order() {
        let a: Vec<Integer> = (0..4).map(|i| random_coordinate(&mut sample_rng(3, i), 64)).collect();
        let b: Vec<Integer> = (0..4).rev().map(|i| random_coordinate(&mut sample_rng(3, i), 64)).collect();
        assert_eq!(a, b.into_iter().rev().collect::<Vec<_>>());
    }

    #[test]
    fn random_points_lie_in_unit_cube() {
        let mut rng = sample_rng(1, 1);
        for _ in 0..100 {
            let p = random_point(&mut rng, 8);
            assert!(p.0.iter().all(|x| x.cmp0().is_ge() && *x < 1));
        }
    }

    #[test]
    fn table_rows() {
        for id in FieldId::ALL {
            let row = verify_table(id).unwrap();
            assert!(row.maximizer_in_voronoi);
            assert_eq!(row.bound_attained, id != FieldId::Zeta15);
        }
    }

    #[test]
    fn listed_maximizers() {
        let z24 = verify_table(FieldId::Zeta24).unwrap();
        assert_eq!(z24.listed_maximizer_norm, Rational::from((9, 256)));
        let bq = verify_table(FieldId::Biquadratic).unwrap();
        assert_eq!(bq.listed_maximizer_norm, Rational::from((225 * 256, 1)));
        assert!(!bq.listed_maximizer_in_voronoi);
        for id in [FieldId::Zeta15, FieldId::Zeta20] {
            let row = verify_table(id).unwrap();
            assert_eq!(row.listed_maximizer_norm, row.sup_value);
        }
    }

    #[test]
    fn empty_measurements() {
        assert!(matches!(bench_divide(FieldId::Zeta15, &[64], 0, 1), Err(Error::EmptyMeasurement(_))));
        assert!(matches!(sample_remainder_ratios(FieldId::Zeta15, 0, 8, 1), Err(Error::EmptyMeasurement(_))));
    }

    #[test]
    fn bench_rows_sorted() {
        let r = bench_divide(FieldId::Zeta20, &[128, 32, 64, 32], 1, 5).unwrap();
        let bits: Vec<u32> = r.rows.iter().map(|r| r.bits).collect();
        assert_eq!(bits, vec![32, 64, 128]);
        assert!(r.to_csv().starts_with("bits,mean_seconds\n32,"));
    }

    #[test]
    fn sampling_is_reproducible() {
        let a = sample_remainder_ratios(FieldId::Zeta24, 20, 16, 11).unwrap();
        let b = sample_remainder_ratios(FieldId::Zeta24, 20, 16, 11).unwrap();
        assert_eq!(a.max_ratio, b.max_ratio);
        assert_eq!(a.mean_ratio.to_bits(), b.mean_ratio.to_bits());
    }

    #[test]
    fn af_estimate_monotone_in_count() {
        let small = estimate_af(FieldId::Zeta20, 5, 2).unwrap();
        let large = estimate_af(FieldId::Zeta20, 40, 2).unwrap();
        assert!(large.lower_bound >= small.lower_bound);
    }
}
