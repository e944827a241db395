//! JSON request/response layer behind the `normeuclid` binary.
//!
//! A [`Request`] names one command; [`run`] dispatches it and always returns a
//! [`Response`]. Identical requests produce byte-identical payloads, except
//! for `bench`, whose payload is a timing measurement.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::analysis::{self, sample_rng};
use crate::e8::{self, StdVec8};
use crate::error::{Error, Result};
use crate::euclid::{self, check_division};
use crate::exactalg::{self, Vec8Q};
use crate::numberfield::{self, default_cache_dir, FieldData, FieldId, RingElement};
use crate::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    FieldInfo,
    Divide,
    Gcd,
    Verify,
    EstimateAf,
    Bench,
    Selftest,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Basis {
    #[default]
    B,
    P,
}

/// A coordinate given either as a JSON integer or as a `"p/q"` string.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coord {
    Int(i64),
    Text(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Bits {
    One(u32),
    Many(Vec<u32>),
}

impl Bits {
    fn to_vec(&self) -> Vec<u32> {
        match self {
            Bits::One(b) => vec![*b],
            Bits::Many(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Request {
    pub command: Command,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<FieldId>,
    #[serde(default)]
    pub basis: Basis,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub operands: Vec<Vec<Coord>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bits: Option<Bits>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reps: Option<u32>,
    /// Recompute `b·q + r` independently after `divide`.
    #[serde(default)]
    pub check: bool,
}

impl Request {
    pub fn new(command: Command) -> Request {
        Request {
            command,
            field: None,
            basis: Basis::B,
            operands: Vec::new(),
            seed: None,
            count: None,
            bits: None,
            reps: None,
            check: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Response {
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub payload: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error_kind: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
}

impl Response {
    fn ok(payload: Value) -> Response {
        Response { status: Status::Ok, payload: Some(payload), error_kind: None, message: None }
    }

    fn error(e: &Error) -> Response {
        Response {
            status: Status::Error,
            payload: None,
            error_kind: Some(e.kind().to_string()),
            message: Some(e.to_string()),
        }
    }

    /// Process exit code: 0 ok, 2 invalid input, 3 arithmetic error,
    /// 4 verification failure, 1 anything else.
    pub fn exit_code(&self) -> i32 {
        match self.error_kind.as_deref() {
            None => 0,
            Some("ParseError" | "EmptyMeasurement") => 2,
            Some("DivisionByZero" | "FieldMismatch" | "BothZero" | "NotDivisible" | "SingularMatrix") => 3,
            Some("VerificationFailed" | "CertificateFailure" | "BaseNotFound") => 4,
            Some(_) => 1,
        }
    }

    pub fn to_json(&self, pretty: bool) -> String {
        let mut s = if pretty {
            serde_json::to_string_pretty(self)
        } else {
            serde_json::to_string(self)
        }
        .expect("responses serialize");
        s.push('\n');
        s
    }
}

/// Parses a request document.
pub fn parse_request(text: &str) -> Result<Request> {
    Ok(serde_json::from_str(text)?)
}

/// Runs `request` and wraps the outcome.
pub fn run(request: &Request) -> Response {
    match dispatch(request) {
        Ok(v) => Response::ok(v),
        Err(e) => Response::error(&e),
    }
}

/// Field data for `id`, through the on-disk cache when it is usable.
pub fn load_field(id: FieldId) -> &'static FieldData {
    if let Some(f) = numberfield::installed(id) {
        return f;
    }
    match numberfield::load_or_build(id, &default_cache_dir()) {
        Ok(data) => numberfield::install(data),
        Err(_) => numberfield::field(id),
    }
}

fn required_field(req: &Request) -> Result<FieldId> {
    req.field.ok_or_else(|| Error::Parse("missing field".into()))
}

fn parse_coord(c: &Coord) -> Result<Rational> {
    match c {
        Coord::Int(n) => Ok(Rational::from(*n)),
        Coord::Text(s) => exactalg::parse_rational(s),
    }
}

fn operand(f: &FieldData, basis: Basis, coords: &[Coord]) -> Result<RingElement> {
    if coords.len() != 8 {
        return Err(Error::Parse(format!("operand has {} coordinates, expected 8", coords.len())));
    }
    let mut v = Vec8Q::zero();
    for (i, c) in coords.iter().enumerate() {
        v[i] = parse_coord(c)?;
    }
    let element = match basis {
        Basis::B => v.to_integer().map(|z| f.ring_element(z)),
        Basis::P => f.ring_from_p(&v),
    };
    element.ok_or_else(|| Error::Parse("operand is not in the ring of integers".into()))
}

fn operands<const N: usize>(f: &FieldData, req: &Request) -> Result<[RingElement; N]> {
    if req.operands.len() != N {
        return Err(Error::Parse(format!("expected {N} operands, got {}", req.operands.len())));
    }
    let parsed = req
        .operands
        .iter()
        .map(|c| operand(f, req.basis, c))
        .collect::<Result<Vec<_>>>()?;
    Ok(parsed.try_into().expect("length checked"))
}

fn render(f: &FieldData, basis: Basis, x: &RingElement) -> Value {
    match basis {
        Basis::B => serde_json::to_value(&x.coords).expect("serializes"),
        Basis::P => serde_json::to_value(f.from_b(&x.coords.to_rational())).expect("serializes"),
    }
}

fn dispatch(req: &Request) -> Result<Value> {
    match req.command {
        Command::FieldInfo => {
            let f = load_field(required_field(req)?);
            let mut v = serde_json::to_value(f)?;
            v["norm_bound"] = json!(f.norm_bound().to_string());
            Ok(v)
        }
        Command::Divide => {
            let f = load_field(required_field(req)?);
            let [a, b] = operands::<2>(f, req)?;
            let d = euclid::divide(&a, &b)?;
            if req.check && !check_division(&a, &b, &d)? {
                return Err(Error::VerificationFailed { field: f.id, what: "a ≠ b·q + r".into() });
            }
            Ok(json!({
                "field": f.id,
                "basis": req.basis,
                "quotient": render(f, req.basis, &d.quotient),
                "remainder": render(f, req.basis, &d.remainder),
                "norm_ratio": d.norm_ratio().to_string(),
                "norm_divisor": d.norm_divisor.to_string(),
                "norm_remainder": d.norm_remainder.to_string(),
                "checked": req.check,
            }))
        }
        Command::Gcd => {
            let f = load_field(required_field(req)?);
            let [a, b] = operands::<2>(f, req)?;
            let r = euclid::xgcd(&a, &b)?;
            Ok(json!({
                "field": f.id,
                "basis": req.basis,
                "g": render(f, req.basis, &r.g),
                "u": render(f, req.basis, &r.u),
                "v": render(f, req.basis, &r.v),
                "steps": r.steps,
            }))
        }
        Command::Verify => {
            let ids = req.field.map_or(FieldId::ALL.to_vec(), |id| vec![id]);
            let mut rows = Vec::new();
            for id in ids {
                let f = load_field(id);
                // reloading re-runs every construction certificate
                FieldData::from_json(&f.to_json())?;
                rows.push(json!({ "field": id, "certificates": "ok", "table": analysis::verify_table(id)? }));
            }
            Ok(Value::Array(rows))
        }
        Command::EstimateAf => {
            let id = required_field(req)?;
            load_field(id);
            let est = analysis::estimate_af(id, req.count.unwrap_or(1000), req.seed.unwrap_or(0))?;
            Ok(serde_json::to_value(est)?)
        }
        Command::Bench => {
            let id = required_field(req)?;
            load_field(id);
            let bits = req.bits.as_ref().map_or(vec![1000, 10_000, 100_000], Bits::to_vec);
            let report = analysis::bench_divide(id, &bits, req.reps.unwrap_or(3), req.seed.unwrap_or(0))?;
            Ok(serde_json::to_value(report)?)
        }
        Command::Selftest => selftest(req.seed.unwrap_or(0), req.count.unwrap_or(200)),
    }
}

/// Oracle-equivalence and invariant checks at reduced sample counts.
fn selftest(seed: u64, count: u64) -> Result<Value> {
    let mut checks = Vec::new();
    for id in FieldId::ALL {
        let f = load_field(id);
        analysis::verify_table(id)?;
        let stats = analysis::sample_remainder_ratios(id, count, 64, seed)?;
        let mut rng = sample_rng(seed, u64::MAX);
        for _ in 0..count.min(50) {
            let a = analysis::random_ring_element(id, &mut rng, 24);
            let b = analysis::random_ring_element(id, &mut rng, 24);
            if a.is_zero() && b.is_zero() {
                continue;
            }
            let r = euclid::xgcd(&a, &b)?;
            let lhs = f.mult_matrix_ring(&r.u).mul_vec(&a.coords).add(&f.mult_matrix_ring(&r.v).mul_vec(&b.coords));
            if lhs != r.g.coords {
                return Err(Error::VerificationFailed { field: id, what: "u·a + v·b ≠ g".into() });
            }
            euclid::exact_div(&a, &r.g)?;
            euclid::exact_div(&b, &r.g)?;
        }
        for i in 0..8 {
            let e = Vec8Q::unit(i);
            if f.to_b(&f.from_b(&e)) != e {
                return Err(Error::VerificationFailed { field: id, what: "basis round trip".into() });
            }
        }
        checks.push(json!({ "field": id, "max_ratio": stats.max_ratio.to_string(), "divisions": count }));
    }
    let mut rng = sample_rng(seed, u64::MAX - 1);
    for _ in 0..count {
        let x = StdVec8(Vec8Q::from_fn(|_| {
            let den = rand::Rng::gen_range(&mut rng, 1..=64i64);
            let num = rand::Rng::gen_range(&mut rng, -4 * den..=4 * den);
            Rational::from((num, den))
        }));
        let (_, best) = e8::cvp_bruteforce(&x);
        if e8::dist2(&x, &e8::decode_e8(&x).to_std()) != best {
            return Err(Error::VerificationFailed { field: FieldId::Zeta15, what: format!("decoder differs from search at {x:?}") });
        }
    }
    Ok(json!({ "fields": checks, "decoder_points": count, "result": "ok" }))
}

/// Parses a comma-separated list of coordinates such as `"1,0,-1/2,0,0,0,0,0"`.
pub fn parse_coord_list(s: &str) -> Result<Vec<Coord>> {
    let parts: Vec<Coord> = s
        .trim()
        .trim_start_matches('[')
        .trim_end_matches(']')
        .split(',')
        .map(|p| Coord::Text(p.trim().trim_matches('"').to_string()))
        .collect();
    for p in &parts {
        parse_coord(p)?;
    }
    Ok(parts)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(xs: [i64; 8]) -> Vec<Coord> {
        xs.iter().map(|&x| Coord::Int(x)).collect()
    }

    fn divide_request(a: [i64; 8], b: [i64; 8]) -> Request {
        Request {
            field: Some(FieldId::Zeta15),
            operands: vec![ints(a), ints(b)],
            check: true,
            ..Request::new(Command::Divide)
        }
    }

    #[test]
    fn divide_by_a_basis_vector() {
        let r = run(&divide_request([2, 0, 0, 0, 0, 0, 0, 0], [1, 0, 0, 0, 0, 0, 0, 0]));
        assert_eq!(r.status, Status::Ok);
        let p = r.payload.unwrap();
        // a = 2·b, so q is the ring element 2
        let two = numberfield::field(FieldId::Zeta15).one().coords.scale(&crate::Integer::from(2));
        assert_eq!(p["quotient"], serde_json::to_value(&two).unwrap());
        assert_eq!(p["remainder"], json!(["0", "0", "0", "0", "0", "0", "0", "0"]));
        assert_eq!(p["norm_ratio"], "0");
    }

    #[test]
    fn division_by_zero_exits_3() {
        let r = run(&divide_request([2, 0, 0, 0, 0, 0, 0, 0], [0; 8]));
        assert_eq!(r.error_kind.as_deref(), Some("DivisionByZero"));
        assert_eq!(r.exit_code(), 3);
    }

    #[test]
    fn malformed_requests_exit_2() {
        assert!(matches!(parse_request("{\"command\": \"frobnicate\"}"), Err(Error::Parse(_))));
        let mut req = divide_request([1; 8], [1; 8]);
        req.operands[0].pop();
        assert_eq!(run(&req).exit_code(), 2);
        req.operands[0] = vec![Coord::Text("1/0".into()); 8];
        assert_eq!(run(&req).exit_code(), 2);
        assert_eq!(run(&Request::new(Command::Divide)).exit_code(), 2);
    }

    #[test]
    fn requests_round_trip_through_json() {
        let text = r#"{"command":"divide","field":"zeta20","basis":"P","operands":[["1","1/2",0,0,0,0,0,0],[1,0,0,0,0,0,0,0]]}"#;
        let req = parse_request(text).unwrap();
        assert_eq!(req.basis, Basis::P);
        assert_eq!(parse_request(&serde_json::to_string(&req).unwrap()).unwrap(), req);
        // ½ζ is not integral
        assert_eq!(run(&req).exit_code(), 2);
    }

    #[test]
    fn reference_basis_output() {
        let mut req = divide_request([5, -1, 2, 0, 0, 3, 0, 1], [1, 1, 0, 0, 0, 0, 0, 0]);
        req.basis = Basis::P;
        let r = run(&req);
        assert_eq!(r.status, Status::Ok, "{r:?}");
        let p = r.payload.unwrap();
        assert_eq!(p["basis"], "P");
        assert_eq!(p["checked"], true);
    }

    #[test]
    fn gcd_and_determinism() {
        let req = Request {
            field: Some(FieldId::Zeta24),
            operands: vec![ints([12, 3, 0, -4, 1, 0, 0, 2]), ints([3, 0, 1, 0, 0, -1, 0, 0])],
            ..Request::new(Command::Gcd)
        };
        let a = run(&req).to_json(false);
        assert_eq!(a, run(&req).to_json(false));
        assert!(a.contains("\"steps\""));
    }

    #[test]
    fn verify_one_field() {
        let req = Request { field: Some(FieldId::Zeta24), ..Request::new(Command::Verify) };
        let r = run(&req);
        assert_eq!(r.status, Status::Ok);
        assert_eq!(r.payload.unwrap()[0]["table"]["sup_value"], "9/16");
    }

    #[test]
    fn estimate_af_is_deterministic() {
        let req = Request { field: Some(FieldId::Biquadratic), count: Some(20), seed: Some(5), ..Request::new(Command::EstimateAf) };
        let a = run(&req);
        assert_eq!(a.payload.as_ref().unwrap()["lower_bound"], "225/256");
        assert_eq!(a.to_json(true), run(&req).to_json(true));
    }

    #[test]
    fn empty_bench_is_rejected() {
        let req = Request { field: Some(FieldId::Zeta15), reps: Some(0), ..Request::new(Command::Bench) };
        assert_eq!(run(&req).error_kind.as_deref(), Some("EmptyMeasurement"));
    }

    #[test]
    fn coordinate_lists() {
        assert_eq!(parse_coord_list("1, -1/2 ,0").unwrap().len(), 3);
        assert!(parse_coord_list("1,x").is_err());
    }
}
