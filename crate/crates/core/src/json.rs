//! JSON encodings of lattices, coverings, forms, matrices and scan reports.

use num_traits::ToPrimitive;
use serde_json::{json, Value};
use thiserror::Error;

use crate::arith::{format_rat, parse_rat, ArithError, Int, Rat, RatMat2, Vec2};
use crate::covering::{CoverError, CoverReport, Covering};
use crate::d4::{ConfigReport, ScanReport};
use crate::forms::{BinaryForm, FormError};
use crate::lattice::{Congruence, CongruenceSystem, Lattice, LatticeError};

#[derive(Debug, Error)]
pub enum JsonError {
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error(transparent)]
    Syntax(#[from] serde_json::Error),
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Cover(#[from] CoverError),
    #[error(transparent)]
    Form(#[from] FormError),
}

fn malformed(what: impl Into<String>) -> JsonError {
    JsonError::Malformed(what.into())
}

/// Integers that fit in `i64` become JSON numbers, larger ones strings.
pub fn int_to_json(n: &Int) -> Value {
    match n.to_i64() {
        Some(v) => json!(v),
        None => json!(n.to_string()),
    }
}

pub fn int_from_json(v: &Value) -> Result<Int, JsonError> {
    match v {
        Value::Number(n) => n
            .as_i64()
            .map(Int::from)
            .ok_or_else(|| malformed(format!("not an integer: {n}"))),
        Value::String(s) => s.trim().parse().map_err(|_| malformed(format!("not an integer: {s:?}"))),
        other => Err(malformed(format!("expected an integer, got {other}"))),
    }
}

/// Rationals are strings `"p/q"` or `"p"`; plain integers are accepted.
pub fn rat_from_json(v: &Value) -> Result<Rat, JsonError> {
    match v {
        Value::String(s) => Ok(parse_rat(s)?),
        Value::Number(_) => Ok(Rat::from_integer(int_from_json(v)?)),
        other => Err(malformed(format!("expected a rational string, got {other}"))),
    }
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value, JsonError> {
    v.get(key).ok_or_else(|| malformed(format!("missing field {key:?}")))
}

fn array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>, JsonError> {
    v.as_array().ok_or_else(|| malformed(format!("{what} must be an array")))
}

fn pair<T>(v: &Value, what: &str, f: impl Fn(&Value) -> Result<T, JsonError>) -> Result<[T; 2], JsonError> {
    match array(v, what)?.as_slice() {
        [x, y] => Ok([f(x)?, f(y)?]),
        _ => Err(malformed(format!("{what} must have two entries"))),
    }
}

/// `{"basis": [[a, 0], [c, b]]}`, the columns being the canonical basis.
pub fn lattice_to_json(l: &Lattice) -> Value {
    json!({ "basis": [[int_to_json(l.a()), 0], [int_to_json(l.c()), int_to_json(l.b())]] })
}

/// Accepts `{"basis": [[p, q], [r, s]]}` with generator columns `(p, r)`
/// and `(q, s)`, or `{"congruences": [{"alpha", "beta", "mod"}, …]}`.
pub fn lattice_from_json(v: &Value) -> Result<Lattice, JsonError> {
    if let Some(basis) = v.get("basis") {
        let [[p, q], [r, s]] = pair(basis, "basis", |row| pair(row, "basis row", int_from_json))?;
        let gens = [Vec2::new(p, r), Vec2::new(q, s)];
        return Ok(Lattice::from_generators(&gens)?);
    }
    if let Some(rows) = v.get("congruences") {
        let rows = array(rows, "congruences")?
            .iter()
            .map(|row| {
                Ok(Congruence::new(
                    int_from_json(field(row, "alpha")?)?,
                    int_from_json(field(row, "beta")?)?,
                    int_from_json(field(row, "mod")?)?,
                )?)
            })
            .collect::<Result<Vec<_>, JsonError>>()?;
        return Ok(Lattice::from_congruences(&CongruenceSystem::new(rows)?));
    }
    Err(malformed("a lattice needs \"basis\" or \"congruences\""))
}

pub fn covering_to_json(c: &Covering) -> Value {
    json!({ "lattices": c.lattices().iter().map(lattice_to_json).collect::<Vec<_>>() })
}

/// The members as given, before sorting and deduplication.
pub fn lattices_from_json(v: &Value) -> Result<Vec<Lattice>, JsonError> {
    array(field(v, "lattices")?, "lattices")?.iter().map(lattice_from_json).collect()
}

pub fn covering_from_json(v: &Value) -> Result<Covering, JsonError> {
    Ok(Covering::new(lattices_from_json(v)?)?)
}

pub fn vec2_to_json(x: &Vec2) -> Value {
    json!([int_to_json(&x.x1), int_to_json(&x.x2)])
}

pub fn cover_report_to_json(r: &CoverReport) -> Value {
    json!({
        "covers": r.covers,
        "witness": r.witness.as_ref().map(vec2_to_json),
        "uniquely_covered": r
            .uniquely_covered
            .iter()
            .map(|cells| cells.iter().map(vec2_to_json).collect::<Vec<_>>())
            .collect::<Vec<_>>(),
    })
}

/// `{"degree": d, "coeffs": ["a_d", …, "a_0"]}`.
pub fn form_to_json(f: &BinaryForm) -> Value {
    json!({
        "degree": f.degree(),
        "coeffs": f.coeffs().iter().map(format_rat).collect::<Vec<_>>(),
    })
}

pub fn form_from_json(v: &Value) -> Result<BinaryForm, JsonError> {
    let coeffs = array(field(v, "coeffs")?, "coeffs")?
        .iter()
        .map(rat_from_json)
        .collect::<Result<Vec<_>, _>>()?;
    if let Some(d) = v.get("degree") {
        let d = d.as_u64().ok_or_else(|| malformed("degree must be a natural number"))?;
        if d as usize + 1 != coeffs.len() {
            return Err(malformed(format!("degree {d} needs {} coefficients", d + 1)));
        }
    }
    Ok(BinaryForm::new(coeffs)?)
}

/// Row-major array of rational strings.
pub fn ratmat_to_json(m: &RatMat2) -> Value {
    json!([[format_rat(&m.m11), format_rat(&m.m12)], [format_rat(&m.m21), format_rat(&m.m22)]])
}

pub fn ratmat_from_json(v: &Value) -> Result<RatMat2, JsonError> {
    let [[a, b], [c, d]] = pair(v, "matrix", |row| pair(row, "matrix row", rat_from_json))?;
    Ok(RatMat2::new(a, b, c, d))
}

pub fn config_report_to_json(r: &ConfigReport) -> Value {
    let c = &r.config;
    json!({
        "D": int_to_json(c.params.d()),
        "nu": int_to_json(c.params.nu()),
        "t": c.t2.t().iter().map(int_to_json).collect::<Vec<_>>(),
        "lambdas": r.lambdas.iter().map(lattice_to_json).collect::<Vec<_>>(),
        "all_proper": r.all_proper,
        "covers": r.covers,
        "gamma_minimal": r.gamma_minimal,
        "survivor": r.survivor,
    })
}

pub fn scan_report_to_json(r: &ScanReport) -> Value {
    json!({
        "configs": r.configs,
        "survivors": r.survivors.iter().map(config_report_to_json).collect::<Vec<_>>(),
        "buckets": {
            "invalid": r.buckets.invalid,
            "not_proper": r.buckets.not_proper,
            "not_covering": r.buckets.not_covering,
            "not_minimal": r.buckets.not_minimal,
        },
        "proper_covering": r.proper_covering.len(),
        "violations": r.violations,
    })
}
