//! JSON encoding of matrices: `{"rows","cols","field","entries":[[..]]}`
//! with entries as `"p/q"` strings (plain integers are accepted on input).

use serde_json::{json, Value};

use super::matrix::Matrix;
use super::scalar::{Elem, Field};
use crate::error::{Error, Result};

pub fn matrix_to_json(m: &Matrix) -> Value {
    let f = m.field();
    let entries: Vec<Value> = (0..m.rows())
        .map(|i| Value::Array(m.row(i).iter().map(|e| Value::String(f.format(e))).collect()))
        .collect();
    json!({
        "rows": m.rows(),
        "cols": m.cols(),
        "field": f.to_string(),
        "entries": entries,
    })
}

fn parse_entry(f: &Field, v: &Value) -> Result<Elem> {
    match v {
        Value::String(s) => f.parse_elem(s),
        Value::Number(n) => match n.as_i64() {
            Some(i) => Ok(f.from_i64(i)),
            None => Err(Error::Parse(format!("non-integer numeric entry {n}; use a \"p/q\" string"))),
        },
        other => Err(Error::Parse(format!("bad matrix entry {other}"))),
    }
}

fn usize_field(v: &Value, key: &str) -> Result<Option<usize>> {
    match v.get(key) {
        None => Ok(None),
        Some(x) => x
            .as_u64()
            .map(|n| Some(n as usize))
            .ok_or_else(|| Error::Parse(format!("\"{key}\" must be a nonnegative integer"))),
    }
}

/// Parses a matrix; a missing `"field"` means the rationals, missing
/// `"rows"`/`"cols"` are inferred from `"entries"`.
pub fn matrix_from_json(v: &Value) -> Result<Matrix> {
    if !v.is_object() {
        return Err(Error::Parse("matrix must be a JSON object".into()));
    }
    let field = match v.get("field") {
        None => Field::Rational,
        Some(Value::String(s)) => Field::parse(s)?,
        Some(other) => return Err(Error::Parse(format!("bad field tag {other}"))),
    };
    let rows_v = v
        .get("entries")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Parse("matrix needs an \"entries\" array".into()))?;
    let rows = usize_field(v, "rows")?.unwrap_or(rows_v.len());
    let inferred_cols = rows_v.first().and_then(Value::as_array).map_or(0, Vec::len);
    let cols = usize_field(v, "cols")?.unwrap_or(inferred_cols);
    if rows_v.len() != rows {
        return Err(Error::ShapeError(format!("declared {rows} rows, found {}", rows_v.len())));
    }
    let mut data = Vec::with_capacity(rows * cols);
    for (i, r) in rows_v.iter().enumerate() {
        let r = r.as_array().ok_or_else(|| Error::Parse(format!("row {i} is not an array")))?;
        if r.len() != cols {
            return Err(Error::ShapeError(format!("row {i} has {} entries, expected {cols}", r.len())));
        }
        for e in r {
            data.push(parse_entry(&field, e)?);
        }
    }
    Matrix::from_vec(&field, rows, cols, data)
}

/// Field-consistent parse of several matrices.
pub fn matrices_from_json(v: &Value) -> Result<Vec<Matrix>> {
    v.as_array()
        .ok_or_else(|| Error::Parse("expected an array of matrices".into()))?
        .iter()
        .map(matrix_from_json)
        .collect()
}
