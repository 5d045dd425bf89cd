use std::collections::BTreeMap;

use quivmod::adhm_p2::AdhmP2;
use quivmod::exactmat::json::matrix_to_json;
use quivmod::exactmat::poly::parse_rational;
use quivmod::exactmat::{Field, Matrix};
use quivmod::flag::{minimal_to_flagrep, symplectic_eval, symplectic_gram, FlagRep};
use quivmod::minimal::{embed_j, fingerprint, invariants, normalize, MinimalPoint, MonadPoint};
use quivmod::quiver::{nakajima_dim, roots_and_regularity, GaussRat, Quiver, Relation};
use quivmod::repstab::{
    brute_force_framed, brute_force_semistable, check_relations, default_framing, is_semistable_framed, Representation,
};
use quivmod::sample;
use quivmod::surfaces::{blowup_residual, BlowupDatum, HirzRank1};
use quivmod::{Error, Result};
use num::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::Report;

fn zero_flag(m: &Matrix) -> &'static str {
    if m.is_zero() {
        "zero"
    } else {
        "nonzero"
    }
}

fn rationals(xs: &[String]) -> Result<Vec<BigRational>> {
    xs.iter().map(|s| parse_rational(s)).collect()
}

fn rationals_json(v: &Value, key: &str) -> Result<Vec<BigRational>> {
    let arr = v.get(key).and_then(Value::as_array).ok_or_else(|| Error::Parse(format!("missing list \"{key}\"")))?;
    arr.iter()
        .map(|x| match x {
            Value::String(s) => parse_rational(s),
            Value::Number(n) => n
                .as_i64()
                .map(|i| BigRational::from_integer(i.into()))
                .ok_or_else(|| Error::Parse(format!("non-integer number {n} in \"{key}\""))),
            other => Err(Error::Parse(format!("bad entry {other} in \"{key}\""))),
        })
        .collect()
}

/// `v=3,w=1` into a map.
pub fn parse_counts(s: &str) -> Result<BTreeMap<String, usize>> {
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            let (k, v) = p.split_once('=').ok_or_else(|| Error::Parse(format!("expected vertex=count, got '{p}'")))?;
            let n = v.trim().parse().map_err(|_| Error::Parse(format!("bad count in '{p}'")))?;
            Ok((k.trim().to_string(), n))
        })
        .collect()
}

pub fn validate_p2(v: &Value) -> Result<Report> {
    let d = AdhmP2::from_json(v)?;
    let res = d.moment_residual();
    let (closure_dim, stable) = d.stability_closure();
    let mut out = json!({
        "r": d.r,
        "c": d.c,
        "moment": zero_flag(&res),
        "closure_dim": closure_dim,
        "stable": stable,
    });
    if !res.is_zero() {
        out["residual"] = matrix_to_json(&res);
    }
    if d.r == 1 && res.is_zero() && stable {
        out["hilbert"] = json!(d.rank1_hilbert_check()?);
    }
    Ok(Report::verdict(out, res.is_zero() && stable))
}

pub fn validate_hirz1(v: &Value) -> Result<Report> {
    let d = HirzRank1::from_json(v)?;
    let failing: Vec<usize> = d.check_p1().iter().enumerate().filter(|(_, m)| !m.is_zero()).map(|(i, _)| i).collect();
    let p1 = failing.is_empty();
    let p2 = d.check_p2()?;
    let p3 = if p2 { Some(d.check_p3()?) } else { None };
    let mut out = json!({"n": d.n, "c": d.c, "p1": p1, "p2": p2, "p3": p3});
    if !p1 {
        out["p1_failing"] = json!(failing);
    }
    Ok(Report::verdict(out, p1 && p2 && p3 == Some(true)))
}

pub fn validate_blowup(v: &Value) -> Result<Report> {
    let d = BlowupDatum::from_json(v)?;
    let dims = d.dims();
    let res = blowup_residual(&d)?;
    let mut out = json!({
        "k": dims.k,
        "l": dims.l,
        "dim": dims.dim_w(d.r),
        "residual": zero_flag(&res),
    });
    if !res.is_zero() {
        out["residual_matrix"] = matrix_to_json(&res);
    }
    Ok(Report::verdict(out, res.is_zero()))
}

pub fn minimal_invariants(n: usize, r: usize, a: usize, c: i64) -> Result<Report> {
    let inv = invariants(n, r, a, c)?;
    let out = json!({
        "C_m": inv.c_m,
        "nonempty": inv.nonempty,
        "k": inv.k,
        "dim": inv.moduli_dim,
    });
    Ok(Report::verdict(out, inv.nonempty))
}

pub fn minimal_embed(v: &Value) -> Result<Report> {
    let mp = embed_j(&MinimalPoint::from_json(v)?);
    let member = mp.check_membership();
    let mut out = mp.to_json();
    out["member"] = json!(member);
    Ok(Report::verdict(out, member))
}

pub fn minimal_normalize(v: &Value) -> Result<Report> {
    Ok(Report::ok(normalize(&MonadPoint::from_json(v)?)?.to_json()))
}

/// Accepts a minimal point, or a monad point which is normalized first.
pub fn minimal_fingerprint(v: &Value) -> Result<Report> {
    let pt = if v.get("xi").is_some() { normalize(&MonadPoint::from_json(v)?)? } else { MinimalPoint::from_json(v)? };
    Ok(Report::ok(fingerprint(&pt).to_json()))
}

pub fn flag_stable(v: &Value) -> Result<Report> {
    let rep = FlagRep::from_json(v)?;
    if !rep.relations_hold() {
        return Err(Error::NotARepresentation("flag relations fail".into()));
    }
    let ones = vec![BigRational::from_integer(1.into()); rep.d];
    let report = is_semistable_framed(&rep.to_representation(), &["0'".to_string()], &ones)?;
    let stable = report.verdict.is_semistable();
    let mut out = report.to_json();
    out["stable"] = json!(stable);
    Ok(Report::verdict(out, stable))
}

pub fn flag_extract(v: &Value, allow_unstable: bool) -> Result<Report> {
    let rep = FlagRep::from_json(v)?;
    let flag = rep.extract_flag(!allow_unstable)?;
    let out = json!({
        "dims": flag.iter().map(|s| s.dim()).collect::<Vec<_>>(),
        "flag": flag.iter().map(|s| matrix_to_json(s.basis_rows())).collect::<Vec<_>>(),
    });
    Ok(Report::ok(out))
}

pub fn flag_from_minimal(v: &Value) -> Result<Report> {
    Ok(Report::ok(minimal_to_flagrep(&MinimalPoint::from_json(v)?)?.to_json()))
}

pub fn flag_omega(v: &Value) -> Result<Report> {
    let pair = |k: &str| -> Result<(Matrix, Matrix)> {
        let t = v.get(k).ok_or_else(|| Error::Parse(format!("missing \"{k}\"")))?;
        let m = |x: &str| {
            quivmod::exactmat::json::matrix_from_json(
                t.get(x).ok_or_else(|| Error::Parse(format!("\"{k}\" needs \"{x}\"")))?,
            )
        };
        Ok((m("e")?, m("f")?))
    };
    let (e1, f1) = pair("t1")?;
    let (e2, f2) = pair("t2")?;
    let w = symplectic_eval((&e1, &f1), (&e2, &f2))?;
    Ok(Report::ok(json!({"omega": w.to_string()})))
}

pub fn flag_gram(u: usize, v0: usize) -> Result<Report> {
    if u == 0 || v0 == 0 {
        return Err(Error::ShapeError("u and v0 must be positive".into()));
    }
    let rank = symplectic_gram(&Field::Rational, u, v0).rank();
    let full = 2 * u * v0;
    Ok(Report::verdict(json!({"rank": rank, "size": full, "nondegenerate": rank == full}), rank == full))
}

pub fn quiver_dim(q: &Quiver, v: &[usize], w: &[usize]) -> Result<Report> {
    Ok(Report::ok(json!({"dim": nakajima_dim(q, v, w)?})))
}

pub fn quiver_regular(q: &Quiver, v: &[usize], re: &[String], im: &[String], theta: &[String]) -> Result<Report> {
    let n = q.vertices().len();
    let or_zero = |xs: &[String]| -> Result<Vec<BigRational>> {
        if xs.is_empty() {
            Ok(vec![BigRational::from_integer(0.into()); n])
        } else {
            rationals(xs)
        }
    };
    let (re, im) = (or_zero(re)?, or_zero(im)?);
    if re.len() != im.len() {
        return Err(Error::ShapeError("λ real and imaginary parts differ in length".into()));
    }
    let lambda: Vec<GaussRat> = re.into_iter().zip(im).map(|(re, im)| GaussRat { re, im }).collect();
    let (roots, regular) = roots_and_regularity(q, v, &lambda, &or_zero(theta)?)?;
    Ok(Report::verdict(json!({"roots": roots, "regular": regular}), regular))
}

/// Input `{"rep", "theta", "framing"?, "relations"?}`; `framing` defaults to
/// the primed vertices.
pub fn stability(v: &Value, brute: bool) -> Result<Report> {
    let rep = Representation::from_json(v.get("rep").ok_or_else(|| Error::Parse("missing \"rep\"".into()))?)?;
    let theta = rationals_json(v, "theta")?;
    let framing: Vec<String> = match v.get("framing") {
        None => default_framing(rep.quiver()),
        Some(x) => x
            .as_array()
            .ok_or_else(|| Error::Parse("\"framing\" must be a list".into()))?
            .iter()
            .map(|s| s.as_str().map(String::from).ok_or_else(|| Error::Parse("framing vertices are strings".into())))
            .collect::<Result<_>>()?,
    };
    if let Some(rels) = v.get("relations") {
        let rels = rels
            .as_array()
            .ok_or_else(|| Error::Parse("\"relations\" must be a list".into()))?
            .iter()
            .map(Relation::from_json)
            .collect::<Result<Vec<_>>>()?;
        if !check_relations(&rep, &rels)?.iter().all(Matrix::is_zero) {
            return Err(Error::NotARepresentation("relations fail".into()));
        }
    }
    let report = match (framing.is_empty(), brute) {
        (true, _) => brute_force_semistable(&rep, &theta)?,
        (false, true) => brute_force_framed(&rep, &framing, &theta)?,
        (false, false) => is_semistable_framed(&rep, &framing, &theta)?,
    };
    let ok = report.verdict.is_semistable();
    Ok(Report::verdict(report.to_json(), ok))
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn sample_p2(r: usize, c: usize, field: &str, seed: u64) -> Result<Report> {
    let d = sample::sample_p2(&Field::parse(field)?, r, c, &mut rng(seed))?;
    Ok(Report::ok(d.to_json()))
}

pub fn sample_hirz1(n: usize, c: usize, field: &str, seed: u64) -> Result<Report> {
    let d = sample::sample_hirz1(&Field::parse(field)?, n, c, &mut rng(seed))?;
    Ok(Report::ok(d.to_json()))
}

/// Points are produced for `c = C_m`; above it only the invariants are
/// reported, below it the space is empty.
pub fn sample_minimal(n: usize, r: usize, a: usize, c: Option<i64>, field: &str, seed: u64) -> Result<Report> {
    let field = Field::parse(field)?;
    let c_m = invariants(n, r, a, 0)?.c_m;
    let c = c.unwrap_or(c_m);
    sample::check_nonempty(n, r, a, c)?;
    if c > c_m {
        let inv = invariants(n, r, a, c)?;
        let out = json!({
            "minimal": false,
            "C_m": inv.c_m,
            "c": c,
            "k": inv.k,
            "dim": inv.moduli_dim,
        });
        return Ok(Report::ok(out));
    }
    Ok(Report::ok(sample::sample_minimal(&field, n, r, a, &mut rng(seed))?.to_json()))
}

pub fn sample_flag(n: usize, u: usize, v: &[usize], field: &str, seed: u64) -> Result<Report> {
    let rep = sample::sample_flag(&Field::parse(field)?, v.len(), n, u, v, &mut rng(seed))?;
    Ok(Report::ok(rep.to_json()))
}

