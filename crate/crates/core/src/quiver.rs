//! Quivers, their derived quivers, root combinatorics and moment relations.
//!
//! Label schemes for derived quivers are fixed:
//! * double: the opposite of `a` is `a*`;
//! * framed: vertex `i` gains a framing vertex `i'` and an arrow `d_i: i -> i'`;
//! * generalized framing: arrows `a_k@i: i -> i'` (`k = 1..p(i)`) and
//!   `b_k@i: i' -> i` (`k = 1..q(i)`);
//! * Crawley-Boevey: framing vertices collapse to `inf`, and an arrow `x`
//!   touching a framing vertex of dimension `w` becomes `x#1..x#w`.

use std::collections::{BTreeMap, HashMap};

use num::{BigRational, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exactmat::poly::{format_rational, parse_rational};
use crate::exactmat::{Field, Matrix};

pub const CB_VERTEX: &str = "inf";

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Arrow {
    pub label: String,
    pub src: String,
    pub tgt: String,
}

impl Arrow {
    pub fn new(label: &str, src: &str, tgt: &str) -> Arrow {
        Arrow { label: label.into(), src: src.into(), tgt: tgt.into() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Quiver {
    vertices: Vec<String>,
    arrows: Vec<Arrow>,
}

/// Which derived quiver to build.
#[derive(Clone, Debug)]
pub enum DeriveKind {
    Double,
    Framed,
    Gf { p: BTreeMap<String, usize>, q: BTreeMap<String, usize> },
    Cb { w: BTreeMap<String, usize>, p: BTreeMap<String, usize>, q: BTreeMap<String, usize> },
}

pub fn framing_label(v: &str) -> String {
    format!("{v}'")
}

impl Quiver {
    pub fn new(vertices: Vec<String>, arrows: Vec<Arrow>) -> Result<Quiver> {
        for (i, v) in vertices.iter().enumerate() {
            if vertices[..i].contains(v) {
                return Err(Error::VertexError(format!("duplicate vertex {v}")));
            }
        }
        for (i, a) in arrows.iter().enumerate() {
            if arrows[..i].iter().any(|b| b.label == a.label) {
                return Err(Error::PathError(format!("duplicate arrow label {}", a.label)));
            }
            for end in [&a.src, &a.tgt] {
                if !vertices.contains(end) {
                    return Err(Error::VertexError(format!("arrow {} uses unknown vertex {end}", a.label)));
                }
            }
        }
        Ok(Quiver { vertices, arrows })
    }

    /// One vertex `0` with a loop `B`.
    pub fn jordan() -> Quiver {
        Quiver { vertices: vec!["0".into()], arrows: vec![Arrow::new("B", "0", "0")] }
    }

    /// Linearly oriented `A_k`: vertices `0..k-1`, arrows `x<i>: i -> i+1`.
    pub fn a_type(k: usize) -> Quiver {
        let vertices = (0..k).map(|i| i.to_string()).collect();
        let arrows = (0..k.saturating_sub(1))
            .map(|i| Arrow::new(&format!("x{i}"), &i.to_string(), &(i + 1).to_string()))
            .collect();
        Quiver { vertices, arrows }
    }

    /// `jordan` or `a<k>`.
    pub fn builtin(name: &str) -> Result<Quiver> {
        if name == "jordan" {
            return Ok(Quiver::jordan());
        }
        if let Some(k) = name.strip_prefix('a').and_then(|k| k.parse::<usize>().ok()) {
            if k >= 1 {
                return Ok(Quiver::a_type(k));
            }
        }
        Err(Error::Parse(format!("unknown builtin quiver {name}")))
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    pub fn vertex_index(&self, v: &str) -> Result<usize> {
        self.vertices.iter().position(|x| x == v).ok_or_else(|| Error::VertexError(v.into()))
    }

    pub fn arrow(&self, label: &str) -> Result<&Arrow> {
        self.arrows
            .iter()
            .find(|a| a.label == label)
            .ok_or_else(|| Error::PathError(format!("unknown arrow {label}")))
    }

    pub fn arrow_index(&self, label: &str) -> Result<usize> {
        self.arrows
            .iter()
            .position(|a| a.label == label)
            .ok_or_else(|| Error::PathError(format!("unknown arrow {label}")))
    }

    pub fn double(&self) -> Quiver {
        let mut arrows = self.arrows.clone();
        for a in &self.arrows {
            arrows.push(Arrow::new(&format!("{}*", a.label), &a.tgt, &a.src));
        }
        Quiver { vertices: self.vertices.clone(), arrows }
    }

    pub fn framed(&self) -> Quiver {
        let mut vertices = self.vertices.clone();
        let mut arrows = self.arrows.clone();
        for v in &self.vertices {
            vertices.push(framing_label(v));
            arrows.push(Arrow::new(&format!("d_{v}"), v, &framing_label(v)));
        }
        Quiver { vertices, arrows }
    }

    fn check_keys(&self, m: &BTreeMap<String, usize>) -> Result<()> {
        for k in m.keys() {
            self.vertex_index(k)?;
        }
        Ok(())
    }

    /// Generalized framing with `p(i) > 0` outgoing and `q(i) >= 0` incoming
    /// framing arrows; missing entries default to `p = 1`, `q = 0`.
    pub fn gf(&self, p: &BTreeMap<String, usize>, q: &BTreeMap<String, usize>) -> Result<Quiver> {
        self.check_keys(p)?;
        self.check_keys(q)?;
        if let Some((v, _)) = p.iter().find(|(_, &n)| n == 0) {
            return Err(Error::VertexError(format!("p({v}) must be positive")));
        }
        let mut vertices = self.vertices.clone();
        let mut arrows = self.arrows.clone();
        for v in &self.vertices {
            let fv = framing_label(v);
            vertices.push(fv.clone());
            for k in 1..=p.get(v).copied().unwrap_or(1) {
                arrows.push(Arrow::new(&format!("a_{k}@{v}"), v, &fv));
            }
            for k in 1..=q.get(v).copied().unwrap_or(0) {
                arrows.push(Arrow::new(&format!("b_{k}@{v}"), &fv, v));
            }
        }
        Ok(Quiver { vertices, arrows })
    }

    /// Collapses the given framing vertices (with dimensions `w`) into one
    /// vertex `inf`.
    pub fn crawley_boevey(&self, w: &BTreeMap<String, usize>) -> Result<Quiver> {
        self.check_keys(w)?;
        let mut vertices: Vec<String> = self.vertices.iter().filter(|v| !w.contains_key(*v)).cloned().collect();
        vertices.push(CB_VERTEX.into());
        let mut arrows = Vec::new();
        for a in &self.arrows {
            match (w.get(&a.src), w.get(&a.tgt)) {
                (None, None) => arrows.push(a.clone()),
                (None, Some(&n)) => {
                    for l in 1..=n {
                        arrows.push(Arrow::new(&format!("{}#{l}", a.label), &a.src, CB_VERTEX));
                    }
                }
                (Some(&n), None) => {
                    for l in 1..=n {
                        arrows.push(Arrow::new(&format!("{}#{l}", a.label), CB_VERTEX, &a.tgt));
                    }
                }
                (Some(_), Some(_)) => {
                    return Err(Error::PathError(format!("arrow {} joins two framing vertices", a.label)))
                }
            }
        }
        Ok(Quiver { vertices, arrows })
    }

    pub fn derive(&self, kind: &DeriveKind) -> Result<Quiver> {
        match kind {
            DeriveKind::Double => Ok(self.double()),
            DeriveKind::Framed => Ok(self.framed()),
            DeriveKind::Gf { p, q } => self.gf(p, q),
            DeriveKind::Cb { w, p, q } => {
                self.check_keys(w)?;
                let gf = self.gf(p, q)?;
                let wf = self.vertices.iter().map(|v| (framing_label(v), w.get(v).copied().unwrap_or(0))).collect();
                gf.crawley_boevey(&wf)
            }
        }
    }

    /// Same quiver with vertices renamed by `f`.
    pub fn relabel(&self, f: impl Fn(&str) -> String) -> Quiver {
        Quiver {
            vertices: self.vertices.iter().map(|v| f(v)).collect(),
            arrows: self.arrows.iter().map(|a| Arrow::new(&a.label, &f(&a.src), &f(&a.tgt))).collect(),
        }
    }

    /// `2I - A` where `A[i][j]` counts arrows `j -> i` of the double.
    pub fn cartan_matrix(&self) -> Vec<Vec<i64>> {
        let n = self.vertices.len();
        let mut c = vec![vec![0i64; n]; n];
        for (i, row) in c.iter_mut().enumerate() {
            row[i] = 2;
        }
        for a in &self.arrows {
            let s = self.vertex_index(&a.src).unwrap();
            let t = self.vertex_index(&a.tgt).unwrap();
            c[t][s] -= 1;
            c[s][t] -= 1;
        }
        c
    }

    pub fn cartan_exact(&self) -> Matrix {
        Matrix::from_ints(&Field::Rational, &self.cartan_matrix())
    }

    pub fn to_json(&self) -> Value {
        json!({
            "vertices": self.vertices,
            "arrows": self.arrows.iter().map(|a| json!({"label": a.label, "src": a.src, "tgt": a.tgt})).collect::<Vec<_>>(),
        })
    }

    /// Accepts a quiver object or a builtin name.
    pub fn from_json(v: &Value) -> Result<Quiver> {
        if let Some(name) = v.as_str() {
            return Quiver::builtin(name);
        }
        let str_of = |x: &Value, what: &str| {
            x.as_str().map(String::from).ok_or_else(|| Error::Parse(format!("{what} must be a string")))
        };
        let vertices = v
            .get("vertices")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("quiver needs \"vertices\"".into()))?
            .iter()
            .map(|x| str_of(x, "vertex"))
            .collect::<Result<Vec<_>>>()?;
        let arrows = v
            .get("arrows")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("quiver needs \"arrows\"".into()))?
            .iter()
            .map(|a| {
                let field = |k: &str| a.get(k).ok_or_else(|| Error::Parse(format!("arrow missing \"{k}\"")));
                Ok(Arrow {
                    label: str_of(field("label")?, "label")?,
                    src: str_of(field("src")?, "src")?,
                    tgt: str_of(field("tgt")?, "tgt")?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Quiver::new(vertices, arrows)
    }
}

/// Dot product of two integer vectors.
fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn cartan_form(c: &[Vec<i64>], u: &[i64]) -> i64 {
    let cu: Vec<i64> = c.iter().map(|row| dot(row, u)).collect();
    dot(&cu, u)
}

/// A complex parameter with rational real and imaginary parts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaussRat {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussRat {
    pub fn zero() -> GaussRat {
        GaussRat { re: BigRational::zero(), im: BigRational::zero() }
    }
}

/// The set `R_Q(v)` of nonzero `u` with `0 <= u <= v` and `(C u).u <= 2`,
/// and whether `(λ, θ)` is `v`-regular.
pub fn roots_and_regularity(
    q: &Quiver,
    v: &[usize],
    lambda: &[GaussRat],
    theta: &[BigRational],
) -> Result<(Vec<Vec<usize>>, bool)> {
    let n = q.vertices().len();
    if v.len() != n || lambda.len() != n || theta.len() != n {
        return Err(Error::ShapeError(format!("parameters must have one entry per vertex ({n})")));
    }
    let c = q.cartan_matrix();
    let mut roots = Vec::new();
    let mut u = vec![0usize; n];
    loop {
        let mut i = 0;
        while i < n {
            if u[i] < v[i] {
                u[i] += 1;
                break;
            }
            u[i] = 0;
            i += 1;
        }
        if i == n {
            break;
        }
        let ui: Vec<i64> = u.iter().map(|&x| x as i64).collect();
        if cartan_form(&c, &ui) <= 2 {
            roots.push(u.clone());
        }
    }
    roots.sort();
    let pair = |w: &[BigRational], u: &[usize]| -> BigRational {
        w.iter().zip(u).map(|(a, &b)| a * BigRational::from_integer(b.into())).sum()
    };
    let re: Vec<BigRational> = lambda.iter().map(|l| l.re.clone()).collect();
    let im: Vec<BigRational> = lambda.iter().map(|l| l.im.clone()).collect();
    let regular = roots
        .iter()
        .all(|u| !(pair(&re, u).is_zero() && pair(&im, u).is_zero() && pair(theta, u).is_zero()));
    Ok((roots, regular))
}

/// `2 w.v - (C v).v`.
pub fn nakajima_dim(q: &Quiver, v: &[usize], w: &[usize]) -> Result<i64> {
    let n = q.vertices().len();
    if v.len() != n || w.len() != n {
        return Err(Error::ShapeError(format!("dimension vectors must have length {n}")));
    }
    if w.iter().all(|&x| x == 0) {
        return Err(Error::WZero);
    }
    let vi: Vec<i64> = v.iter().map(|&x| x as i64).collect();
    let wi: Vec<i64> = w.iter().map(|&x| x as i64).collect();
    Ok(2 * dot(&wi, &vi) - cartan_form(&q.cartan_matrix(), &vi))
}

/// Formal linear combination of paths from `start` to `end`. A path is a
/// list of arrow labels composed right to left; the empty path is the
/// trivial path at `start` (which then equals `end`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    pub start: String,
    pub end: String,
    pub terms: Vec<(BigRational, Vec<String>)>,
}

impl Relation {
    /// Checks composability of every path against `q`.
    pub fn validate(&self, q: &Quiver) -> Result<()> {
        q.vertex_index(&self.start)?;
        q.vertex_index(&self.end)?;
        for (_, path) in &self.terms {
            if path.is_empty() {
                if self.start != self.end {
                    return Err(Error::PathError("trivial path between distinct vertices".into()));
                }
                continue;
            }
            let arrows = path.iter().map(|l| q.arrow(l)).collect::<Result<Vec<_>>>()?;
            if arrows.last().unwrap().src != self.start || arrows[0].tgt != self.end {
                return Err(Error::PathError(format!("path {path:?} does not run {} -> {}", self.start, self.end)));
            }
            for w in arrows.windows(2) {
                if w[0].src != w[1].tgt {
                    return Err(Error::PathError(format!("{} does not compose after {}", w[0].label, w[1].label)));
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        json!({
            "start": self.start,
            "end": self.end,
            "terms": self.terms.iter().map(|(c, p)| json!({"coeff": format_rational(c), "path": p})).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Relation> {
        let s = |k: &str| {
            v.get(k)
                .and_then(Value::as_str)
                .map(String::from)
                .ok_or_else(|| Error::Parse(format!("relation needs \"{k}\"")))
        };
        let terms = v
            .get("terms")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("relation needs \"terms\"".into()))?
            .iter()
            .map(|t| {
                let coeff = match t.get("coeff") {
                    Some(Value::String(c)) => parse_rational(c)?,
                    Some(Value::Number(n)) => BigRational::from_integer(
                        n.as_i64().ok_or_else(|| Error::Parse("coefficient must be an integer or string".into()))?.into(),
                    ),
                    _ => return Err(Error::Parse("term needs \"coeff\"".into())),
                };
                let path = t
                    .get("path")
                    .and_then(Value::as_array)
                    .ok_or_else(|| Error::Parse("term needs \"path\"".into()))?
                    .iter()
                    .map(|x| x.as_str().map(String::from).ok_or_else(|| Error::Parse("path entries are labels".into())))
                    .collect::<Result<Vec<_>>>()?;
                Ok((coeff, path))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Relation { start: s("start")?, end: s("end")?, terms })
    }
}

fn path(labels: &[&str]) -> Vec<String> {
    labels.iter().map(|s| s.to_string()).collect()
}

/// Vertex components `μ_i - λ_i` of the moment element of the framed
/// double of `q`. The relations live on `q.framed().double()`.
pub fn moment_relations(q: &Quiver, lambda: &[BigRational]) -> Result<Vec<Relation>> {
    if !lambda.is_empty() && lambda.len() != q.vertices().len() {
        return Err(Error::ShapeError("one λ per vertex".into()));
    }
    let one = || BigRational::from_integer(1.into());
    let mut out = Vec::new();
    for (idx, v) in q.vertices().iter().enumerate() {
        let mut terms = Vec::new();
        for a in q.arrows() {
            let star = format!("{}*", a.label);
            if &a.tgt == v {
                terms.push((one(), path(&[&a.label, &star])));
            }
            if &a.src == v {
                terms.push((-one(), path(&[&star, &a.label])));
            }
        }
        let d = format!("d_{v}");
        terms.push((one(), path(&[&format!("{d}*"), &d])));
        if let Some(l) = lambda.get(idx) {
            if !l.is_zero() {
                terms.push((-l.clone(), vec![]));
            }
        }
        let mut merged: Vec<(BigRational, Vec<String>)> = Vec::new();
        for (c, p) in terms {
            match merged.iter_mut().find(|(_, q)| *q == p) {
                Some(slot) => slot.0 += c,
                None => merged.push((c, p)),
            }
        }
        merged.retain(|(c, _)| !c.is_zero());
        out.push(Relation { start: v.clone(), end: v.clone(), terms: merged });
    }
    Ok(out)
}

/// Dimension vector keyed by vertex label, in vertex order.
pub fn dims_from_map(q: &Quiver, m: &HashMap<String, usize>) -> Result<Vec<usize>> {
    for k in m.keys() {
        q.vertex_index(k)?;
    }
    Ok(q.vertices().iter().map(|v| m.get(v).copied().unwrap_or(0)).collect())
}
