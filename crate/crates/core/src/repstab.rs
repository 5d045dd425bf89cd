//! Quiver representations, relation residuals and slope stability.

use std::collections::{BTreeMap, HashMap};

use num::{BigRational, Integer, One, ToPrimitive};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::exactmat::fp::{gaussian_binomial, in_span, subspaces, FpMat};
use crate::exactmat::json::{matrix_from_json, matrix_to_json};
use crate::exactmat::{Field, Matrix, Subspace};
use crate::quiver::{Quiver, Relation};

/// Subspace enumeration budget for brute-force stability.
pub const ENUMERATION_BUDGET: u128 = 10_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Representation {
    quiver: Quiver,
    field: Field,
    dims: Vec<usize>,
    maps: Vec<Matrix>,
}

impl Representation {
    /// `maps[k]` belongs to arrow `k` and must be `dim(tgt) x dim(src)`.
    pub fn new(quiver: Quiver, field: Field, dims: Vec<usize>, maps: Vec<Matrix>) -> Result<Representation> {
        if dims.len() != quiver.vertices().len() {
            return Err(Error::ShapeError("one dimension per vertex".into()));
        }
        if maps.len() != quiver.arrows().len() {
            return Err(Error::ShapeError("one matrix per arrow".into()));
        }
        for (a, m) in quiver.arrows().iter().zip(&maps) {
            let want = (dims[quiver.vertex_index(&a.tgt)?], dims[quiver.vertex_index(&a.src)?]);
            if m.shape() != want {
                return Err(Error::ShapeError(format!("arrow {} is {:?}, expected {:?}", a.label, m.shape(), want)));
            }
            if *m.field() != field {
                return Err(Error::FieldMismatch(format!("arrow {} over {}, expected {}", a.label, m.field(), field)));
            }
        }
        Ok(Representation { quiver, field, dims, maps })
    }

    /// Builds from labelled maps; arrows without a map are zero.
    pub fn from_named(
        quiver: Quiver,
        field: Field,
        dims: &HashMap<String, usize>,
        maps: &HashMap<String, Matrix>,
    ) -> Result<Representation> {
        for k in maps.keys() {
            quiver.arrow(k)?;
        }
        let dims = crate::quiver::dims_from_map(&quiver, dims)?;
        let mut ms = Vec::new();
        for a in quiver.arrows() {
            let shape = (dims[quiver.vertex_index(&a.tgt)?], dims[quiver.vertex_index(&a.src)?]);
            ms.push(match maps.get(&a.label) {
                Some(m) => m.clone(),
                None => Matrix::zeros(&field, shape.0, shape.1),
            });
        }
        Representation::new(quiver, field, dims, ms)
    }

    pub fn quiver(&self) -> &Quiver {
        &self.quiver
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn maps(&self) -> &[Matrix] {
        &self.maps
    }

    pub fn dim(&self, vertex: &str) -> Result<usize> {
        Ok(self.dims[self.quiver.vertex_index(vertex)?])
    }

    pub fn map(&self, label: &str) -> Result<&Matrix> {
        Ok(&self.maps[self.quiver.arrow_index(label)?])
    }

    /// Evaluates a path (right-to-left composition) starting at `start`.
    pub fn eval_path(&self, start: &str, path: &[String]) -> Result<Matrix> {
        let n = self.dim(start)?;
        let mut acc = Matrix::identity(&self.field, n);
        let mut at = start.to_string();
        for label in path.iter().rev() {
            let a = self.quiver.arrow(label)?;
            if a.src != at {
                return Err(Error::PathError(format!("arrow {label} does not start at {at}")));
            }
            acc = self.map(label)?.try_mul(&acc).map_err(|e| Error::PathError(e.to_string()))?;
            at = a.tgt.clone();
        }
        Ok(acc)
    }

    pub fn to_json(&self) -> Value {
        let dims: Map<String, Value> =
            self.quiver.vertices().iter().zip(&self.dims).map(|(v, d)| (v.clone(), json!(d))).collect();
        let maps: Map<String, Value> =
            self.quiver.arrows().iter().zip(&self.maps).map(|(a, m)| (a.label.clone(), matrix_to_json(m))).collect();
        json!({
            "quiver": self.quiver.to_json(),
            "field": self.field.to_string(),
            "dims": dims,
            "maps": maps,
        })
    }

    /// Parses `{"quiver", "field"?, "dims", "maps"}`.
    pub fn from_json(v: &Value) -> Result<Representation> {
        let quiver = Quiver::from_json(v.get("quiver").ok_or_else(|| Error::Parse("missing \"quiver\"".into()))?)?;
        let mut maps = HashMap::new();
        if let Some(m) = v.get("maps") {
            let m = m.as_object().ok_or_else(|| Error::Parse("\"maps\" must be an object".into()))?;
            for (k, x) in m {
                maps.insert(k.clone(), matrix_from_json(x)?);
            }
        }
        let field = match v.get("field").and_then(Value::as_str) {
            Some(s) => Field::parse(s)?,
            None => maps.values().next().map_or(Field::Rational, |m| m.field().clone()),
        };
        let dims_v = v
            .get("dims")
            .and_then(Value::as_object)
            .ok_or_else(|| Error::Parse("\"dims\" must be an object".into()))?;
        let mut dims = HashMap::new();
        for (k, x) in dims_v {
            let d = x.as_u64().ok_or_else(|| Error::Parse(format!("dimension of {k} must be a nonnegative integer")))?;
            dims.insert(k.clone(), d as usize);
        }
        Representation::from_named(quiver, field, &dims, &maps)
    }
}

/// One residual matrix per relation; all zero iff the relations hold.
pub fn check_relations(rep: &Representation, rels: &[Relation]) -> Result<Vec<Matrix>> {
    let f = rep.field();
    let mut out = Vec::new();
    for r in rels {
        r.validate(rep.quiver())?;
        let mut acc = Matrix::zeros(f, rep.dim(&r.end)?, rep.dim(&r.start)?);
        for (c, path) in &r.terms {
            let c = f.from_rational(c)?;
            let term = rep.eval_path(&r.start, path)?.scale(&c);
            acc = acc.try_add(&term).map_err(|e| Error::PathError(e.to_string()))?;
        }
        out.push(acc);
    }
    Ok(out)
}

/// `Σ θ_i v_i / Σ v_i`.
pub fn slope(theta: &[BigRational], dims: &[usize]) -> Result<BigRational> {
    if theta.len() != dims.len() {
        return Err(Error::ShapeError("θ and dimension vector differ in length".into()));
    }
    let total: usize = dims.iter().sum();
    if total == 0 {
        return Err(Error::ZeroDim);
    }
    let num: BigRational = theta.iter().zip(dims).map(|(t, &d)| t * BigRational::from_integer(d.into())).sum();
    Ok(num / BigRational::from_integer(total.into()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    Stable,
    SemistableOnly,
    Unstable,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Stable => "stable",
            Verdict::SemistableOnly => "semistable_only",
            Verdict::Unstable => "unstable",
        }
    }

    pub fn is_semistable(&self) -> bool {
        *self != Verdict::Unstable
    }
}

#[derive(Clone, Debug)]
pub struct StabilityReport {
    pub verdict: Verdict,
    /// Subrepresentation violating (or, for `SemistableOnly`, attaining) the
    /// slope bound, as one subspace per vertex.
    pub witness: Option<Vec<(String, Subspace)>>,
    pub reason: Option<String>,
    pub method: &'static str,
}

impl StabilityReport {
    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        m.insert("verdict".into(), json!(self.verdict.as_str()));
        m.insert("method".into(), json!(self.method));
        if let Some(w) = &self.witness {
            let ws: Map<String, Value> =
                w.iter().map(|(v, s)| (v.clone(), matrix_to_json(s.basis_rows()))).collect();
            m.insert("witness".into(), Value::Object(ws));
        }
        if let Some(r) = &self.reason {
            m.insert("reason".into(), json!(r));
        }
        Value::Object(m)
    }
}

/// Framing vertices for a GF representation: by default those labelled `i'`.
pub fn default_framing(q: &Quiver) -> Vec<String> {
    q.vertices().iter().filter(|v| v.ends_with('\'')).cloned().collect()
}

/// Crawley-Boevey translation: framing vertices collapse to `inf` (dimension
/// 1); an arrow into a framing space splits into the rows of its matrix, an
/// arrow out of it into the columns.
pub fn translate_cb(rep: &Representation, framing: &[String]) -> Result<Representation> {
    let q = rep.quiver();
    let mut w = BTreeMap::new();
    for v in framing {
        w.insert(v.clone(), rep.dim(v)?);
    }
    let cb = q.crawley_boevey(&w)?;
    let f = rep.field();
    let mut maps = Vec::new();
    for (a, m) in q.arrows().iter().zip(rep.maps()) {
        match (w.contains_key(&a.src), w.contains_key(&a.tgt)) {
            (false, false) => maps.push(m.clone()),
            (false, true) => {
                for l in 0..m.rows() {
                    maps.push(m.submatrix(l, 0, 1, m.cols()));
                }
            }
            (true, false) => {
                for l in 0..m.cols() {
                    maps.push(m.submatrix(0, l, m.rows(), 1));
                }
            }
            (true, true) => unreachable!("rejected by crawley_boevey"),
        }
    }
    let mut dims: Vec<usize> = q
        .vertices()
        .iter()
        .zip(rep.dims())
        .filter(|(v, _)| !w.contains_key(*v))
        .map(|(_, &d)| d)
        .collect();
    dims.push(1);
    Representation::new(cb, f.clone(), dims, maps)
}

/// Inverse of [`translate_cb`]: stacks rows and columns back into the maps of
/// the GF quiver `gf` with framing dimensions `w`.
pub fn reassemble_cb(cb: &Representation, gf: &Quiver, w: &BTreeMap<String, usize>) -> Result<Representation> {
    let f = cb.field();
    let mut dims = Vec::new();
    for v in gf.vertices() {
        dims.push(match w.get(v) {
            Some(&d) => d,
            None => cb.dim(v)?,
        });
    }
    let mut maps = Vec::new();
    for a in gf.arrows() {
        let pieces = |n: usize| -> Result<Vec<&Matrix>> {
            (1..=n).map(|l| cb.map(&format!("{}#{l}", a.label))).collect()
        };
        maps.push(match (w.get(&a.src), w.get(&a.tgt)) {
            (None, None) => cb.map(&a.label)?.clone(),
            (None, Some(&n)) => {
                if n == 0 {
                    Matrix::zeros(f, 0, cb.dim(&a.src)?)
                } else {
                    Matrix::vstack(&pieces(n)?)?
                }
            }
            (Some(&n), None) => {
                if n == 0 {
                    Matrix::zeros(f, cb.dim(&a.tgt)?, 0)
                } else {
                    Matrix::hstack(&pieces(n)?)?
                }
            }
            (Some(_), Some(_)) => return Err(Error::PathError(format!("arrow {} joins framing vertices", a.label))),
        });
    }
    Representation::new(gf.clone(), f.clone(), dims, maps)
}

/// Scales rational weights to a common denominator.
fn integer_weights(theta: &[BigRational]) -> Result<Vec<i128>> {
    let lcm = theta.iter().fold(num::BigInt::one(), |acc, t| acc.lcm(t.denom()));
    theta
        .iter()
        .map(|t| {
            (t.numer() * (&lcm / t.denom()))
                .to_i128()
                .ok_or_else(|| Error::TooLarge("stability weights exceed i128".into()))
        })
        .collect()
}

/// Exhaustive slope test over all subrepresentations of a representation
/// over a prime field. Semistable iff `μ(S) <= μ(V)` for every proper
/// nontrivial subrepresentation `S`, stable iff always strict.
pub fn brute_force_semistable(rep: &Representation, theta: &[BigRational]) -> Result<StabilityReport> {
    let Field::Prime(p) = rep.field() else {
        return Err(Error::NeedsFiniteField);
    };
    let p = *p as u32;
    let q = rep.quiver();
    let nv = q.vertices().len();
    if theta.len() != nv {
        return Err(Error::ShapeError(format!("θ needs {nv} entries")));
    }
    let dims = rep.dims();
    let mut count: u128 = 1;
    for &d in dims {
        let per: u128 = (0..=d).map(|k| gaussian_binomial(p as u64, d, k)).sum();
        count = count.saturating_mul(per);
        if count > ENUMERATION_BUDGET {
            return Err(Error::TooLarge(format!("more than {ENUMERATION_BUDGET} graded subspaces")));
        }
    }
    let weights = integer_weights(theta)?;
    let total_dim: i128 = dims.iter().map(|&d| d as i128).sum();
    let total_weight: i128 = weights.iter().zip(dims).map(|(w, &d)| w * d as i128).sum();

    let candidates: Vec<Vec<(FpMat, Vec<usize>)>> = dims
        .iter()
        .map(|&d| {
            (0..=d)
                .flat_map(|k| subspaces(p, d, k))
                .map(|s| {
                    let piv = (0..s.rows).map(|i| (0..s.cols).find(|&j| s.get(i, j) != 0).unwrap()).collect();
                    (s, piv)
                })
                .collect()
        })
        .collect();
    let maps: Vec<FpMat> = rep.maps().iter().map(FpMat::from_matrix).collect::<Result<_>>()?;
    let ends: Vec<(usize, usize)> = q
        .arrows()
        .iter()
        .map(|a| (q.vertex_index(&a.src).unwrap(), q.vertex_index(&a.tgt).unwrap()))
        .collect();
    // Arrows to check once vertex `k` is chosen: both ends among `0..=k`.
    let checks: Vec<Vec<usize>> =
        (0..nv).map(|k| (0..ends.len()).filter(|&a| ends[a].0.max(ends[a].1) == k).collect()).collect();

    struct Search<'a> {
        candidates: &'a [Vec<(FpMat, Vec<usize>)>],
        maps: &'a [FpMat],
        ends: &'a [(usize, usize)],
        checks: &'a [Vec<usize>],
        dims: &'a [usize],
        weights: &'a [i128],
        total_dim: i128,
        total_weight: i128,
        choice: Vec<usize>,
        equal: Option<Vec<usize>>,
    }

    impl Search<'_> {
        fn closed(&self, arrow: usize) -> bool {
            let (s, t) = self.ends[arrow];
            let (src, _) = &self.candidates[s][self.choice[s]];
            let (tgt, tpiv) = &self.candidates[t][self.choice[t]];
            let m = &self.maps[arrow];
            for r in 0..src.rows {
                let v: Vec<u32> = (0..m.rows)
                    .map(|i| {
                        let acc: u64 = (0..m.cols).map(|j| m.get(i, j) as u64 * src.get(r, j) as u64).sum();
                        (acc % m.p as u64) as u32
                    })
                    .collect();
                if !in_span(tgt, tpiv, &v) {
                    return false;
                }
            }
            true
        }

        /// Returns the first strictly destabilizing choice.
        fn run(&mut self, k: usize) -> Option<Vec<usize>> {
            if k == self.dims.len() {
                let sub: Vec<i128> =
                    (0..k).map(|i| self.candidates[i][self.choice[i]].0.rows as i128).collect();
                let sd: i128 = sub.iter().sum();
                if sd == 0 || sd == self.total_dim {
                    return None;
                }
                let sw: i128 = sub.iter().zip(self.weights).map(|(a, b)| a * b).sum();
                let lhs = sw * self.total_dim;
                let rhs = self.total_weight * sd;
                if lhs > rhs {
                    return Some(self.choice.clone());
                }
                if lhs == rhs && self.equal.is_none() {
                    self.equal = Some(self.choice.clone());
                }
                return None;
            }
            for c in 0..self.candidates[k].len() {
                self.choice[k] = c;
                if self.checks[k].iter().all(|&a| self.closed(a)) {
                    if let Some(w) = self.run(k + 1) {
                        return Some(w);
                    }
                }
            }
            None
        }
    }

    let mut search = Search {
        candidates: &candidates,
        maps: &maps,
        ends: &ends,
        checks: &checks,
        dims,
        weights: &weights,
        total_dim,
        total_weight,
        choice: vec![0; nv],
        equal: None,
    };
    let bad = search.run(0);
    let to_witness = |choice: &[usize]| -> Vec<(String, Subspace)> {
        q.vertices()
            .iter()
            .enumerate()
            .map(|(i, v)| (v.clone(), Subspace::row_span(&candidates[i][choice[i]].0.to_matrix())))
            .collect()
    };
    Ok(match (bad, search.equal) {
        (Some(c), _) => StabilityReport {
            verdict: Verdict::Unstable,
            witness: Some(to_witness(&c)),
            reason: Some("subrepresentation of larger slope".into()),
            method: "brute_force",
        },
        (None, Some(c)) => StabilityReport {
            verdict: Verdict::SemistableOnly,
            witness: Some(to_witness(&c)),
            reason: Some("subrepresentation of equal slope".into()),
            method: "brute_force",
        },
        (None, None) => StabilityReport { verdict: Verdict::Stable, witness: None, reason: None, method: "brute_force" },
    })
}

/// `θ̂` on the Crawley-Boevey quiver: `θ` on the original vertices and
/// `-θ.v` at `inf`.
pub fn extended_theta(theta: &[BigRational], v: &[usize]) -> Vec<BigRational> {
    let mut out = theta.to_vec();
    let s: BigRational = theta.iter().zip(v).map(|(t, &d)| t * BigRational::from_integer(d.into())).sum();
    out.push(-s);
    out
}

fn check_theta(rep: &Representation, framing: &[String], theta: &[BigRational]) -> Result<Vec<usize>> {
    let unframed: Vec<usize> = rep
        .quiver()
        .vertices()
        .iter()
        .zip(rep.dims())
        .filter(|(v, _)| !framing.contains(v))
        .map(|(_, &d)| d)
        .collect();
    if theta.len() != unframed.len() {
        return Err(Error::ShapeError(format!("θ needs {} entries (non-framing vertices)", unframed.len())));
    }
    for v in framing {
        rep.quiver().vertex_index(v)?;
    }
    Ok(unframed)
}

/// Framed stability through the Crawley-Boevey translation, by enumeration.
pub fn brute_force_framed(rep: &Representation, framing: &[String], theta: &[BigRational]) -> Result<StabilityReport> {
    let v = check_theta(rep, framing, theta)?;
    let cb = translate_cb(rep, framing)?;
    brute_force_semistable(&cb, &extended_theta(theta, &v))
}

/// Framed stability verdict. Uses a structural criterion when one is known
/// for the quiver family (plane ADHM data, flag quivers with `θ⁺`), and
/// exhaustive enumeration over prime fields otherwise.
pub fn is_semistable_framed(rep: &Representation, framing: &[String], theta: &[BigRational]) -> Result<StabilityReport> {
    let v = check_theta(rep, framing, theta)?;
    if v.iter().all(|&d| d == 0) {
        return Ok(StabilityReport { verdict: Verdict::Stable, witness: None, reason: None, method: "vacuous" });
    }
    if let Some(r) = crate::adhm_p2::structural_stability(rep, framing, theta)? {
        return Ok(r);
    }
    if let Some(r) = crate::flag::structural_stability(rep, framing, theta)? {
        return Ok(r);
    }
    brute_force_framed(rep, framing, theta)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn slope_examples() {
        assert_eq!(slope(&[rat(1), rat(1)], &[2, 3]).unwrap(), rat(1));
        assert_eq!(slope(&[rat(1), rat(0)], &[1, 1]).unwrap(), BigRational::new(1.into(), 2.into()));
        assert_eq!(slope(&[rat(-1)], &[4]).unwrap(), rat(-1));
        assert_eq!(slope(&[rat(1)], &[0]), Err(Error::ZeroDim));
    }

    #[test]
    fn single_vertex_is_semistable() {
        let f = Field::prime(2).unwrap();
        let rep = Representation::new(Quiver::a_type(1), f, vec![1], vec![]).unwrap();
        let r = brute_force_semistable(&rep, &[rat(1)]).unwrap();
        assert_eq!(r.verdict, Verdict::Stable);
    }

    #[test]
    fn translate_round_trip() {
        let f = Field::prime(5).unwrap();
        let q = Quiver::a_type(1).gf(&BTreeMap::new(), &[("0".to_string(), 1)].into()).unwrap();
        let e = Matrix::from_ints(&f, &[vec![1, 2, 3], vec![4, 0, 1]]);
        let b = Matrix::from_ints(&f, &[vec![0, 1], vec![2, 2], vec![3, 0]]);
        let rep = Representation::new(q.clone(), f, vec![3, 2], vec![e.clone(), b]).unwrap();
        let cb = translate_cb(&rep, &["0'".to_string()]).unwrap();
        assert_eq!(cb.map("a_1@0#2").unwrap(), &e.submatrix(1, 0, 1, 3));
        let back = reassemble_cb(&cb, &q, &[("0'".to_string(), 2)].into()).unwrap();
        assert_eq!(back, rep);
    }
}
