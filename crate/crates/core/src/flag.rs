//! Flag quivers `Q_{d,n}`, their relations, `θ⁺`-stability, flag extraction
//! and the symplectic form at `d = 1`.

use num::{BigRational, Signed};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exactmat::json::{matrices_from_json, matrix_from_json, matrix_to_json};
use crate::exactmat::{Field, Matrix, Scalar, Subspace};
use crate::minimal::MinimalPoint;
use crate::quiver::{Arrow, Quiver, Relation};
use crate::repstab::{check_relations, Representation, StabilityReport, Verdict};

fn one() -> BigRational {
    BigRational::from_integer(1.into())
}

fn path(xs: &[String]) -> Vec<String> {
    xs.to_vec()
}

/// `Q_{d,n}` and the generators of `J_{d,n}`.
///
/// Vertices `0'`, `0..d-1`; arrows `j: 0 -> 0'`, `i_q: 0' -> 0`,
/// `a_p: p -> p-1`, `b_p_q: p-1 -> p`.
pub fn build_flag_algebra(d: usize, n: usize) -> Result<(Quiver, Vec<Relation>)> {
    if d == 0 || n == 0 {
        return Err(Error::ShapeError("d and n must be positive".into()));
    }
    let mut vertices = vec!["0'".to_string()];
    vertices.extend((0..d).map(|p| p.to_string()));
    let mut arrows = vec![Arrow::new("j", "0", "0'")];
    for q in 1..n {
        arrows.push(Arrow::new(&format!("i_{q}"), "0'", "0"));
    }
    for p in 1..d {
        arrows.push(Arrow::new(&format!("a_{p}"), &p.to_string(), &(p - 1).to_string()));
        for q in 1..n {
            arrows.push(Arrow::new(&format!("b_{p}_{q}"), &(p - 1).to_string(), &p.to_string()));
        }
    }
    let quiver = Quiver::new(vertices, arrows)?;
    let mut rels = Vec::new();
    for q in 1..n {
        let iq = format!("i_{q}");
        let mut terms = vec![(one(), path(&[iq, "j".into()]))];
        if d >= 2 {
            terms.insert(0, (one(), path(&["a_1".into(), format!("b_1_{q}")])));
        }
        rels.push(Relation { start: "0".into(), end: "0".into(), terms });
        for p in 1..d.saturating_sub(1) {
            let at = p.to_string();
            rels.push(Relation {
                start: at.clone(),
                end: at,
                terms: vec![
                    (one(), path(&[format!("a_{}", p + 1), format!("b_{}_{q}", p + 1)])),
                    (-one(), path(&[format!("b_{p}_{q}"), format!("a_{p}")])),
                ],
            });
        }
        if d >= 2 {
            let at = (d - 1).to_string();
            rels.push(Relation {
                start: at.clone(),
                end: at,
                terms: vec![(one(), path(&[format!("b_{}_{q}", d - 1), format!("a_{}", d - 1)]))],
            });
        }
    }
    Ok((quiver, rels))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlagRep {
    pub d: usize,
    pub n: usize,
    pub u: usize,
    pub v: Vec<usize>,
    /// `u x v_0`
    pub e: Matrix,
    /// `f[q-1]`: `v_0 x u`
    pub f: Vec<Matrix>,
    /// `a[p-1]`: `v_{p-1} x v_p`
    pub a: Vec<Matrix>,
    /// `b[p-1][q-1]`: `v_p x v_{p-1}`
    pub b: Vec<Vec<Matrix>>,
}

impl FlagRep {
    pub fn new(
        d: usize,
        n: usize,
        u: usize,
        v: Vec<usize>,
        e: Matrix,
        f: Vec<Matrix>,
        a: Vec<Matrix>,
        b: Vec<Vec<Matrix>>,
    ) -> Result<FlagRep> {
        if d == 0 || n == 0 || u == 0 || v.len() != d {
            return Err(Error::ShapeError("need d, n, u > 0 and d dimensions".into()));
        }
        let mut prev = u;
        for &x in &v {
            if x == 0 || x >= prev {
                return Err(Error::ShapeError(format!("dimensions {u} > {v:?} > 0 must strictly decrease")));
            }
            prev = x;
        }
        let field = e.field().clone();
        let check = |name: String, m: &Matrix, shape: (usize, usize)| -> Result<()> {
            if m.shape() != shape {
                return Err(Error::ShapeError(format!("{name} is {:?}, expected {:?}", m.shape(), shape)));
            }
            if *m.field() != field {
                return Err(Error::FieldMismatch(format!("{name} over {}", m.field())));
            }
            Ok(())
        };
        check("e".into(), &e, (u, v[0]))?;
        if f.len() != n - 1 || a.len() != d - 1 || b.len() != d - 1 || b.iter().any(|x| x.len() != n - 1) {
            return Err(Error::ShapeError("wrong number of f, A or B blocks".into()));
        }
        for (q, m) in f.iter().enumerate() {
            check(format!("f_{}", q + 1), m, (v[0], u))?;
        }
        for p in 1..d {
            check(format!("A_{p}"), &a[p - 1], (v[p - 1], v[p]))?;
            for (q, m) in b[p - 1].iter().enumerate() {
                check(format!("B_{p}{}", q + 1), m, (v[p], v[p - 1]))?;
            }
        }
        Ok(FlagRep { d, n, u, v, e, f, a, b })
    }

    pub fn field(&self) -> &Field {
        self.e.field()
    }

    pub fn to_representation(&self) -> Representation {
        let (quiver, _) = build_flag_algebra(self.d, self.n).unwrap();
        let mut dims = vec![self.u];
        dims.extend(&self.v);
        let mut maps = vec![self.e.clone()];
        maps.extend(self.f.iter().cloned());
        for p in 1..self.d {
            maps.push(self.a[p - 1].clone());
            maps.extend(self.b[p - 1].iter().cloned());
        }
        Representation::new(quiver, self.field().clone(), dims, maps).unwrap()
    }

    pub fn from_representation(rep: &Representation, d: usize, n: usize) -> Result<FlagRep> {
        let (quiver, _) = build_flag_algebra(d, n)?;
        if rep.quiver() != &quiver {
            return Err(Error::PathError(format!("not a Q_{{{d},{n}}} representation")));
        }
        let v = (0..d).map(|p| rep.dim(&p.to_string())).collect::<Result<Vec<_>>>()?;
        let f = (1..n).map(|q| rep.map(&format!("i_{q}")).cloned()).collect::<Result<Vec<_>>>()?;
        let a = (1..d).map(|p| rep.map(&format!("a_{p}")).cloned()).collect::<Result<Vec<_>>>()?;
        let b = (1..d)
            .map(|p| (1..n).map(|q| rep.map(&format!("b_{p}_{q}")).cloned()).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        FlagRep::new(d, n, rep.dim("0'")?, v, rep.map("j")?.clone(), f, a, b)
    }

    /// `A_1 B_1q + f_q e`, `A_{p+1} B_{p+1,q} - B_pq A_p`, `B_{d-1,q} A_{d-1}`.
    pub fn check_flag_relations(&self) -> Vec<Matrix> {
        let (_, rels) = build_flag_algebra(self.d, self.n).unwrap();
        check_relations(&self.to_representation(), &rels).unwrap()
    }

    pub fn relations_hold(&self) -> bool {
        self.check_flag_relations().iter().all(Matrix::is_zero)
    }

    /// `θ⁺`-stability: `e` and every `A_p` injective.
    pub fn stable_thetaplus(&self) -> Result<bool> {
        if !self.relations_hold() {
            return Err(Error::NotARepresentation("flag relations fail".into()));
        }
        Ok(self.injectivity_failure().is_none())
    }

    fn injectivity_failure(&self) -> Option<String> {
        if self.e.rank() < self.e.cols() {
            return Some("e not injective".into());
        }
        (1..self.d).find(|&p| self.a[p - 1].rank() < self.a[p - 1].cols()).map(|p| format!("A_{p} not injective"))
    }

    /// `E_0 = Im e`, `E_p = Im(e A_1 ... A_p)`.
    pub fn extract_flag(&self, require_stable: bool) -> Result<Vec<Subspace>> {
        if require_stable && !self.stable_thetaplus()? {
            return Err(Error::Unstable(self.injectivity_failure().unwrap_or_default()));
        }
        let mut m = self.e.clone();
        let mut out = vec![Subspace::column_span(&m)];
        for p in 1..self.d {
            m = &m * &self.a[p - 1];
            out.push(Subspace::column_span(&m));
        }
        Ok(out)
    }

    /// Change of basis `g_p` on each `V_p`.
    pub fn gl_action(&self, g: &[Matrix]) -> Result<FlagRep> {
        if g.len() != self.d {
            return Err(Error::GroupShapeError("one matrix per vertex".into()));
        }
        let gi = g.iter().map(|x| x.inverse().ok_or(Error::SingularGroupElement)).collect::<Result<Vec<_>>>()?;
        let f = self.f.iter().map(|x| &g[0] * x).collect();
        let a = (1..self.d).map(|p| &(&g[p - 1] * &self.a[p - 1]) * &gi[p]).collect();
        let b = (1..self.d)
            .map(|p| self.b[p - 1].iter().map(|x| &(&g[p] * x) * &gi[p - 1]).collect())
            .collect();
        FlagRep::new(self.d, self.n, self.u, self.v.clone(), &self.e * &gi[0], f, a, b)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "d": self.d,
            "n": self.n,
            "u": self.u,
            "v": self.v,
            "e": matrix_to_json(&self.e),
            "f": self.f.iter().map(matrix_to_json).collect::<Vec<_>>(),
            "A": self.a.iter().map(matrix_to_json).collect::<Vec<_>>(),
            "B": self.b.iter().map(|r| r.iter().map(matrix_to_json).collect::<Vec<_>>()).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<FlagRep> {
        let n = |k: &str| {
            v.get(k)
                .and_then(Value::as_u64)
                .map(|x| x as usize)
                .ok_or_else(|| Error::Parse(format!("missing integer \"{k}\"")))
        };
        let dims = v
            .get("v")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("missing \"v\"".into()))?
            .iter()
            .map(|x| x.as_u64().map(|y| y as usize).ok_or_else(|| Error::Parse("bad dimension".into())))
            .collect::<Result<Vec<_>>>()?;
        let list = |k: &str| match v.get(k) {
            None => Ok(vec![]),
            Some(x) => matrices_from_json(x),
        };
        let b = match v.get("B") {
            None => vec![],
            Some(x) => x
                .as_array()
                .ok_or_else(|| Error::Parse("\"B\" must be a list of lists".into()))?
                .iter()
                .map(matrices_from_json)
                .collect::<Result<Vec<_>>>()?,
        };
        let e = matrix_from_json(v.get("e").ok_or_else(|| Error::Parse("missing \"e\"".into()))?)?;
        FlagRep::new(n("d")?, n("n")?, n("u")?, dims, e, list("f")?, list("A")?, b)
    }
}

/// Structural path for `repstab`: on `Q_{d,n}` with equal positive weights
/// and the relations satisfied, stability is injectivity of `e` and `A_p`.
pub fn structural_stability(
    rep: &Representation,
    framing: &[String],
    theta: &[BigRational],
) -> Result<Option<StabilityReport>> {
    let q = rep.quiver();
    if framing != ["0'".to_string()] || theta.is_empty() || !theta[0].is_positive() || theta.iter().any(|t| t != &theta[0]) {
        return Ok(None);
    }
    let d = q.vertices().len() - 1;
    let n = q.arrows().iter().filter(|a| a.label.starts_with("i_")).count() + 1;
    let Ok((fq, rels)) = build_flag_algebra(d, n) else {
        return Ok(None);
    };
    if &fq != q || !check_relations(rep, &rels)?.iter().all(Matrix::is_zero) {
        return Ok(None);
    }
    let e = rep.map("j")?;
    let mut failure = (e.rank() < e.cols()).then(|| "e not injective".to_string());
    for p in 1..d {
        let a = rep.map(&format!("a_{p}"))?;
        if failure.is_none() && a.rank() < a.cols() {
            failure = Some(format!("A_{p} not injective"));
        }
    }
    Ok(Some(StabilityReport {
        verdict: if failure.is_some() { Verdict::Unstable } else { Verdict::Stable },
        witness: None,
        reason: failure,
        method: "injectivity",
    }))
}

/// `d = 1` flag representation of a minimal point: `e` = first `a` columns
/// of `θ`, `f_q = [0 | b_q] θ⁻¹`.
pub fn minimal_to_flagrep(pt: &MinimalPoint) -> Result<FlagRep> {
    if pt.a == 0 {
        return Err(Error::EmptyFlag);
    }
    let field = pt.theta.field().clone();
    let (r, a) = (pt.r, pt.a);
    let tinv = pt.theta.inverse().ok_or(Error::SingularGroupElement)?;
    let e = pt.theta.submatrix(0, 0, r, a);
    let f = pt
        .b
        .iter()
        .map(|bq| {
            let padded = Matrix::hstack(&[&Matrix::zeros(&field, a, a), bq]).unwrap();
            &padded * &tinv
        })
        .collect();
    FlagRep::new(1, pt.n, r, vec![a], e, f, vec![], vec![])
}

/// `ω((δe, δf), (δe', δf')) = tr(δf δe') - tr(δf' δe)`.
pub fn symplectic_eval(t1: (&Matrix, &Matrix), t2: (&Matrix, &Matrix)) -> Result<Scalar> {
    let (e1, f1) = t1;
    let (e2, f2) = t2;
    if e1.shape() != e2.shape() || f1.shape() != f2.shape() || f1.shape() != (e1.cols(), e1.rows()) {
        return Err(Error::ShapeError("tangent vectors need δe: u x v0 and δf: v0 x u".into()));
    }
    let a = f1.try_mul(e2)?.trace()?;
    let b = f2.try_mul(e1)?.trace()?;
    a.try_sub(&b)
}

/// Gram matrix of `ω` on the coordinate basis of `(δe, δf)`.
pub fn symplectic_gram(field: &Field, u: usize, v0: usize) -> Matrix {
    let mut basis = Vec::new();
    for i in 0..u {
        for j in 0..v0 {
            basis.push((Matrix::zeros(field, u, v0).with_entry(i, j, field.one()), Matrix::zeros(field, v0, u)));
        }
    }
    for i in 0..v0 {
        for j in 0..u {
            basis.push((Matrix::zeros(field, u, v0), Matrix::zeros(field, v0, u).with_entry(i, j, field.one())));
        }
    }
    let n = basis.len();
    Matrix::from_fn(field, n, n, |x, y| {
        symplectic_eval((&basis[x].0, &basis[x].1), (&basis[y].0, &basis[y].1)).unwrap().value().clone()
    })
}
