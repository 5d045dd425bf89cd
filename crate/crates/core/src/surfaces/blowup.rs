use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exactmat::json::{matrices_from_json, matrix_from_json, matrix_to_json};
use crate::exactmat::{Elem, Field, Matrix};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlowupDims {
    pub k: usize,
    pub l: usize,
    /// `k - a_s`
    pub ks: Vec<usize>,
    /// Always `k`.
    pub ls: Vec<usize>,
    sum_a: i64,
}

impl BlowupDims {
    /// `2(n+1)k - 2Σa + r`
    pub fn dim_w(&self, r: usize) -> i64 {
        2 * (self.ks.len() as i64 + 1) * self.k as i64 - 2 * self.sum_a + r as i64
    }
}

pub fn dims_kl(a: &[i64], c: i64) -> Result<BlowupDims> {
    let k = c + a.iter().map(|x| x * (x + 1) / 2).sum::<i64>();
    let l = c + a.iter().map(|x| x * (x - 1) / 2).sum::<i64>();
    if k < 0 || l < 0 {
        return Err(Error::InvalidInvariants(format!("k = {k}, l = {l}")));
    }
    let mut ks = Vec::with_capacity(a.len());
    for (s, &x) in a.iter().enumerate() {
        if k - x < 0 {
            return Err(Error::InvalidInvariants(format!("K_{} = k - a_{} = {} < 0", s + 1, s + 1, k - x)));
        }
        ks.push((k - x) as usize);
    }
    Ok(BlowupDims {
        k: k as usize,
        l: l as usize,
        ls: vec![k as usize; a.len()],
        ks,
        sum_a: a.iter().sum(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlowupDatum {
    pub r: usize,
    pub a: Vec<i64>,
    pub c: i64,
    /// `(p_s⁰, p_s¹)`
    pub points: Vec<(Elem, Elem)>,
    pub big_a: Matrix,
    pub c0: Matrix,
    pub c1: Matrix,
    pub b: Vec<Matrix>,
    pub bp: Vec<Matrix>,
    pub e: Matrix,
    pub f: Matrix,
}

impl BlowupDatum {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        r: usize,
        a: Vec<i64>,
        c: i64,
        points: Vec<(Elem, Elem)>,
        big_a: Matrix,
        c0: Matrix,
        c1: Matrix,
        b: Vec<Matrix>,
        bp: Vec<Matrix>,
        e: Matrix,
        f: Matrix,
    ) -> Result<BlowupDatum> {
        if r == 0 {
            return Err(Error::InvalidInvariants("r must be positive".into()));
        }
        let n = a.len();
        let dims = dims_kl(&a, c)?;
        if points.len() != n || b.len() != n || bp.len() != n {
            return Err(Error::ShapeError(format!("expected {n} points, B and B' blocks")));
        }
        for s in 0..n {
            for t in 0..s {
                if points[s] == points[t] {
                    return Err(Error::InvalidInvariants(format!("points {} and {} coincide", t + 1, s + 1)));
                }
            }
        }
        let (k, l) = (dims.k, dims.l);
        let field = big_a.field().clone();
        let mut want: Vec<(String, &Matrix, (usize, usize))> = vec![
            ("A".into(), &big_a, (l, k)),
            ("C0".into(), &c0, (l, k)),
            ("C1".into(), &c1, (l, k)),
            ("e".into(), &e, (r, k)),
            ("f".into(), &f, (l, r)),
        ];
        for s in 0..n {
            want.push((format!("B_{}", s + 1), &b[s], (k, dims.ks[s])));
            want.push((format!("B'_{}", s + 1), &bp[s], (l, dims.ks[s])));
        }
        for (name, m, shape) in want {
            if m.shape() != shape {
                return Err(Error::ShapeError(format!("{name} is {:?}, expected {:?}", m.shape(), shape)));
            }
            if *m.field() != field {
                return Err(Error::FieldMismatch(format!("{name} over {}", m.field())));
            }
        }
        for (p0, p1) in &points {
            if !field.contains(p0) || !field.contains(p1) {
                return Err(Error::FieldMismatch("point coordinate outside the field".into()));
            }
        }
        Ok(BlowupDatum { r, a, c, points, big_a, c0, c1, b, bp, e, f })
    }

    pub fn field(&self) -> &Field {
        self.big_a.field()
    }

    pub fn n(&self) -> usize {
        self.a.len()
    }

    pub fn dims(&self) -> BlowupDims {
        dims_kl(&self.a, self.c).expect("validated on construction")
    }

    fn point(&self, s: usize, j: usize) -> &Elem {
        if j == 0 {
            &self.points[s].0
        } else {
            &self.points[s].1
        }
    }

    pub fn to_json(&self) -> Value {
        let f = self.field();
        json!({
            "r": self.r,
            "a": self.a,
            "c": self.c,
            "points": self.points.iter().map(|(x, y)| json!([f.format(x), f.format(y)])).collect::<Vec<_>>(),
            "A": matrix_to_json(&self.big_a),
            "C0": matrix_to_json(&self.c0),
            "C1": matrix_to_json(&self.c1),
            "B": self.b.iter().map(matrix_to_json).collect::<Vec<_>>(),
            "Bp": self.bp.iter().map(matrix_to_json).collect::<Vec<_>>(),
            "e": matrix_to_json(&self.e),
            "f": matrix_to_json(&self.f),
        })
    }

    pub fn from_json(v: &Value) -> Result<BlowupDatum> {
        let get = |k: &str| v.get(k).ok_or_else(|| Error::Parse(format!("missing \"{k}\"")));
        let r = get("r")?.as_u64().ok_or_else(|| Error::Parse("\"r\" must be a nonnegative integer".into()))? as usize;
        let c = get("c")?.as_i64().ok_or_else(|| Error::Parse("\"c\" must be an integer".into()))?;
        let a = get("a")?
            .as_array()
            .ok_or_else(|| Error::Parse("\"a\" must be an array".into()))?
            .iter()
            .map(|x| x.as_i64().ok_or_else(|| Error::Parse("\"a\" entries must be integers".into())))
            .collect::<Result<Vec<_>>>()?;
        let big_a = matrix_from_json(get("A")?)?;
        let field = big_a.field().clone();
        let elem = |x: &Value| match x {
            Value::String(s) => field.parse_elem(s),
            Value::Number(n) => n
                .as_i64()
                .map(|i| field.from_i64(i))
                .ok_or_else(|| Error::Parse(format!("non-integer coordinate {n}"))),
            other => Err(Error::Parse(format!("bad point coordinate {other}"))),
        };
        let points = get("points")?
            .as_array()
            .ok_or_else(|| Error::Parse("\"points\" must be an array".into()))?
            .iter()
            .map(|p| match p.as_array().map(Vec::as_slice) {
                Some([x, y]) => Ok((elem(x)?, elem(y)?)),
                _ => Err(Error::Parse("each point must be a pair".into())),
            })
            .collect::<Result<Vec<_>>>()?;
        BlowupDatum::new(
            r,
            a,
            c,
            points,
            big_a,
            matrix_from_json(get("C0")?)?,
            matrix_from_json(get("C1")?)?,
            matrices_from_json(get("B")?)?,
            matrices_from_json(get("Bp")?)?,
            matrix_from_json(get("e")?)?,
            matrix_from_json(get("f")?)?,
        )
    }
}

/// `(M, Q0, Q1)`, all `(l+nk) x (l+nk)`.
pub fn blowup_assemble(d: &BlowupDatum) -> (Matrix, Matrix, Matrix) {
    let dims = d.dims();
    let field = d.field();
    let n = d.n();
    let mut row_sizes = vec![dims.l];
    row_sizes.extend(&dims.ls);
    let mut col_sizes = vec![dims.k];
    col_sizes.extend(&dims.ks);
    let id = Matrix::identity(field, dims.k);

    let m = {
        let mut blocks: Vec<Vec<Option<&Matrix>>> = vec![vec![None; n + 1]; n + 1];
        blocks[0][0] = Some(&d.big_a);
        for s in 0..n {
            blocks[0][s + 1] = Some(&d.bp[s]);
            blocks[s + 1][0] = Some(&id);
            blocks[s + 1][s + 1] = Some(&d.b[s]);
        }
        Matrix::block(field, &row_sizes, &col_sizes, &blocks).expect("shapes validated")
    };
    let q = |j: usize| {
        let cj = if j == 0 { &d.c0 } else { &d.c1 };
        let neg_c = -cj;
        let scaled: Vec<(Matrix, Matrix, Matrix)> = (0..n)
            .map(|s| {
                let p = d.point(s, j);
                (d.bp[s].scale(p), id.scale(p), d.b[s].scale(p))
            })
            .collect();
        let mut blocks: Vec<Vec<Option<&Matrix>>> = vec![vec![None; n + 1]; n + 1];
        blocks[0][0] = Some(&neg_c);
        for (s, (bp, one, b)) in scaled.iter().enumerate() {
            blocks[0][s + 1] = Some(bp);
            blocks[s + 1][0] = Some(one);
            blocks[s + 1][s + 1] = Some(b);
        }
        Matrix::block(field, &row_sizes, &col_sizes, &blocks).expect("shapes validated")
    };
    (m.clone(), q(0), q(1))
}

/// `[Q0 M⁻¹ Q1 - Q1 M⁻¹ Q0]` restricted to its top-left `l x k` block, plus `f e`.
pub fn blowup_residual(d: &BlowupDatum) -> Result<Matrix> {
    let (m, q0, q1) = blowup_assemble(d);
    let mi = m.inverse().ok_or(Error::NotInChart)?;
    let full = &(&(&q0 * &mi) * &q1) - &(&(&q1 * &mi) * &q0);
    let dims = d.dims();
    Ok(&full.submatrix(0, 0, dims.l, dims.k) + &(&d.f * &d.e))
}

/// `h = diag(h0, h_1..h_n)`; `g` has top row `(g0, g_1..g_n)` and `h0⁻¹`
/// repeated down the rest of its diagonal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlowupGroupElement {
    pub h: Vec<Matrix>,
    pub g: Vec<Matrix>,
}

impl BlowupGroupElement {
    pub fn identity(d: &BlowupDatum) -> BlowupGroupElement {
        let dims = d.dims();
        let f = d.field();
        let mut h = vec![Matrix::identity(f, dims.k)];
        h.extend(dims.ks.iter().map(|&x| Matrix::identity(f, x)));
        let mut g = vec![Matrix::identity(f, dims.l)];
        g.extend((0..d.n()).map(|_| Matrix::zeros(f, dims.l, dims.k)));
        BlowupGroupElement { h, g }
    }

    fn check(&self, d: &BlowupDatum) -> Result<()> {
        let dims = d.dims();
        let n = d.n();
        if self.h.len() != n + 1 || self.g.len() != n + 1 {
            return Err(Error::GroupShapeError(format!("need {} h-blocks and {} g-blocks", n + 1, n + 1)));
        }
        let shape_err = |what: String| Err(Error::GroupShapeError(what));
        if self.h[0].shape() != (dims.k, dims.k) {
            return shape_err(format!("h0 is {:?}, expected {k}x{k}", self.h[0].shape(), k = dims.k));
        }
        if self.g[0].shape() != (dims.l, dims.l) {
            return shape_err(format!("g0 is {:?}, expected {l}x{l}", self.g[0].shape(), l = dims.l));
        }
        for s in 0..n {
            if self.h[s + 1].shape() != (dims.ks[s], dims.ks[s]) {
                return shape_err(format!("h_{} is {:?}", s + 1, self.h[s + 1].shape()));
            }
            if self.g[s + 1].shape() != (dims.l, dims.k) {
                return shape_err(format!("g_{} is {:?}", s + 1, self.g[s + 1].shape()));
            }
        }
        if self.h.iter().chain(&self.g).any(|m| m.field() != d.field()) {
            return Err(Error::FieldMismatch("group element over a different field".into()));
        }
        Ok(())
    }

    /// The full `g` and `h` as `(l+nk)`-square matrices.
    pub fn assemble(&self, d: &BlowupDatum) -> Result<(Matrix, Matrix)> {
        self.check(d)?;
        let dims = d.dims();
        let n = d.n();
        let h0i = self.h[0].inverse().ok_or(Error::SingularGroupElement)?;
        let mut rows = vec![dims.l];
        rows.extend(&dims.ls);
        let mut cols = vec![dims.k];
        cols.extend(&dims.ks);
        let mut gb: Vec<Vec<Option<&Matrix>>> = vec![vec![None; n + 1]; n + 1];
        let mut hb: Vec<Vec<Option<&Matrix>>> = vec![vec![None; n + 1]; n + 1];
        for s in 0..=n {
            gb[0][s] = Some(&self.g[s]);
            hb[s][s] = Some(&self.h[s]);
            if s > 0 {
                gb[s][s] = Some(&h0i);
            }
        }
        Ok((Matrix::block(d.field(), &rows, &rows, &gb)?, Matrix::block(d.field(), &cols, &cols, &hb)?))
    }
}

/// Applies `M → gMh`, `Q_j → gQ_jh`, `e → eh0`, `f → g0 f` and reads the
/// primitive blocks back out of the transformed matrices.
pub fn blowup_group_action(elem: &BlowupGroupElement, d: &BlowupDatum) -> Result<BlowupDatum> {
    let (g, h) = elem.assemble(d)?;
    if !g.is_invertible() || elem.h.iter().any(|m| !m.is_invertible()) {
        return Err(Error::SingularGroupElement);
    }
    let (m, q0, q1) = blowup_assemble(d);
    let (m2, q0n, q1n) = (&(&g * &m) * &h, &(&g * &q0) * &h, &(&g * &q1) * &h);
    let dims = d.dims();
    let (k, l, n) = (dims.k, dims.l, d.n());

    let col_off = |s: usize| k + dims.ks[..s].iter().sum::<usize>();
    let row_off = |s: usize| l + s * k;

    let big_a = m2.submatrix(0, 0, l, k);
    let mut b = Vec::with_capacity(n);
    let mut bp = Vec::with_capacity(n);
    for s in 0..n {
        let ks = dims.ks[s];
        bp.push(m2.submatrix(0, col_off(s), l, ks));
        b.push(m2.submatrix(row_off(s), col_off(s), k, ks));
    }
    let c0 = -&q0n.submatrix(0, 0, l, k);
    let c1 = -&q1n.submatrix(0, 0, l, k);
    let out = BlowupDatum::new(
        d.r,
        d.a.clone(),
        d.c,
        d.points.clone(),
        big_a,
        c0,
        c1,
        b,
        bp,
        &d.e * &elem.h[0],
        &elem.g[0] * &d.f,
    )?;
    let (m3, q03, q13) = blowup_assemble(&out);
    if m3 != m2 || q03 != q0n || q13 != q1n {
        return Err(Error::GroupShapeError("transformed matrices lost the block structure".into()));
    }
    Ok(out)
}
