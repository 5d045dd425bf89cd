//! The minimal case `c = C_m`: invariants, monad block data, the immersion
//! `j`, the group `G_k`, normal forms and orbit fingerprints.
//!
//! Source coefficient `m` of the monad corresponds to `y2^(n-1-m) y1^m` and
//! target coefficient `m'` to `y2^(n-m') y1^m'`. The upper part of `xi` is
//! `c_0, ..., c_{n-1}` (each `na x r`, split into `n` sub-blocks of `a`
//! rows), followed by `w` (`(r-a) x r`).

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exactmat::json::{matrices_from_json, matrix_from_json, matrix_to_json};
use crate::exactmat::{Field, Matrix, Subspace};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinimalInvariants {
    pub c_m: i64,
    pub nonempty: bool,
    pub k: [i64; 4],
    pub moduli_dim: i64,
}

fn check_nra(n: usize, r: usize, a: usize) -> Result<()> {
    if n == 0 || r == 0 || a >= r {
        return Err(Error::NormalizationError(format!("n={n}, r={r}, a={a}")));
    }
    Ok(())
}

pub fn invariants(n: usize, r: usize, a: usize, c: i64) -> Result<MinimalInvariants> {
    check_nra(n, r, a)?;
    let (n, r, a) = (n as i64, r as i64, a as i64);
    let half = n * a * (a - 1) / 2;
    let k1 = c + half;
    Ok(MinimalInvariants {
        c_m: -half,
        nonempty: k1 >= 0,
        k: [k1, k1 + n * a, k1 + (n - 1) * a, k1 + r - a],
        moduli_dim: 2 * r * c + (r - 1) * n * a * a,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinimalPoint {
    pub n: usize,
    pub r: usize,
    pub a: usize,
    /// `b_1..b_{n-1}`, each `a x (r-a)`.
    pub b: Vec<Matrix>,
    pub theta: Matrix,
}

impl MinimalPoint {
    pub fn new(n: usize, r: usize, a: usize, b: Vec<Matrix>, theta: Matrix) -> Result<MinimalPoint> {
        check_nra(n, r, a)?;
        if b.len() != n - 1 {
            return Err(Error::ShapeError(format!("need {} b-blocks", n - 1)));
        }
        if let Some(x) = b.iter().find(|x| x.shape() != (a, r - a) || x.field() != theta.field()) {
            return Err(Error::ShapeError(format!("b block {:?} over {}, expected {:?}", x.shape(), x.field(), (a, r - a))));
        }
        if theta.shape() != (r, r) {
            return Err(Error::ShapeError("theta must be r x r".into()));
        }
        if !theta.is_invertible() {
            return Err(Error::SingularGroupElement);
        }
        Ok(MinimalPoint { n, r, a, b, theta })
    }

    pub fn field(&self) -> &Field {
        self.theta.field()
    }

    /// Parabolic action `b ↦ A b C⁻¹`, `θ ↦ θ g⁻¹` for `g = [[A, B], [0, C]]`.
    pub fn parabolic_action(&self, g: &Matrix) -> Result<MinimalPoint> {
        let (r, a) = (self.r, self.a);
        if g.shape() != (r, r) || !g.submatrix(a, 0, r - a, a).is_zero() {
            return Err(Error::GroupShapeError("g must be block upper triangular".into()));
        }
        let gi = g.inverse().ok_or(Error::SingularGroupElement)?;
        let big_a = g.submatrix(0, 0, a, a);
        let ci = g.submatrix(a, a, r - a, r - a).inverse().ok_or(Error::SingularGroupElement)?;
        let b = self.b.iter().map(|x| &(&big_a * x) * &ci).collect();
        MinimalPoint::new(self.n, r, a, b, &self.theta * &gi)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "n": self.n,
            "r": self.r,
            "a": self.a,
            "b": self.b.iter().map(matrix_to_json).collect::<Vec<_>>(),
            "theta": matrix_to_json(&self.theta),
        })
    }

    pub fn from_json(v: &Value) -> Result<MinimalPoint> {
        let (n, r, a) = read_nra(v)?;
        let b = match v.get("b") {
            Some(x) => matrices_from_json(x)?,
            None => vec![],
        };
        let theta = matrix_from_json(v.get("theta").ok_or_else(|| Error::Parse("missing \"theta\"".into()))?)?;
        MinimalPoint::new(n, r, a, b, theta)
    }
}

fn read_nra(v: &Value) -> Result<(usize, usize, usize)> {
    let get = |k: &str| {
        v.get(k)
            .and_then(Value::as_u64)
            .map(|x| x as usize)
            .ok_or_else(|| Error::Parse(format!("missing integer \"{k}\"")))
    };
    Ok((get("n")?, get("r")?, get("a")?))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonadPoint {
    pub n: usize,
    pub r: usize,
    pub a: usize,
    pub beta10: Matrix,
    pub beta11: Matrix,
    /// `beta2[q]` for `q = 0..=n+1`; index `n+1` is the `s_∞` coefficient.
    pub beta2: Vec<Matrix>,
    pub xi: Matrix,
}

impl MonadPoint {
    pub fn new(
        n: usize,
        r: usize,
        a: usize,
        beta10: Matrix,
        beta11: Matrix,
        beta2: Vec<Matrix>,
        xi: Matrix,
    ) -> Result<MonadPoint> {
        check_nra(n, r, a)?;
        let rows = (n - 1) * a;
        let field = xi.field().clone();
        let mut shapes = vec![("beta10", &beta10, (rows, n * a)), ("beta11", &beta11, (rows, n * a))];
        if beta2.len() != n + 2 {
            return Err(Error::ShapeError(format!("need {} beta2 blocks", n + 2)));
        }
        for m in &beta2 {
            shapes.push(("beta2", m, (rows, r - a)));
        }
        shapes.push(("xi", &xi, (n * n * a + r - a, r)));
        for (name, m, want) in shapes {
            if m.shape() != want {
                return Err(Error::ShapeError(format!("{name} is {:?}, expected {:?}", m.shape(), want)));
            }
            if *m.field() != field {
                return Err(Error::FieldMismatch(format!("{name} over {}", m.field())));
            }
        }
        Ok(MonadPoint { n, r, a, beta10, beta11, beta2, xi })
    }

    pub fn field(&self) -> &Field {
        self.xi.field()
    }

    /// `c_m`, the `m`-th `na x r` block of `xi`.
    pub fn c_block(&self, m: usize) -> Matrix {
        let na = self.n * self.a;
        self.xi.submatrix(m * na, 0, na, self.r)
    }

    /// The last `r - a` rows of `xi`.
    pub fn w_block(&self) -> Matrix {
        let top = self.n * self.n * self.a;
        self.xi.submatrix(top, 0, self.r - self.a, self.r)
    }

    /// `(Φ, Φ⁺)`: row block `m'` is `β10 c_{m'-1} + β11 c_{m'}`; `Φ` keeps
    /// targets `0..n-1` and sources `0..n-2`.
    pub fn build_phi(&self) -> (Matrix, Matrix) {
        let (n, a) = (self.n, self.a);
        let f = self.field();
        let rb = (n - 1) * a;
        let cb = n * a;
        let zero = f.zero();
        let plus = Matrix::from_fn(f, (n + 1) * rb, n * cb, |i, j| {
            let (mp, src) = (i / rb, j / cb);
            if src + 1 == mp {
                self.beta10.get(i % rb, j % cb).clone()
            } else if src == mp {
                self.beta11.get(i % rb, j % cb).clone()
            } else {
                zero.clone()
            }
        });
        let phi = plus.submatrix(0, 0, n * rb, (n - 1) * cb);
        (phi, plus)
    }

    /// `β2[q]` placed at row block `n - q`, for `q = 0..=n`.
    pub fn b2_stack(&self) -> Matrix {
        let n = self.n;
        let blocks: Vec<&Matrix> = (0..=n).map(|mp| &self.beta2[n - mp]).collect();
        if blocks[0].rows() == 0 {
            return Matrix::zeros(self.field(), 0, self.r - self.a);
        }
        Matrix::vstack(&blocks).unwrap()
    }

    /// `[Φ⁺ | B2stack] · xi`.
    pub fn framing_product(&self) -> Matrix {
        let (_, plus) = self.build_phi();
        let lhs = Matrix::hstack(&[&plus, &self.b2_stack()]).unwrap();
        &lhs * &self.xi
    }

    pub fn check_membership(&self) -> bool {
        self.membership_failure().is_none()
    }

    fn membership_failure(&self) -> Option<&'static str> {
        let (phi, _) = self.build_phi();
        if !phi.is_invertible() {
            return Some("Phi is singular");
        }
        if !self.framing_product().is_zero() {
            return Some("framing condition fails");
        }
        if self.xi.rank() < self.r {
            return Some("xi is not injective");
        }
        None
    }

    pub fn to_json(&self) -> Value {
        json!({
            "n": self.n,
            "r": self.r,
            "a": self.a,
            "beta10": matrix_to_json(&self.beta10),
            "beta11": matrix_to_json(&self.beta11),
            "beta2": self.beta2.iter().map(matrix_to_json).collect::<Vec<_>>(),
            "xi": matrix_to_json(&self.xi),
        })
    }

    pub fn from_json(v: &Value) -> Result<MonadPoint> {
        let (n, r, a) = read_nra(v)?;
        let m = |k: &str| matrix_from_json(v.get(k).ok_or_else(|| Error::Parse(format!("missing \"{k}\"")))?);
        let beta2 = matrices_from_json(v.get("beta2").ok_or_else(|| Error::Parse("missing \"beta2\"".into()))?)?;
        MonadPoint::new(n, r, a, m("beta10")?, m("beta11")?, beta2, m("xi")?)
    }
}

/// The immersion `j`. With `Θ = θ⁻¹`, `c_m` carries `(-1)^m Θ^a` (first `a`
/// rows of `Θ`) in sub-block `m` and `w` is the last `r - a` rows of `Θ`.
pub fn embed_j(pt: &MinimalPoint) -> MonadPoint {
    let (n, r, a) = (pt.n, pt.r, pt.a);
    let f = pt.field().clone();
    let rb = (n - 1) * a;
    let big_theta = pt.theta.inverse().expect("theta is invertible");
    let id = Matrix::identity(&f, rb);
    let z = Matrix::zeros(&f, rb, a);
    let beta10 = Matrix::hstack(&[&id, &z]).unwrap();
    let beta11 = Matrix::hstack(&[&z, &id]).unwrap();
    let mut beta2 = vec![Matrix::zeros(&f, rb, r - a); n + 1];
    beta2.push(if n == 1 {
        Matrix::zeros(&f, 0, r - a)
    } else {
        Matrix::vstack(&pt.b.iter().collect::<Vec<_>>()).unwrap()
    });
    let na = n * a;
    let xi = Matrix::from_fn(&f, n * na + r - a, r, |i, j| {
        if i >= n * na {
            return big_theta.get(a + i - n * na, j).clone();
        }
        let (m, within) = (i / na, i % na);
        if within / a != m {
            return f.zero();
        }
        let v = big_theta.get(within % a, j);
        if m % 2 == 0 {
            v.clone()
        } else {
            f.neg(v)
        }
    });
    MonadPoint::new(n, r, a, beta10, beta11, beta2, xi).unwrap()
}

/// Element `(ψ, χ)` of `G_k`; `psi12[q]` is the coefficient `ψ12,q`,
/// `q = 0..n-1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GkElement {
    pub psi11: Matrix,
    pub psi12: Vec<Matrix>,
    pub psi22: Matrix,
    pub chi: Matrix,
}

impl GkElement {
    pub fn identity(field: &Field, n: usize, r: usize, a: usize) -> GkElement {
        GkElement {
            psi11: Matrix::identity(field, n * a),
            psi12: vec![Matrix::zeros(field, n * a, r - a); n],
            psi22: Matrix::identity(field, r - a),
            chi: Matrix::identity(field, (n - 1) * a),
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "psi11": matrix_to_json(&self.psi11),
            "psi12": self.psi12.iter().map(matrix_to_json).collect::<Vec<_>>(),
            "psi22": matrix_to_json(&self.psi22),
            "chi": matrix_to_json(&self.chi),
        })
    }

    pub fn from_json(v: &Value) -> Result<GkElement> {
        let m = |k: &str| matrix_from_json(v.get(k).ok_or_else(|| Error::Parse(format!("missing \"{k}\"")))?);
        let psi12 = matrices_from_json(v.get("psi12").ok_or_else(|| Error::Parse("missing \"psi12\"".into()))?)?;
        Ok(GkElement { psi11: m("psi11")?, psi12, psi22: m("psi22")?, chi: m("chi")? })
    }
}

/// `(ψ, χ)·(β, ξ) = (χ β ψ⁻¹, H⁰(ψ|ℓ∞) ξ)`.
pub fn gk_action(g: &GkElement, mp: &MonadPoint) -> Result<MonadPoint> {
    let (n, r, a) = (mp.n, mp.r, mp.a);
    let f = mp.field();
    let shapes = [
        (g.psi11.shape(), (n * a, n * a)),
        (g.psi22.shape(), (r - a, r - a)),
        (g.chi.shape(), ((n - 1) * a, (n - 1) * a)),
    ];
    if shapes.iter().any(|(x, y)| x != y) || g.psi12.len() != n || g.psi12.iter().any(|m| m.shape() != (n * a, r - a)) {
        return Err(Error::GroupShapeError("G_k element has the wrong block shapes".into()));
    }
    let p11i = g.psi11.inverse().ok_or(Error::SingularGroupElement)?;
    let p22i = g.psi22.inverse().ok_or(Error::SingularGroupElement)?;
    if !g.chi.is_invertible() {
        return Err(Error::SingularGroupElement);
    }
    let mq: Vec<Matrix> = g.psi12.iter().map(|x| &p11i * x).collect();
    let beta10 = &(&g.chi * &mp.beta10) * &p11i;
    let beta11 = &(&g.chi * &mp.beta11) * &p11i;
    let zero = Matrix::zeros(f, n * a, r - a);
    let m_at = |q: isize| -> &Matrix {
        if q >= 0 && (q as usize) < n {
            &mq[q as usize]
        } else {
            &zero
        }
    };
    let mut beta2 = Vec::with_capacity(n + 2);
    for q in 0..=n {
        let inner = &(&mp.beta2[q] - &(&mp.beta10 * m_at(q as isize))) - &(&mp.beta11 * m_at(q as isize - 1));
        beta2.push(&(&g.chi * &inner) * &p22i);
    }
    beta2.push(&(&g.chi * &mp.beta2[n + 1]) * &p22i);
    let w = mp.w_block();
    let mut blocks = Vec::with_capacity(n + 1);
    for m in 0..n {
        blocks.push(&(&g.psi11 * &mp.c_block(m)) + &(&g.psi12[n - 1 - m] * &w));
    }
    blocks.push(&g.psi22 * &w);
    let xi = Matrix::vstack(&blocks.iter().collect::<Vec<_>>())?;
    MonadPoint::new(n, r, a, beta10, beta11, beta2, xi)
}

/// Brings a point of `P_k` to the image of `j` inside its `G_k`-orbit and
/// reads off the minimal point.
pub fn normalize(mp: &MonadPoint) -> Result<MinimalPoint> {
    if let Some(why) = mp.membership_failure() {
        return Err(Error::NotInPk(why.into()));
    }
    let (n, r, a) = (mp.n, mp.r, mp.a);
    let f = mp.field().clone();
    if a == 0 {
        let theta = mp.w_block().inverse().ok_or_else(|| Error::NormalizationError("w is singular".into()))?;
        return MinimalPoint::new(n, r, a, vec![Matrix::zeros(&f, 0, r); n - 1], theta);
    }
    let na = n * a;
    let mut cur = mp.clone();
    if n >= 2 {
        // The band Φ⁺ has an a-dimensional kernel; move it to the j-image form.
        let (_, plus) = cur.build_phi();
        let kernel = Subspace::kernel_of(&plus);
        if kernel.dim() != a {
            return Err(Error::NormalizationError(format!("band kernel has dimension {}", kernel.dim())));
        }
        let x = kernel.basis_columns();
        let mut p_cols = Vec::new();
        let mut q_cols = Vec::new();
        for m in 0..n {
            for k in 0..a {
                p_cols.push(x.submatrix(m * na, k, na, 1));
                let sign = if m % 2 == 0 { f.one() } else { f.neg(&f.one()) };
                q_cols.push(Matrix::zeros(&f, na, 1).with_entry(m * a + k, 0, sign));
            }
        }
        let p = Matrix::hstack(&p_cols.iter().collect::<Vec<_>>())?;
        let q = Matrix::hstack(&q_cols.iter().collect::<Vec<_>>())?;
        let pinv = p.inverse().ok_or_else(|| Error::NormalizationError("kernel basis is degenerate".into()))?;
        let psi11 = &q * &pinv;
        let step = GkElement { psi11, ..GkElement::identity(&f, n, r, a) };
        cur = gk_action(&step, &cur)?;
        let rb = (n - 1) * a;
        let z = cur.beta10.submatrix(0, 0, rb, rb);
        let chi = z.inverse().ok_or_else(|| Error::NormalizationError("β10 block is singular".into()))?;
        cur = gk_action(&GkElement { chi, ..GkElement::identity(&f, n, r, a) }, &cur)?;

        // Kill β2[q], q = 0..n, by solving β10 M_q + β11 M_{q-1} = β2[q].
        let coeff = Matrix::from_fn(&f, (n + 1) * rb, n * na, |row, col| {
            let (q, i, t) = (row / rb, (row % rb) / a, row % a);
            let (qq, s, tt) = (col / na, (col % na) / a, col % a);
            let hit = t == tt && ((qq == q && s == i) || (qq + 1 == q && s == i + 1));
            if hit {
                f.one()
            } else {
                f.zero()
            }
        });
        let rhs = Matrix::vstack(&cur.beta2[..=n].iter().collect::<Vec<_>>())?;
        let sol = coeff
            .solve(&rhs)?
            .ok_or_else(|| Error::NormalizationError("β2 system has no solution".into()))?;
        let psi12 = (0..n).map(|q| sol.submatrix(q * na, 0, na, r - a)).collect();
        cur = gk_action(&GkElement { psi12, ..GkElement::identity(&f, n, r, a) }, &cur)?;
    }
    let x = cur.c_block(0).submatrix(0, 0, a, r);
    let big_theta = Matrix::vstack(&[&x, &cur.w_block()])?;
    let theta = big_theta.inverse().ok_or_else(|| Error::NormalizationError("recovered Θ is singular".into()))?;
    let b = (0..n - 1).map(|q| cur.beta2[n + 1].submatrix(q * a, 0, a, r - a)).collect();
    let pt = MinimalPoint::new(n, r, a, b, theta)?;
    if embed_j(&pt) != cur {
        return Err(Error::NormalizationError("normal form does not match the j-image".into()));
    }
    Ok(pt)
}

/// Canonical representative of the `GL(a, r)`-orbit of a minimal point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fingerprint {
    pub pivots: Vec<usize>,
    /// RREF basis of the span of the first `a` columns of `θ`, as rows.
    pub basis: Matrix,
    pub b: Vec<Matrix>,
}

impl Fingerprint {
    pub fn to_json(&self) -> Value {
        json!({
            "pivots": self.pivots,
            "basis": matrix_to_json(&self.basis),
            "b": self.b.iter().map(matrix_to_json).collect::<Vec<_>>(),
        })
    }
}

pub fn fingerprint(pt: &MinimalPoint) -> Fingerprint {
    let (r, a) = (pt.r, pt.a);
    let f = pt.field().clone();
    if a == 0 {
        return Fingerprint { pivots: vec![], basis: Matrix::zeros(&f, 0, r), b: vec![] };
    }
    let span = Subspace::column_span(&pt.theta.submatrix(0, 0, r, a));
    let pivots = span.pivots().to_vec();
    let mut cols = vec![span.basis_columns()];
    for i in (0..r).filter(|i| !pivots.contains(i)) {
        cols.push(Matrix::zeros(&f, r, 1).with_entry(i, 0, f.one()));
    }
    let theta_c = Matrix::hstack(&cols.iter().collect::<Vec<_>>()).unwrap();
    let g = &theta_c.inverse().expect("canonical frame is invertible") * &pt.theta;
    let big_a = g.submatrix(0, 0, a, a);
    let ci = g.submatrix(a, a, r - a, r - a).inverse().expect("parabolic block is invertible");
    let b = pt.b.iter().map(|x| &(&big_a * x) * &ci).collect();
    Fingerprint { pivots, basis: span.basis_rows().clone(), b }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(rows: &[Vec<i64>]) -> Matrix {
        Matrix::from_ints(&Field::Rational, rows)
    }

    #[test]
    fn invariant_examples() {
        let inv = invariants(2, 2, 1, 0).unwrap();
        assert_eq!(inv, MinimalInvariants { c_m: 0, nonempty: true, k: [0, 2, 1, 1], moduli_dim: 2 });
        let inv = invariants(3, 4, 0, 0).unwrap();
        assert_eq!((inv.c_m, inv.k, inv.moduli_dim), (0, [0, 0, 0, 4], 0));
        assert!(matches!(invariants(1, 2, 2, 0), Err(Error::NormalizationError(_))));
    }

    #[test]
    fn worked_example() {
        let pt = MinimalPoint::new(2, 2, 1, vec![q(&[vec![7]])], Matrix::identity(&Field::Rational, 2)).unwrap();
        let mp = embed_j(&pt);
        assert_eq!(mp.xi, q(&[vec![1, 0], vec![0, 0], vec![0, 0], vec![-1, 0], vec![0, 1]]));
        assert_eq!(mp.beta2[3], q(&[vec![7]]));
        let (phi, plus) = mp.build_phi();
        assert_eq!(phi, q(&[vec![0, 1], vec![1, 0]]));
        assert_eq!(plus, q(&[vec![0, 1, 0, 0], vec![1, 0, 0, 1], vec![0, 0, 1, 0]]));
        assert!(mp.check_membership());
        assert_eq!(normalize(&mp).unwrap(), pt);
        let bad = MonadPoint { xi: mp.xi.with_entry(1, 1, Field::Rational.one()), ..mp.clone() };
        assert!(!bad.check_membership());
    }

    #[test]
    fn scrambled_worked_example() {
        let f = Field::Rational;
        let pt = MinimalPoint::new(2, 2, 1, vec![q(&[vec![3]])], Matrix::identity(&f, 2)).unwrap();
        let g = GkElement {
            psi11: q(&[vec![1, 1], vec![0, 1]]),
            psi12: vec![q(&[vec![1], vec![0]]), q(&[vec![0], vec![2]])],
            psi22: q(&[vec![1]]),
            chi: q(&[vec![2]]),
        };
        let moved = gk_action(&g, &embed_j(&pt)).unwrap();
        assert!(moved.check_membership());
        let back = normalize(&moved).unwrap();
        assert_eq!(fingerprint(&back), fingerprint(&pt));
    }

    #[test]
    fn degenerate_cases() {
        let f = Field::Rational;
        let theta = q(&[vec![1, 2], vec![0, 1]]);
        let pt = MinimalPoint::new(1, 2, 1, vec![], theta.clone()).unwrap();
        let mp = embed_j(&pt);
        assert_eq!(mp.xi, theta.inverse().unwrap());
        assert_eq!(normalize(&mp).unwrap(), pt);
        let pt0 = MinimalPoint::new(3, 2, 0, vec![Matrix::zeros(&f, 0, 2); 2], theta).unwrap();
        assert!(fingerprint(&pt0).pivots.is_empty());
        assert_eq!(normalize(&embed_j(&pt0)).unwrap(), pt0);
    }

    #[test]
    fn fingerprint_is_parabolic_invariant() {
        let pt = MinimalPoint::new(3, 3, 1, vec![q(&[vec![1, 2]]), q(&[vec![0, -1]])], q(&[vec![1, 1, 0], vec![2, 1, 1], vec![0, 1, 3]]))
            .unwrap();
        let g = q(&[vec![2, 1, -1], vec![0, 1, 1], vec![0, 1, 2]]);
        assert_eq!(fingerprint(&pt.parabolic_action(&g).unwrap()), fingerprint(&pt));
    }
}
