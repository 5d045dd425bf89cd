use serde_json::{json, Value};

use crate::adhm_p2::AdhmP2;
use crate::error::{Error, Result};
use crate::exactmat::json::{matrices_from_json, matrix_from_json, matrix_to_json};
use crate::exactmat::{is_regular_pencil, singular_loci, Elem, Field, Matrix, Subspace};

/// A point `(A1, A2; C_1..C_n; e)` of the rank-1 ADHM space on `Σ_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HirzRank1 {
    pub n: usize,
    pub c: usize,
    pub a1: Matrix,
    pub a2: Matrix,
    pub cs: Vec<Matrix>,
    /// `1 x c`
    pub e: Matrix,
}

impl HirzRank1 {
    pub fn new(n: usize, c: usize, a1: Matrix, a2: Matrix, cs: Vec<Matrix>, e: Matrix) -> Result<HirzRank1> {
        if n == 0 || cs.len() != n {
            return Err(Error::ShapeError(format!("need n > 0 and n C-matrices (n = {n}, got {})", cs.len())));
        }
        let field = a1.field().clone();
        let mut all = vec![("A1", &a1, (c, c)), ("A2", &a2, (c, c)), ("e", &e, (1, c))];
        for m in &cs {
            all.push(("C", m, (c, c)));
        }
        for (name, m, want) in all {
            if m.shape() != want {
                return Err(Error::ShapeError(format!("{name} is {:?}, expected {:?}", m.shape(), want)));
            }
            if *m.field() != field {
                return Err(Error::FieldMismatch(format!("{name} over {}", m.field())));
            }
        }
        Ok(HirzRank1 { n, c, a1, a2, cs, e })
    }

    pub fn field(&self) -> &Field {
        self.a1.field()
    }

    /// `A1 C1 A2 - A2 C1 A1` for `n = 1`; otherwise `A1 C_q - A2 C_{q+1}`
    /// and `C_q A1 - C_{q+1} A2` for `q = 1..n-1`.
    pub fn check_p1(&self) -> Vec<Matrix> {
        if self.n == 1 {
            let c1 = &self.cs[0];
            return vec![&(&(&self.a1 * c1) * &self.a2) - &(&(&self.a2 * c1) * &self.a1)];
        }
        let mut out = Vec::new();
        for q in 0..self.n - 1 {
            out.push(&(&self.a1 * &self.cs[q]) - &(&self.a2 * &self.cs[q + 1]));
            out.push(&(&self.cs[q] * &self.a1) - &(&self.cs[q + 1] * &self.a2));
        }
        out
    }

    pub fn p1_holds(&self) -> bool {
        self.check_p1().iter().all(Matrix::is_zero)
    }

    pub fn check_p2(&self) -> Result<bool> {
        is_regular_pencil(&self.a1, &self.a2)
    }

    /// True when no destabilizing vector exists. At each zero `[ν1:ν2]` of
    /// the pencil determinant set `λ1 = ν2`, `λ2 = ν1`, `X = C1 A2`,
    /// `Y = C_n A1` and `Z = (-λ2)^n Y - λ1^n X`. A violating vector is a
    /// common eigenvector of `X, Y` inside `ker(ν1 A1 + ν2 A2) ∩ ker e ∩ ker Z`;
    /// one exists iff the largest `{X, Y}`-invariant subspace there carries a
    /// common eigenvector, which is decided by Shemesh's commutator test.
    pub fn check_p3(&self) -> Result<bool> {
        for locus in singular_loci(&self.a1, &self.a2)? {
            let (k, nu1, nu2) = locus.root.coordinates()?;
            if self.violates_at(&k, &nu1, &nu2, &locus.kernel)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn violates_at(&self, k: &Field, nu1: &Elem, nu2: &Elem, kernel: &[Matrix]) -> Result<bool> {
        if kernel.is_empty() {
            return Ok(false);
        }
        let (lambda1, lambda2) = (nu2.clone(), nu1.clone());
        let x = (&self.cs[0] * &self.a2).embed(k)?;
        let y = (&self.cs[self.n - 1] * &self.a1).embed(k)?;
        let pow = |base: &Elem| (0..self.n).fold(k.one(), |acc, _| k.mul(&acc, base));
        let z = &y.scale(&pow(&k.neg(&lambda2))) - &x.scale(&pow(&lambda1));
        let kspace = Subspace::column_span(&Matrix::hstack(&kernel.iter().collect::<Vec<_>>())?);
        let u0 = kspace.intersect(&Subspace::kernel_of(&self.e.embed(k)?)).intersect(&Subspace::kernel_of(&z));
        let w = largest_invariant(&u0, &[&x, &y]);
        if w.dim() == 0 {
            return Ok(false);
        }
        let basis = w.basis_columns();
        let restrict = |m: &Matrix| basis.solve(&(m * &basis)).unwrap().expect("W is invariant");
        Ok(common_eigenvector(&restrict(&x), &restrict(&y)))
    }

    /// `(φ2 A_i φ1⁻¹, φ1 C_j φ2⁻¹, e φ1⁻¹)`.
    pub fn hirz_action(&self, phi1: &Matrix, phi2: &Matrix) -> Result<HirzRank1> {
        if phi1.shape() != (self.c, self.c) || phi2.shape() != (self.c, self.c) {
            return Err(Error::ShapeError("φ1, φ2 must be c x c".into()));
        }
        let p1i = phi1.inverse().ok_or(Error::SingularGroupElement)?;
        let p2i = phi2.inverse().ok_or(Error::SingularGroupElement)?;
        HirzRank1::new(
            self.n,
            self.c,
            &(phi2 * &self.a1) * &p1i,
            &(phi2 * &self.a2) * &p1i,
            self.cs.iter().map(|m| &(phi1 * m) * &p2i).collect(),
            &self.e * &p1i,
        )
    }

    /// Chart map on `det A2 ≠ 0`: the plane datum
    /// `((A2⁻¹A1)ᵀ, (C1 A2)ᵀ, eᵀ, 0)`. It satisfies the moment equation
    /// whenever (P1) holds and intertwines `(φ1, φ2)` with `φ1^{-T}`.
    pub fn p2_chart(&self) -> Result<AdhmP2> {
        let a2i = self.a2.inverse().ok_or(Error::NotInChart)?;
        AdhmP2::new(
            1,
            self.c,
            (&a2i * &self.a1).transpose(),
            (&self.cs[0] * &self.a2).transpose(),
            self.e.transpose(),
            Matrix::zeros(self.field(), 1, self.c),
        )
    }

    pub fn to_json(&self) -> Value {
        json!({
            "n": self.n,
            "c": self.c,
            "A1": matrix_to_json(&self.a1),
            "A2": matrix_to_json(&self.a2),
            "C": self.cs.iter().map(matrix_to_json).collect::<Vec<_>>(),
            "e": matrix_to_json(&self.e),
        })
    }

    pub fn from_json(v: &Value) -> Result<HirzRank1> {
        let n = |k: &str| {
            v.get(k)
                .and_then(Value::as_u64)
                .map(|x| x as usize)
                .ok_or_else(|| Error::Parse(format!("missing integer \"{k}\"")))
        };
        let m = |k: &str| matrix_from_json(v.get(k).ok_or_else(|| Error::Parse(format!("missing \"{k}\"")))?);
        let cs = matrices_from_json(v.get("C").ok_or_else(|| Error::Parse("missing \"C\"".into()))?)?;
        HirzRank1::new(n("n")?, n("c")?, m("A1")?, m("A2")?, cs, m("e")?)
    }
}

/// Largest subspace of `u` invariant under every map in `maps`.
pub fn largest_invariant(u: &Subspace, maps: &[&Matrix]) -> Subspace {
    let mut cons = Subspace::row_span(&u.constraints());
    loop {
        let rows = cons.basis_rows().clone();
        let mut parts = vec![rows.clone()];
        parts.extend(maps.iter().map(|m| &rows * *m));
        let next = Subspace::row_span(&Matrix::vstack(&parts.iter().collect::<Vec<_>>()).unwrap());
        if next.dim() == cons.dim() {
            return Subspace::kernel_of(next.basis_rows());
        }
        cons = next;
    }
}

/// Shemesh: `X`, `Y` share an eigenvector over the algebraic closure iff
/// `∩_{k,l=1}^{d-1} ker [X^k, Y^l]` is nonzero.
pub fn common_eigenvector(x: &Matrix, y: &Matrix) -> bool {
    let d = x.rows();
    if d == 0 {
        return false;
    }
    let xp: Vec<Matrix> = (1..d).map(|k| x.pow(k)).collect();
    let yp: Vec<Matrix> = (1..d).map(|l| y.pow(l)).collect();
    let mut comms = Vec::new();
    for a in &xp {
        for b in &yp {
            comms.push(a.commutator(b));
        }
    }
    if comms.is_empty() {
        return true;
    }
    let stacked = Matrix::vstack(&comms.iter().collect::<Vec<_>>()).unwrap();
    stacked.rank() < d
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(rows: &[Vec<i64>]) -> Matrix {
        Matrix::from_ints(&Field::Rational, rows)
    }

    #[test]
    fn p1_examples() {
        let s = |x| q(&[vec![x]]);
        assert!(HirzRank1::new(1, 1, s(2), s(3), vec![s(5)], s(1)).unwrap().p1_holds());
        let i = Matrix::identity(&Field::Rational, 2);
        let m = q(&[vec![1, 2], vec![3, 4]]);
        let e = q(&[vec![1, 0]]);
        let d = HirzRank1::new(2, 2, i.clone(), i.clone(), vec![m.clone(), m.clone()], e.clone()).unwrap();
        assert!(d.p1_holds());
        let z = Matrix::zeros(&Field::Rational, 2, 2);
        let d = HirzRank1::new(2, 2, i.clone(), z, vec![i.clone(), m], e).unwrap();
        assert!(!d.p1_holds());
    }

    #[test]
    fn p3_examples() {
        let s = |x| q(&[vec![x]]);
        let d = HirzRank1::new(1, 1, s(1), s(-1), vec![s(3)], s(1)).unwrap();
        assert!(d.check_p3().unwrap());
        let d = HirzRank1::new(1, 1, s(1), s(-1), vec![s(3)], s(0)).unwrap();
        assert!(!d.check_p3().unwrap());
        let d = HirzRank1::new(1, 1, s(0), s(0), vec![s(3)], s(1)).unwrap();
        assert_eq!(d.check_p3(), Err(Error::IrregularPencil));
    }

    #[test]
    fn shemesh_detects_shared_eigenvectors() {
        let x = q(&[vec![1, 1], vec![0, 1]]);
        let y = q(&[vec![2, 0], vec![0, 3]]);
        assert!(common_eigenvector(&x, &y));
        let y = q(&[vec![0, 0], vec![1, 0]]);
        assert!(!common_eigenvector(&x, &y));
    }
}
