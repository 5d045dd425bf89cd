//! Determinants and singular loci of matrix pencils `ν₁A₁ + ν₂A₂`.

use std::collections::HashMap;
use std::fmt;

use num::BigRational;

use super::matrix::Matrix;
use super::poly::{format_rational, Poly};
use super::scalar::{Elem, Field};
use crate::error::{Error, Result};

/// Binary form `Σ coeffs[k] ν₁^k ν₂^(degree-k)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PencilPoly {
    pub field: Field,
    pub degree: usize,
    pub coeffs: Vec<Elem>,
}

impl PencilPoly {
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| self.field.is_zero(c))
    }

    pub fn eval(&self, nu1: &Elem, nu2: &Elem) -> Elem {
        let f = &self.field;
        let mut acc = f.zero();
        for (k, c) in self.coeffs.iter().enumerate() {
            let mut term = c.clone();
            for _ in 0..k {
                term = f.mul(&term, nu1);
            }
            for _ in 0..self.degree - k {
                term = f.mul(&term, nu2);
            }
            acc = f.add(&acc, &term);
        }
        acc
    }

    /// Dehomogenisation at `ν₂ = 1` (rational pencils only).
    pub fn affine_poly(&self) -> Result<Poly> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| match c {
                Elem::Rat(q) => Ok(q.clone()),
                _ => Err(Error::FieldMismatch("pencil roots need rational coefficients".into())),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Poly::new(coeffs))
    }
}

fn check_pair(a1: &Matrix, a2: &Matrix) -> Result<usize> {
    if !a1.is_square() || !a2.is_square() || a1.rows() != a2.rows() {
        return Err(Error::ShapeError(format!(
            "pencil needs equal square matrices, got {:?} and {:?}",
            a1.shape(),
            a2.shape()
        )));
    }
    if a1.field() != a2.field() {
        return Err(Error::FieldMismatch(format!("{} vs {}", a1.field(), a2.field())));
    }
    Ok(a1.rows())
}

/// Coefficients of `det(ν₁A₁ + ν₂A₂)`. Evaluates `det(A₁ + tA₂)` at
/// `t = 0..c` and interpolates; in characteristic `p ≤ c`, where those nodes
/// collide, falls back to cofactor expansion over `F_p[t]`.
pub fn pencil_det(a1: &Matrix, a2: &Matrix) -> Result<PencilPoly> {
    let c = check_pair(a1, a2)?;
    let f = a1.field().clone();
    let p = f.characteristic();
    let by_t = if p == 0 || p as usize > c {
        let xs: Vec<Elem> = (0..=c as i64).map(|t| f.from_i64(t)).collect();
        let ys: Vec<Elem> = xs
            .iter()
            .map(|t| a1.try_add(&a2.scale(t)).unwrap().det().unwrap().value().clone())
            .collect();
        interpolate_in(&f, &xs, &ys, c + 1)
    } else {
        det_linear_laplace(a1, a2)
    };
    // det(A₁ + tA₂) = Σ coeff_k t^(c-k).
    let coeffs = (0..=c).map(|k| by_t[c - k].clone()).collect();
    Ok(PencilPoly { field: f, degree: c, coeffs })
}

pub fn is_regular_pencil(a1: &Matrix, a2: &Matrix) -> Result<bool> {
    Ok(!pencil_det(a1, a2)?.is_zero())
}

/// Coefficient vector (length `len`) of the interpolating polynomial.
fn interpolate_in(f: &Field, xs: &[Elem], ys: &[Elem], len: usize) -> Vec<Elem> {
    let mut acc = vec![f.zero(); len];
    for (i, xi) in xs.iter().enumerate() {
        if f.is_zero(&ys[i]) {
            continue;
        }
        let mut basis = vec![f.one()];
        let mut denom = f.one();
        for (j, xj) in xs.iter().enumerate() {
            if i == j {
                continue;
            }
            basis = poly_mul(f, &basis, &[f.neg(xj), f.one()]);
            denom = f.mul(&denom, &f.sub(xi, xj));
        }
        let scale = f.div(&ys[i], &denom).unwrap();
        for (k, b) in basis.iter().enumerate() {
            acc[k] = f.add(&acc[k], &f.mul(b, &scale));
        }
    }
    acc
}

fn poly_mul(f: &Field, a: &[Elem], b: &[Elem]) -> Vec<Elem> {
    let mut out = vec![f.zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = f.add(&out[i + j], &f.mul(x, y));
        }
    }
    out
}

/// `det(A₁ + tA₂)` as a coefficient vector in `t` of length `c+1`, by
/// memoised cofactor expansion over column subsets.
pub fn det_linear_laplace(a1: &Matrix, a2: &Matrix) -> Vec<Elem> {
    let f = a1.field().clone();
    let c = a1.rows();
    let mut memo: HashMap<u64, Vec<Elem>> = HashMap::new();
    memo.insert(0, vec![f.one()]);
    let full: u64 = if c == 0 { 0 } else { (1u64 << c) - 1 };
    fn rec(
        mask: u64,
        f: &Field,
        a1: &Matrix,
        a2: &Matrix,
        memo: &mut HashMap<u64, Vec<Elem>>,
    ) -> Vec<Elem> {
        if let Some(v) = memo.get(&mask) {
            return v.clone();
        }
        let k = mask.count_ones() as usize;
        let row = k - 1;
        let mut acc = vec![f.zero()];
        let mut pos = 0;
        for j in 0..64 {
            if mask & (1 << j) == 0 {
                continue;
            }
            let entry = [a1.get(row, j).clone(), a2.get(row, j).clone()];
            if !(f.is_zero(&entry[0]) && f.is_zero(&entry[1])) {
                let minor = rec(mask & !(1 << j), f, a1, a2, memo);
                let mut term = poly_mul(f, &entry, &minor);
                if (row + pos) % 2 == 1 {
                    term = term.iter().map(|e| f.neg(e)).collect();
                }
                if term.len() > acc.len() {
                    acc.resize(term.len(), f.zero());
                }
                for (i, t) in term.iter().enumerate() {
                    acc[i] = f.add(&acc[i], t);
                }
            }
            pos += 1;
        }
        memo.insert(mask, acc.clone());
        acc
    }
    let mut out = rec(full, &f, a1, a2, &mut memo);
    out.resize(c + 1, f.zero());
    out
}

/// A projective zero `[ν₁:ν₂]` of the pencil determinant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PencilRoot {
    /// `[1:0]`.
    Infinity,
    /// `[q:1]`.
    Rational(BigRational),
    /// `[x:1]` with `x` the class of the generator in `Q[x]/(f)`.
    Algebraic(Poly),
}

impl PencilRoot {
    /// Field of definition and the coordinates `(ν₁, ν₂)` in it.
    pub fn coordinates(&self) -> Result<(Field, Elem, Elem)> {
        Ok(match self {
            PencilRoot::Infinity => (Field::Rational, Field::Rational.one(), Field::Rational.zero()),
            PencilRoot::Rational(q) => (Field::Rational, Elem::Rat(q.clone()), Field::Rational.one()),
            PencilRoot::Algebraic(f) => {
                let k = Field::extension(f.clone())?;
                let x = k.generator().unwrap();
                let one = k.one();
                (k, x, one)
            }
        })
    }
}

impl fmt::Display for PencilRoot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PencilRoot::Infinity => write!(f, "[1:0]"),
            PencilRoot::Rational(q) => write!(f, "[{}:1]", format_rational(q)),
            PencilRoot::Algebraic(p) => write!(f, "[x:1] mod {p}"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SingularLocus {
    pub root: PencilRoot,
    /// Basis of `ker(ν₁A₁ + ν₂A₂)` over the root's field, as columns.
    pub kernel: Vec<Matrix>,
}

/// Zeros of `det(ν₁A₁ + ν₂A₂)` with the kernels of the pencil there.
/// Rational pencils only.
pub fn singular_loci(a1: &Matrix, a2: &Matrix) -> Result<Vec<SingularLocus>> {
    let form = pencil_det(a1, a2)?;
    if form.is_zero() {
        return Err(Error::IrregularPencil);
    }
    if *a1.field() != Field::Rational {
        return Err(Error::FieldMismatch("singular loci are computed for rational pencils".into()));
    }
    let g = form.affine_poly()?;
    let mut out = Vec::new();
    if g.degree() != Some(form.degree) {
        let kernel = a1.rref().kernel;
        out.push(SingularLocus { root: PencilRoot::Infinity, kernel });
    }
    for factor in g.irreducible_factors()? {
        let root = if factor.degree() == Some(1) {
            PencilRoot::Rational(-factor.coeff(0))
        } else {
            PencilRoot::Algebraic(factor)
        };
        let (k, nu1, nu2) = root.coordinates()?;
        let pencil = &a1.embed(&k)?.scale(&nu1) + &a2.embed(&k)?.scale(&nu2);
        out.push(SingularLocus { root, kernel: pencil.rref().kernel });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(rows: &[Vec<i64>]) -> Matrix {
        Matrix::from_ints(&Field::Rational, rows)
    }

    fn ints(p: &PencilPoly) -> Vec<i64> {
        p.coeffs.iter().map(|c| p.field.format(c).parse().unwrap()).collect()
    }

    #[test]
    fn documented_forms() {
        let d = pencil_det(&q(&[vec![1, 0], vec![0, 0]]), &q(&[vec![0, 0], vec![0, 1]])).unwrap();
        assert_eq!(ints(&d), vec![0, 1, 0]);
        let z = pencil_det(&q(&[vec![0, 0], vec![0, 0]]), &q(&[vec![0, 0], vec![0, 0]])).unwrap();
        assert!(z.is_zero());
        let n = pencil_det(&q(&[vec![1, 0], vec![0, 1]]), &q(&[vec![0, 1], vec![0, 0]])).unwrap();
        assert_eq!(ints(&n), vec![0, 0, 1]);
        let s = pencil_det(&q(&[vec![0, 1], vec![0, 0]]), &q(&[vec![0, 0], vec![1, 0]])).unwrap();
        assert_eq!(ints(&s), vec![0, -1, 0]);
    }

    #[test]
    fn small_characteristic_uses_expansion() {
        let f = Field::Prime(2);
        let a1 = Matrix::from_ints(&f, &[vec![1, 1, 0], vec![0, 1, 0], vec![1, 0, 1]]);
        let a2 = Matrix::from_ints(&f, &[vec![0, 1, 1], vec![1, 0, 0], vec![0, 0, 1]]);
        let form = pencil_det(&a1, &a2).unwrap();
        for (n1, n2) in [(0, 1), (1, 0), (1, 1)] {
            let direct = (&a1.scale_i64(n1) + &a2.scale_i64(n2)).det().unwrap();
            assert_eq!(&form.eval(&f.from_i64(n1), &f.from_i64(n2)), direct.value());
        }
    }

    #[test]
    fn loci_examples() {
        let l = singular_loci(&q(&[vec![1, 0], vec![0, 0]]), &q(&[vec![0, 0], vec![0, 1]])).unwrap();
        assert_eq!(l.len(), 2);
        assert!(l.iter().all(|s| s.kernel.len() == 1));
        let l = singular_loci(&q(&[vec![1, 0], vec![0, 1]]), &q(&[vec![0, 0], vec![0, 0]])).unwrap();
        assert_eq!(l.len(), 1);
        assert_eq!(l[0].root, PencilRoot::Rational(BigRational::from_integer(0.into())));
        assert_eq!(l[0].kernel.len(), 2);
        let l = singular_loci(&q(&[vec![0, -1], vec![1, 0]]), &q(&[vec![1, 0], vec![0, 1]])).unwrap();
        assert_eq!(l.len(), 1);
        assert_eq!(l[0].root, PencilRoot::Algebraic(Poly::from_ints(&[1, 0, 1])));
        assert_eq!(l[0].kernel.len(), 1);
        let zero = q(&[vec![0, 0], vec![0, 0]]);
        assert!(matches!(singular_loci(&zero, &zero), Err(Error::IrregularPencil)));
    }
}
