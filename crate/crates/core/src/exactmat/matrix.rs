use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num::BigRational;

use super::scalar::{Elem, Field, Scalar};
use crate::error::{Error, Result};

/// Dense row-major matrix over an exact field. Values are never mutated
/// after construction; every operation returns a fresh matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<Elem>,
}

/// Output of [`Matrix::rref`].
#[derive(Clone, Debug)]
pub struct Rref {
    pub reduced: Matrix,
    pub pivots: Vec<usize>,
    pub rank: usize,
    /// Null-space basis as column vectors, one per free column.
    pub kernel: Vec<Matrix>,
}

impl Matrix {
    pub fn zeros(field: &Field, rows: usize, cols: usize) -> Matrix {
        Matrix { field: field.clone(), rows, cols, data: vec![field.zero(); rows * cols] }
    }

    pub fn identity(field: &Field, n: usize) -> Matrix {
        Matrix::from_fn(field, n, n, |i, j| if i == j { field.one() } else { field.zero() })
    }

    pub fn from_fn(field: &Field, rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Elem) -> Matrix {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { field: field.clone(), rows, cols, data }
    }

    /// Builds from raw elements; `data.len()` must equal `rows * cols`.
    pub fn from_vec(field: &Field, rows: usize, cols: usize, data: Vec<Elem>) -> Result<Matrix> {
        if data.len() != rows * cols {
            return Err(Error::ShapeError(format!("{} entries for a {rows}x{cols} matrix", data.len())));
        }
        if let Some(bad) = data.iter().find(|e| !field.contains(e)) {
            return Err(Error::FieldMismatch(format!("{bad:?} is not an element of {field}")));
        }
        Ok(Matrix { field: field.clone(), rows, cols, data })
    }

    /// Integer matrix given row by row. Panics on ragged input.
    pub fn from_ints(field: &Field, rows: &[Vec<i64>]) -> Matrix {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged integer matrix");
        Matrix::from_fn(field, r, c, |i, j| field.from_i64(rows[i][j]))
    }

    pub fn from_rationals(rows: &[Vec<BigRational>]) -> Result<Matrix> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        if rows.iter().any(|x| x.len() != c) {
            return Err(Error::ShapeError("ragged rows".into()));
        }
        Ok(Matrix::from_fn(&Field::Rational, r, c, |i, j| Elem::Rat(rows[i][j].clone())))
    }

    /// Builds from scalars, rejecting mixed field tags.
    pub fn from_scalars(rows: &[Vec<Scalar>]) -> Result<Matrix> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        if rows.iter().any(|x| x.len() != c) {
            return Err(Error::ShapeError("ragged rows".into()));
        }
        let field = match rows.iter().flatten().next() {
            Some(s) => s.field().clone(),
            None => Field::Rational,
        };
        if let Some(s) = rows.iter().flatten().find(|s| s.field() != &field) {
            return Err(Error::FieldMismatch(format!("{} vs {}", field, s.field())));
        }
        Ok(Matrix::from_fn(&field, r, c, |i, j| rows[i][j].value().clone()))
    }

    pub fn column(field: &Field, entries: Vec<Elem>) -> Matrix {
        let n = entries.len();
        Matrix { field: field.clone(), rows: n, cols: 1, data: entries }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Elem {
        &self.data[i * self.cols + j]
    }

    pub fn scalar(&self, i: usize, j: usize) -> Scalar {
        Scalar::new(self.field.clone(), self.get(i, j).clone()).unwrap()
    }

    pub fn entries(&self) -> &[Elem] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Elem] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|e| self.field.is_zero(e))
    }

    pub fn is_identity(&self) -> bool {
        self.is_square() && *self == Matrix::identity(&self.field, self.rows)
    }

    /// Copy with a single entry replaced.
    pub fn with_entry(&self, i: usize, j: usize, v: Elem) -> Matrix {
        let mut m = self.clone();
        m.data[i * self.cols + j] = v;
        m
    }

    pub fn map(&self, f: impl Fn(&Elem) -> Elem) -> Matrix {
        Matrix { field: self.field.clone(), rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    fn same_field(&self, other: &Matrix) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch(format!("{} vs {}", self.field, other.field)));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Matrix) -> Result<Matrix> {
        self.same_field(other)?;
        if self.shape() != other.shape() {
            return Err(Error::ShapeError(format!("add {:?} + {:?}", self.shape(), other.shape())));
        }
        let f = &self.field;
        Ok(Matrix {
            field: f.clone(),
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| f.add(a, b)).collect(),
        })
    }

    pub fn try_sub(&self, other: &Matrix) -> Result<Matrix> {
        self.try_add(&other.neg_m())
    }

    fn neg_m(&self) -> Matrix {
        self.map(|e| self.field.neg(e))
    }

    pub fn try_mul(&self, other: &Matrix) -> Result<Matrix> {
        self.same_field(other)?;
        if self.cols != other.rows {
            return Err(Error::ShapeError(format!("product {:?} * {:?}", self.shape(), other.shape())));
        }
        let f = &self.field;
        let mut data = vec![f.zero(); self.rows * other.cols];
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if f.is_zero(a) {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if f.is_zero(b) {
                        continue;
                    }
                    let idx = i * other.cols + j;
                    data[idx] = f.add(&data[idx], &f.mul(a, b));
                }
            }
        }
        Ok(Matrix { field: f.clone(), rows: self.rows, cols: other.cols, data })
    }

    pub fn scale(&self, c: &Elem) -> Matrix {
        self.map(|e| self.field.mul(c, e))
    }

    pub fn scale_i64(&self, c: i64) -> Matrix {
        self.scale(&self.field.from_i64(c))
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(&self.field, self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn trace(&self) -> Result<Scalar> {
        if !self.is_square() {
            return Err(Error::ShapeError("trace of a non-square matrix".into()));
        }
        let mut acc = self.field.zero();
        for i in 0..self.rows {
            acc = self.field.add(&acc, self.get(i, i));
        }
        Scalar::new(self.field.clone(), acc)
    }

    /// Block with top-left corner `(r0, c0)`.
    pub fn submatrix(&self, r0: usize, c0: usize, nr: usize, nc: usize) -> Matrix {
        assert!(r0 + nr <= self.rows && c0 + nc <= self.cols, "submatrix out of range");
        Matrix::from_fn(&self.field, nr, nc, |i, j| self.get(r0 + i, c0 + j).clone())
    }

    pub fn select_columns(&self, cols: &[usize]) -> Matrix {
        Matrix::from_fn(&self.field, self.rows, cols.len(), |i, j| self.get(i, cols[j]).clone())
    }

    pub fn select_rows(&self, rows: &[usize]) -> Matrix {
        Matrix::from_fn(&self.field, rows.len(), self.cols, |i, j| self.get(rows[i], j).clone())
    }

    pub fn col_vec(&self, j: usize) -> Matrix {
        self.submatrix(0, j, self.rows, 1)
    }

    pub fn hstack(parts: &[&Matrix]) -> Result<Matrix> {
        let first = parts.first().ok_or_else(|| Error::ShapeError("empty hstack".into()))?;
        let rows = first.rows;
        for p in parts {
            first.same_field(p)?;
            if p.rows != rows {
                return Err(Error::ShapeError("hstack row mismatch".into()));
            }
        }
        let cols = parts.iter().map(|p| p.cols).sum();
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for p in parts {
                data.extend_from_slice(p.row(i));
            }
        }
        Ok(Matrix { field: first.field.clone(), rows, cols, data })
    }

    pub fn vstack(parts: &[&Matrix]) -> Result<Matrix> {
        let first = parts.first().ok_or_else(|| Error::ShapeError("empty vstack".into()))?;
        let cols = first.cols;
        let mut data = Vec::new();
        let mut rows = 0;
        for p in parts {
            first.same_field(p)?;
            if p.cols != cols {
                return Err(Error::ShapeError("vstack column mismatch".into()));
            }
            data.extend_from_slice(&p.data);
            rows += p.rows;
        }
        Ok(Matrix { field: first.field.clone(), rows, cols, data })
    }

    /// Assembles a block matrix; `None` blocks are zero of the size implied by
    /// `row_sizes` and `col_sizes`.
    pub fn block(field: &Field, row_sizes: &[usize], col_sizes: &[usize], blocks: &[Vec<Option<&Matrix>>]) -> Result<Matrix> {
        let rows: usize = row_sizes.iter().sum();
        let cols: usize = col_sizes.iter().sum();
        let mut data = vec![field.zero(); rows * cols];
        let mut r0 = 0;
        for (bi, &rs) in row_sizes.iter().enumerate() {
            let mut c0 = 0;
            for (bj, &cs) in col_sizes.iter().enumerate() {
                if let Some(Some(b)) = blocks.get(bi).and_then(|r| r.get(bj)) {
                    if b.field != *field {
                        return Err(Error::FieldMismatch(format!("{} vs {}", b.field, field)));
                    }
                    if b.shape() != (rs, cs) {
                        return Err(Error::ShapeError(format!(
                            "block ({bi},{bj}) is {:?}, expected {:?}",
                            b.shape(),
                            (rs, cs)
                        )));
                    }
                    for i in 0..rs {
                        for j in 0..cs {
                            data[(r0 + i) * cols + c0 + j] = b.get(i, j).clone();
                        }
                    }
                }
                c0 += cs;
            }
            r0 += rs;
        }
        Ok(Matrix { field: field.clone(), rows, cols, data })
    }

    /// Reduced row echelon form with pivots and a null-space basis.
    pub fn rref(&self) -> Rref {
        let f = &self.field;
        let (m, n) = (self.rows, self.cols);
        let mut a: Vec<Vec<Elem>> = (0..m).map(|i| self.row(i).to_vec()).collect();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..n {
            if r == m {
                break;
            }
            let Some(p) = (r..m).find(|&i| !f.is_zero(&a[i][c])) else {
                continue;
            };
            a.swap(r, p);
            let inv = f.inv(&a[r][c]).unwrap();
            for j in c..n {
                a[r][j] = f.mul(&a[r][j], &inv);
            }
            let pivot_row = a[r].clone();
            for (i, row) in a.iter_mut().enumerate() {
                if i == r || f.is_zero(&row[c]) {
                    continue;
                }
                let factor = row[c].clone();
                for j in c..n {
                    if !f.is_zero(&pivot_row[j]) {
                        row[j] = f.sub(&row[j], &f.mul(&factor, &pivot_row[j]));
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        let rank = pivots.len();
        let mut kernel = Vec::new();
        let mut is_pivot = vec![None; n];
        for (row, &c) in pivots.iter().enumerate() {
            is_pivot[c] = Some(row);
        }
        for free in 0..n {
            if is_pivot[free].is_some() {
                continue;
            }
            let mut v = vec![f.zero(); n];
            v[free] = f.one();
            for (row, &c) in pivots.iter().enumerate() {
                v[c] = f.neg(&a[row][free]);
            }
            kernel.push(Matrix::column(f, v));
        }
        let reduced = Matrix { field: f.clone(), rows: m, cols: n, data: a.into_iter().flatten().collect() };
        Rref { reduced, pivots, rank, kernel }
    }

    pub fn rank(&self) -> usize {
        self.rref().rank
    }

    /// Null-space basis packed as the columns of a `cols x k` matrix.
    pub fn kernel_matrix(&self) -> Matrix {
        let k = self.rref().kernel;
        if k.is_empty() {
            return Matrix::zeros(&self.field, self.cols, 0);
        }
        Matrix::hstack(&k.iter().collect::<Vec<_>>()).unwrap()
    }

    pub fn det(&self) -> Result<Scalar> {
        if !self.is_square() {
            return Err(Error::ShapeError("determinant of a non-square matrix".into()));
        }
        let f = &self.field;
        let n = self.rows;
        let mut a: Vec<Vec<Elem>> = (0..n).map(|i| self.row(i).to_vec()).collect();
        let mut det = f.one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !f.is_zero(&a[i][c])) else {
                return Scalar::new(f.clone(), f.zero());
            };
            if p != c {
                a.swap(p, c);
                det = f.neg(&det);
            }
            det = f.mul(&det, &a[c][c]);
            let inv = f.inv(&a[c][c]).unwrap();
            for i in c + 1..n {
                if f.is_zero(&a[i][c]) {
                    continue;
                }
                let factor = f.mul(&a[i][c], &inv);
                for j in c..n {
                    let t = f.mul(&factor, &a[c][j]);
                    a[i][j] = f.sub(&a[i][j], &t);
                }
            }
        }
        Scalar::new(f.clone(), det)
    }

    pub fn inverse(&self) -> Option<Matrix> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let aug = Matrix::hstack(&[self, &Matrix::identity(&self.field, n)]).unwrap();
        let r = aug.rref();
        if r.pivots.iter().take_while(|&&p| p < n).count() < n {
            return None;
        }
        Some(r.reduced.submatrix(0, n, n, n))
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.rank() == self.rows
    }

    /// A solution of `self * X = rhs` with free variables set to zero.
    pub fn solve(&self, rhs: &Matrix) -> Result<Option<Matrix>> {
        self.same_field(rhs)?;
        if rhs.rows != self.rows {
            return Err(Error::ShapeError("solve: row mismatch".into()));
        }
        let n = self.cols;
        let aug = Matrix::hstack(&[self, rhs])?;
        let r = aug.rref();
        if r.pivots.iter().any(|&p| p >= n) {
            return Ok(None);
        }
        let f = &self.field;
        let mut x = Matrix::zeros(f, n, rhs.cols);
        for (row, &p) in r.pivots.iter().enumerate() {
            for j in 0..rhs.cols {
                x.data[p * rhs.cols + j] = r.reduced.get(row, n + j).clone();
            }
        }
        Ok(Some(x))
    }

    /// Lifts a rational matrix into another field (identity if already there).
    pub fn embed(&self, target: &Field) -> Result<Matrix> {
        let data = self.data.iter().map(|e| self.field.embed(e, target)).collect::<Result<Vec<_>>>()?;
        Ok(Matrix { field: target.clone(), rows: self.rows, cols: self.cols, data })
    }

    /// Columns vectorised in column-major order.
    pub fn vec_col_major(&self) -> Vec<Elem> {
        let mut out = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                out.push(self.get(i, j).clone());
            }
        }
        out
    }

    pub fn from_col_major(field: &Field, rows: usize, cols: usize, v: &[Elem]) -> Matrix {
        Matrix::from_fn(field, rows, cols, |i, j| v[j * rows + i].clone())
    }

    /// Commutator `AB - BA`.
    pub fn commutator(&self, other: &Matrix) -> Matrix {
        &(self * other) - &(other * self)
    }

    pub fn pow(&self, k: usize) -> Matrix {
        let mut acc = Matrix::identity(&self.field, self.rows);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            let row: Vec<String> = self.row(i).iter().map(|e| self.field.format(e)).collect();
            write!(f, "{}", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl Add for &Matrix {
    type Output = Matrix;
    fn add(self, rhs: &Matrix) -> Matrix {
        self.try_add(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl Sub for &Matrix {
    type Output = Matrix;
    fn sub(self, rhs: &Matrix) -> Matrix {
        self.try_sub(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl Mul for &Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &Matrix) -> Matrix {
        self.try_mul(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl Neg for &Matrix {
    type Output = Matrix;
    fn neg(self) -> Matrix {
        self.neg_m()
    }
}
