use super::matrix::Matrix;
use super::scalar::Field;

/// A linear subspace of `F^n`, stored as its reduced row echelon basis so
/// that equality of subspaces is equality of values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace {
    ambient: usize,
    basis: Matrix,
    pivots: Vec<usize>,
}

impl Subspace {
    /// Span of the rows of `m`.
    pub fn row_span(m: &Matrix) -> Subspace {
        let r = m.rref();
        let basis = r.reduced.submatrix(0, 0, r.rank, m.cols());
        Subspace { ambient: m.cols(), basis, pivots: r.pivots }
    }

    /// Span of the columns of `m`.
    pub fn column_span(m: &Matrix) -> Subspace {
        Subspace::row_span(&m.transpose())
    }

    pub fn zero(field: &Field, n: usize) -> Subspace {
        Subspace { ambient: n, basis: Matrix::zeros(field, 0, n), pivots: vec![] }
    }

    pub fn full(field: &Field, n: usize) -> Subspace {
        Subspace::row_span(&Matrix::identity(field, n))
    }

    /// Kernel of `m` as a subspace of its column space domain.
    pub fn kernel_of(m: &Matrix) -> Subspace {
        Subspace::column_span(&m.kernel_matrix())
    }

    pub fn field(&self) -> &Field {
        self.basis.field()
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Canonical basis, one vector per row.
    pub fn basis_rows(&self) -> &Matrix {
        &self.basis
    }

    /// Canonical basis, one vector per column.
    pub fn basis_columns(&self) -> Matrix {
        self.basis.transpose()
    }

    pub fn contains_vector(&self, v: &Matrix) -> bool {
        let stacked = Matrix::vstack(&[&self.basis, &v.transpose()]).unwrap();
        stacked.rank() == self.dim()
    }

    pub fn contains(&self, other: &Subspace) -> bool {
        self.sum(other).dim() == self.dim()
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        Subspace::row_span(&Matrix::vstack(&[&self.basis, &other.basis]).unwrap())
    }

    /// Matrix `C` with `self = ker C`.
    pub fn constraints(&self) -> Matrix {
        self.basis.kernel_matrix().transpose()
    }

    pub fn intersect(&self, other: &Subspace) -> Subspace {
        let c = Matrix::vstack(&[&self.constraints(), &other.constraints()]).unwrap();
        Subspace::kernel_of(&c)
    }

    /// Image under a linear map given as a matrix acting on column vectors.
    pub fn image(&self, a: &Matrix) -> Subspace {
        if self.dim() == 0 {
            return Subspace::zero(a.field(), a.rows());
        }
        Subspace::column_span(&(a * &self.basis_columns()))
    }
}
