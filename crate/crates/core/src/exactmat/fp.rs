//! Compact matrices over small prime fields for exhaustive enumeration.

use super::matrix::Matrix;
use super::scalar::{Elem, Field};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FpMat {
    pub p: u32,
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<u32>,
}

pub fn inv_mod(a: u32, p: u32) -> u32 {
    let (mut b, mut e, mut acc) = (a as u64 % p as u64, p as u64 - 2, 1u64);
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p as u64;
        }
        b = b * b % p as u64;
        e >>= 1;
    }
    acc as u32
}

impl FpMat {
    pub fn zeros(p: u32, rows: usize, cols: usize) -> FpMat {
        FpMat { p, rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(p: u32, n: usize) -> FpMat {
        let mut m = FpMat::zeros(p, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    pub fn from_vec(p: u32, rows: usize, cols: usize, data: Vec<u32>) -> FpMat {
        debug_assert_eq!(data.len(), rows * cols);
        FpMat { p, rows, cols, data }
    }

    pub fn from_matrix(m: &Matrix) -> Result<FpMat> {
        let Field::Prime(p) = m.field() else {
            return Err(Error::NeedsFiniteField);
        };
        let data = m
            .entries()
            .iter()
            .map(|e| match e {
                Elem::Mod(v) => *v as u32,
                _ => unreachable!(),
            })
            .collect();
        Ok(FpMat { p: *p as u32, rows: m.rows(), cols: m.cols(), data })
    }

    pub fn to_matrix(&self) -> Matrix {
        let f = Field::Prime(self.p as u64);
        Matrix::from_fn(&f, self.rows, self.cols, |i, j| Elem::Mod(self.get(i, j) as u64))
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u32) {
        self.data[i * self.cols + j] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    pub fn mul(&self, other: &FpMat) -> FpMat {
        assert_eq!(self.cols, other.rows, "fp product shape");
        let p = self.p as u64;
        let mut out = FpMat::zeros(self.p, self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = 0u64;
                for k in 0..self.cols {
                    acc += self.get(i, k) as u64 * other.get(k, j) as u64;
                }
                out.data[i * other.cols + j] = (acc % p) as u32;
            }
        }
        out
    }

    pub fn add(&self, other: &FpMat) -> FpMat {
        let p = self.p;
        FpMat {
            p,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| (a + b) % p).collect(),
        }
    }

    pub fn sub(&self, other: &FpMat) -> FpMat {
        let p = self.p;
        FpMat {
            p,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| (a + p - b) % p).collect(),
        }
    }

    pub fn transpose(&self) -> FpMat {
        let mut out = FpMat::zeros(self.p, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j));
            }
        }
        out
    }

    /// In-place reduced row echelon form; returns the pivot columns.
    pub fn rref_in_place(&mut self) -> Vec<usize> {
        let p = self.p as u64;
        let (m, n) = (self.rows, self.cols);
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..n {
            if r == m {
                break;
            }
            let Some(piv) = (r..m).find(|&i| self.get(i, c) != 0) else {
                continue;
            };
            if piv != r {
                for j in 0..n {
                    self.data.swap(piv * n + j, r * n + j);
                }
            }
            let inv = inv_mod(self.get(r, c), self.p) as u64;
            for j in c..n {
                let v = self.get(r, j) as u64 * inv % p;
                self.set(r, j, v as u32);
            }
            for i in 0..m {
                if i == r {
                    continue;
                }
                let factor = self.get(i, c) as u64;
                if factor == 0 {
                    continue;
                }
                for j in c..n {
                    let v = (self.get(i, j) as u64 + p * p - factor * self.get(r, j) as u64) % p;
                    self.set(i, j, v as u32);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().rref_in_place().len()
    }
}

/// All `k`-dimensional subspaces of `F_p^n`, each as a `k x n` RREF basis.
/// Ordered by pivot set (lexicographic), then by free entries.
pub fn subspaces(p: u32, n: usize, k: usize) -> Vec<FpMat> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut piv: Vec<usize> = (0..k).collect();
    loop {
        // Free positions: row i, columns after piv[i] that are not pivots.
        let mut free = Vec::new();
        for (i, &pc) in piv.iter().enumerate() {
            for c in pc + 1..n {
                if !piv.contains(&c) {
                    free.push((i, c));
                }
            }
        }
        let mut vals = vec![0u32; free.len()];
        loop {
            let mut m = FpMat::zeros(p, k, n);
            for (i, &pc) in piv.iter().enumerate() {
                m.set(i, pc, 1);
            }
            for (t, &(i, c)) in free.iter().enumerate() {
                m.set(i, c, vals[t]);
            }
            out.push(m);
            let mut t = 0;
            while t < vals.len() {
                vals[t] += 1;
                if vals[t] < p {
                    break;
                }
                vals[t] = 0;
                t += 1;
            }
            if t == vals.len() {
                break;
            }
        }
        // Next combination.
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if piv[i] < n - k + i {
                piv[i] += 1;
                for j in i + 1..k {
                    piv[j] = piv[j - 1] + 1;
                }
                break;
            }
        }
        if k == 0 {
            return out;
        }
    }
}

/// Number of `k`-dimensional subspaces of `F_p^n` (Gaussian binomial).
pub fn gaussian_binomial(p: u64, n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for i in 0..k {
        num *= (p as u128).pow((n - i) as u32) - 1;
        den *= (p as u128).pow((i + 1) as u32) - 1;
    }
    num / den
}

/// Reduces `v` against an RREF basis; zero result means `v` is in the span.
pub fn in_span(basis: &FpMat, pivots: &[usize], v: &[u32]) -> bool {
    let p = basis.p as u64;
    let mut w: Vec<u64> = v.iter().map(|&x| x as u64).collect();
    for (row, &c) in pivots.iter().enumerate() {
        let factor = w[c];
        if factor == 0 {
            continue;
        }
        for j in 0..basis.cols {
            w[j] = (w[j] + p * p - factor * basis.get(row, j) as u64) % p;
        }
    }
    w.iter().all(|&x| x == 0)
}
