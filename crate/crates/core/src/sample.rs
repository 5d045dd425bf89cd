//! Seeded samplers. Every sampler draws from a caller-supplied RNG; the CLI
//! uses `ChaCha8Rng::seed_from_u64` so that a seed pins the output on every
//! platform.

use rand::Rng;

use crate::adhm_p2::AdhmP2;
use crate::error::{Error, Result};
use crate::exactmat::{Elem, Field, Matrix};
use crate::flag::FlagRep;
use crate::minimal::{invariants, GkElement, MinimalPoint};
use crate::surfaces::HirzRank1;

/// Entries are drawn uniformly from `[-SMALL, SMALL]`.
pub const SMALL: i64 = 3;
const MAX_ATTEMPTS: usize = 1000;

pub fn small<R: Rng + ?Sized>(field: &Field, rng: &mut R) -> Elem {
    field.from_i64(rng.gen_range(-SMALL..=SMALL))
}

pub fn random_matrix<R: Rng + ?Sized>(field: &Field, rows: usize, cols: usize, rng: &mut R) -> Matrix {
    Matrix::from_fn(field, rows, cols, |_, _| small(field, rng))
}

pub fn random_invertible<R: Rng + ?Sized>(field: &Field, n: usize, rng: &mut R) -> Matrix {
    loop {
        let m = random_matrix(field, n, n, rng);
        if m.is_invertible() {
            return m;
        }
    }
}

/// Random matrix of full column rank (`rows >= cols`).
pub fn random_injective<R: Rng + ?Sized>(field: &Field, rows: usize, cols: usize, rng: &mut R) -> Matrix {
    assert!(rows >= cols);
    loop {
        let m = random_matrix(field, rows, cols, rng);
        if m.rank() == cols {
            return m;
        }
    }
}

/// `L U` with unit lower and upper triangular factors; always invertible.
pub fn random_unimodular<R: Rng + ?Sized>(field: &Field, n: usize, rng: &mut R) -> Matrix {
    let tri = |rng: &mut R, lower: bool| {
        Matrix::from_fn(field, n, n, |i, j| {
            if i == j {
                field.one()
            } else if (i > j) == lower {
                small(field, rng)
            } else {
                field.zero()
            }
        })
    };
    let l = tri(rng, true);
    let u = tri(rng, false);
    &l * &u
}

/// Matrix of a linear map `F^nvars -> F^m` given as a function; column `t`
/// is the image of the `t`-th unit vector.
pub fn linear_map_matrix(field: &Field, nvars: usize, lin: impl Fn(&[Elem]) -> Vec<Elem>) -> Matrix {
    let cols: Vec<Vec<Elem>> = (0..nvars)
        .map(|t| {
            let unit: Vec<Elem> = (0..nvars).map(|s| if s == t { field.one() } else { field.zero() }).collect();
            lin(&unit)
        })
        .collect();
    let rows = cols.first().map_or(0, Vec::len);
    Matrix::from_fn(field, rows, nvars, |i, j| cols[j][i].clone())
}

/// Random element of the kernel of a linear map given as a function.
pub fn random_kernel_element<R: Rng + ?Sized>(
    field: &Field,
    nvars: usize,
    lin: impl Fn(&[Elem]) -> Vec<Elem>,
    rng: &mut R,
) -> Vec<Elem> {
    let ker = linear_map_matrix(field, nvars, lin).kernel_matrix();
    let coeffs = random_matrix(field, ker.cols(), 1, rng);
    let x = &ker * &coeffs;
    (0..nvars).map(|i| x.get(i, 0).clone()).collect()
}

fn flatten(ms: &[&Matrix]) -> Vec<Elem> {
    ms.iter().flat_map(|m| m.entries().iter().cloned()).collect()
}

fn take(field: &Field, xs: &[Elem], at: &mut usize, rows: usize, cols: usize) -> Matrix {
    let m = Matrix::from_vec(field, rows, cols, xs[*at..*at + rows * cols].to_vec()).unwrap();
    *at += rows * cols;
    m
}

/// Stable P² quadruple on the moment locus: random `B1`, `i`, then a random
/// solution `(B2, j)` of the linear equation `[B1, B2] + i j = 0`, resampled
/// until `Im i` generates.
pub fn sample_p2<R: Rng + ?Sized>(field: &Field, r: usize, c: usize, rng: &mut R) -> Result<AdhmP2> {
    if r == 0 {
        return Err(Error::ShapeError("r must be positive".into()));
    }
    for _ in 0..MAX_ATTEMPTS {
        let b1 = random_matrix(field, c, c, rng);
        let i = random_matrix(field, c, r, rng);
        let lin = |x: &[Elem]| {
            let mut at = 0;
            let b2 = take(field, x, &mut at, c, c);
            let j = take(field, x, &mut at, r, c);
            flatten(&[&(&b1.commutator(&b2) + &(&i * &j))])
        };
        let x = random_kernel_element(field, c * c + r * c, lin, rng);
        let mut at = 0;
        let b2 = take(field, &x, &mut at, c, c);
        let j = take(field, &x, &mut at, r, c);
        let d = AdhmP2::new(r, c, b1, b2, i, j)?;
        if d.stability_closure().1 {
            return Ok(d);
        }
    }
    Err(Error::TooLarge("no stable P² datum found".into()))
}

/// Rank-1 Hirzebruch datum satisfying (P1)-(P3): commuting `B1`,
/// `B2 = poly(B1)`, invertible `A2`, `A1 = A2 B1`, `C1 = B2 A2⁻¹`,
/// `C_{q+1} = B1 C_q`, then moved by a random `(φ1, φ2)`.
pub fn sample_hirz1<R: Rng + ?Sized>(field: &Field, n: usize, c: usize, rng: &mut R) -> Result<HirzRank1> {
    if n == 0 {
        return Err(Error::ShapeError("n must be positive".into()));
    }
    for _ in 0..MAX_ATTEMPTS {
        let b1 = random_matrix(field, c, c, rng);
        let mut b2 = Matrix::zeros(field, c, c);
        let mut pw = Matrix::identity(field, c);
        for _ in 0..c.max(1) {
            b2 = &b2 + &pw.scale(&small(field, rng));
            pw = &pw * &b1;
        }
        let a2 = random_invertible(field, c, rng);
        let a2i = a2.inverse().unwrap();
        let mut cs = vec![&b2 * &a2i];
        for q in 1..n {
            let next = &b1 * &cs[q - 1];
            cs.push(next);
        }
        let e = random_matrix(field, 1, c, rng);
        let d = HirzRank1::new(n, c, &a2 * &b1, a2, cs, e)?;
        if !d.check_p2()? || !d.check_p3()? {
            continue;
        }
        let phi1 = random_invertible(field, c, rng);
        let phi2 = random_invertible(field, c, rng);
        return d.hirz_action(&phi1, &phi2);
    }
    Err(Error::TooLarge("no (P1)-(P3) datum found".into()))
}

/// Point of the minimal-case moduli space with small-integer `b` and a
/// random unimodular `θ`.
pub fn sample_minimal<R: Rng + ?Sized>(field: &Field, n: usize, r: usize, a: usize, rng: &mut R) -> Result<MinimalPoint> {
    let b = (1..n).map(|_| random_matrix(field, a, r - a, rng)).collect();
    MinimalPoint::new(n, r, a, b, random_unimodular(field, r, rng))
}

/// Nonemptiness gate: `c + n a(a-1)/2 >= 0`.
pub fn check_nonempty(n: usize, r: usize, a: usize, c: i64) -> Result<()> {
    let inv = invariants(n, r, a, c)?;
    if !inv.nonempty {
        return Err(Error::InvalidInvariants(format!(
            "moduli space is empty: c + n a(a-1)/2 = {} < 0",
            inv.k[0]
        )));
    }
    Ok(())
}

/// Random `G_k` element with entries in `[-3, 3]` and invertible diagonal blocks.
pub fn random_gk<R: Rng + ?Sized>(field: &Field, n: usize, r: usize, a: usize, rng: &mut R) -> GkElement {
    GkElement {
        psi11: random_invertible(field, n * a, rng),
        psi12: (0..n).map(|_| random_matrix(field, n * a, r - a, rng)).collect(),
        psi22: random_invertible(field, r - a, rng),
        chi: random_invertible(field, (n - 1) * a, rng),
    }
}

fn check_chain(d: usize, u: usize, v: &[usize]) -> Result<()> {
    if v.is_empty() || v.len() != d {
        return Err(Error::ShapeError(format!("need {d} dimensions")));
    }
    let mut chain = vec![u];
    chain.extend(v);
    if chain.windows(2).any(|w| w[1] == 0 || w[1] >= w[0]) {
        return Err(Error::ShapeError(format!("dimensions {u} > {v:?} > 0 must strictly decrease")));
    }
    Ok(())
}

/// The flag representation with given `e`, `A` and `(f, B)` read from the
/// flat coordinate vector `tail` (all `f_q`, then `B_pq` by `p` then `q`,
/// each row-major).
pub fn flag_with_tail(n: usize, u: usize, v: &[usize], e: &Matrix, a: &[Matrix], tail: &[Elem]) -> Result<FlagRep> {
    let d = v.len();
    check_chain(d, u, v)?;
    let field = e.field();
    if tail.len() != flag_tail_len(n, u, v) {
        return Err(Error::ShapeError(format!("tail needs {} coordinates", flag_tail_len(n, u, v))));
    }
    let mut at = 0;
    let f: Vec<Matrix> = (1..n).map(|_| take(field, tail, &mut at, v[0], u)).collect();
    let b: Vec<Vec<Matrix>> = (1..d).map(|p| (1..n).map(|_| take(field, tail, &mut at, v[p], v[p - 1])).collect()).collect();
    FlagRep::new(d, n, u, v.to_vec(), e.clone(), f, a.to_vec(), b)
}

pub fn flag_tail_len(n: usize, u: usize, v: &[usize]) -> usize {
    (n - 1) * (v[0] * u + (1..v.len()).map(|p| v[p] * v[p - 1]).sum::<usize>())
}

/// Basis (as columns) of the `(f, B)` making `(e, f, A, B)` satisfy the flag
/// relations; the relations are linear in `(f, B)` once `e`, `A` are fixed.
pub fn flag_relation_kernel(n: usize, u: usize, v: &[usize], e: &Matrix, a: &[Matrix]) -> Result<Matrix> {
    flag_with_tail(n, u, v, e, a, &vec![e.field().zero(); flag_tail_len(n, u, v)])?;
    let lin = |x: &[Elem]| {
        let rep = flag_with_tail(n, u, v, e, a, x).unwrap();
        flatten(&rep.check_flag_relations().iter().collect::<Vec<_>>())
    };
    Ok(linear_map_matrix(e.field(), flag_tail_len(n, u, v), lin).kernel_matrix())
}

/// Relation-satisfying representation of `Q_{d,n}`: injective `e` and `A_p`,
/// then a random solution `(f, B)` of the relations.
pub fn sample_flag<R: Rng + ?Sized>(field: &Field, d: usize, n: usize, u: usize, v: &[usize], rng: &mut R) -> Result<FlagRep> {
    check_chain(d, u, v)?;
    let e = random_injective(field, u, v[0], rng);
    let a: Vec<Matrix> = (1..d).map(|p| random_injective(field, v[p - 1], v[p], rng)).collect();
    let ker = flag_relation_kernel(n, u, v, &e, &a)?;
    let x = &ker * &random_matrix(field, ker.cols(), 1, rng);
    let tail: Vec<Elem> = (0..x.rows()).map(|i| x.get(i, 0).clone()).collect();
    flag_with_tail(n, u, v, &e, &a, &tail)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn samplers_land_in_their_varieties() {
        let q = Field::Rational;
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let d = sample_p2(&q, 2, 2, &mut rng).unwrap();
        assert!(d.moment_residual().is_zero() && d.stability_closure().1);
        let h = sample_hirz1(&q, 2, 2, &mut rng).unwrap();
        assert!(h.p1_holds() && h.check_p2().unwrap() && h.check_p3().unwrap());
        let f = sample_flag(&Field::prime(3).unwrap(), 2, 3, 3, &[2, 1], &mut rng).unwrap();
        assert!(f.relations_hold() && f.stable_thetaplus().unwrap());
        assert!(check_nonempty(1, 2, 1, -1).is_err());
        assert!(check_nonempty(2, 3, 2, -2).is_ok());
    }
}
