//! ADHM quadruples `(B1, B2, i, j)` for framed sheaves on the plane.

use num::{BigRational, Signed, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exactmat::fp::FpMat;
use crate::exactmat::json::{matrix_from_json, matrix_to_json};
use crate::exactmat::{Field, Matrix, Subspace};
use crate::quiver::{Quiver, CB_VERTEX};
use crate::repstab::{Representation, StabilityReport, Verdict};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdhmP2 {
    pub r: usize,
    pub c: usize,
    pub b1: Matrix,
    pub b2: Matrix,
    /// `c x r`
    pub i: Matrix,
    /// `r x c`
    pub j: Matrix,
}

impl AdhmP2 {
    pub fn new(r: usize, c: usize, b1: Matrix, b2: Matrix, i: Matrix, j: Matrix) -> Result<AdhmP2> {
        if r == 0 {
            return Err(Error::ShapeError("r must be positive".into()));
        }
        for (name, m, shape) in [("B1", &b1, (c, c)), ("B2", &b2, (c, c)), ("i", &i, (c, r)), ("j", &j, (r, c))] {
            if m.shape() != shape {
                return Err(Error::ShapeError(format!("{name} is {:?}, expected {:?}", m.shape(), shape)));
            }
            if m.field() != b1.field() {
                return Err(Error::FieldMismatch(format!("{name} over {}", m.field())));
            }
        }
        Ok(AdhmP2 { r, c, b1, b2, i, j })
    }

    pub fn field(&self) -> &Field {
        self.b1.field()
    }

    /// `[B1, B2] + i j`.
    pub fn moment_residual(&self) -> Matrix {
        &self.b1.commutator(&self.b2) + &(&self.i * &self.j)
    }

    /// Smallest `{B1, B2}`-invariant subspace containing `Im i`.
    pub fn closure(&self) -> Subspace {
        let mut s = Subspace::column_span(&self.i);
        loop {
            let next = s.sum(&s.image(&self.b1)).sum(&s.image(&self.b2));
            if next.dim() == s.dim() {
                return s;
            }
            s = next;
        }
    }

    /// `(dim closure, closure == C^c)`.
    pub fn stability_closure(&self) -> (usize, bool) {
        let d = self.closure().dim();
        (d, d == self.c)
    }

    /// Largest `{B1, B2}`-invariant subspace inside `ker j`.
    pub fn costable_obstruction(&self) -> Subspace {
        let mut cons = Subspace::row_span(&self.j);
        loop {
            let rows = cons.basis_rows();
            let next = Subspace::row_span(
                &Matrix::vstack(&[rows, &(rows * &self.b1), &(rows * &self.b2)]).unwrap(),
            );
            if next.dim() == cons.dim() {
                return Subspace::kernel_of(&next.basis_rows().clone());
            }
            cons = next;
        }
    }

    /// `(g B1 g⁻¹, g B2 g⁻¹, g i, j g⁻¹)`.
    pub fn gl_action(&self, g: &Matrix) -> Result<AdhmP2> {
        if g.shape() != (self.c, self.c) {
            return Err(Error::ShapeError("g must be c x c".into()));
        }
        let gi = g.inverse().ok_or(Error::SingularGroupElement)?;
        AdhmP2::new(
            self.r,
            self.c,
            &(g * &self.b1) * &gi,
            &(g * &self.b2) * &gi,
            g * &self.i,
            &self.j * &gi,
        )
    }

    /// For `r = 1` stable points of the moment equation: `j = 0` and the
    /// `B`'s commute.
    pub fn rank1_hilbert_check(&self) -> Result<bool> {
        if self.r != 1 {
            return Err(Error::NotInVariety("rank-1 check needs r = 1".into()));
        }
        if !self.moment_residual().is_zero() {
            return Err(Error::NotInVariety("moment residual is nonzero".into()));
        }
        if !self.stability_closure().1 {
            return Err(Error::NotInVariety("datum is not stable".into()));
        }
        Ok(self.j.is_zero() && self.b1.commutator(&self.b2).is_zero())
    }

    /// `dim ker dμ - rank(orbit map)` at this point.
    pub fn tangent_dim(&self) -> usize {
        let f = self.field().clone();
        let (c, r) = (self.c, self.r);
        let blocks = [(c, c), (c, c), (c, r), (r, c)];
        let n: usize = blocks.iter().map(|(a, b)| a * b).sum();
        // Columns of dμ, one per coordinate direction.
        let mut cols = Vec::with_capacity(n);
        for (k, &(rows, ncols)) in blocks.iter().enumerate() {
            for jj in 0..ncols {
                for ii in 0..rows {
                    let unit = Matrix::zeros(&f, rows, ncols).with_entry(ii, jj, f.one());
                    let img = match k {
                        0 => unit.commutator(&self.b2),
                        1 => self.b1.commutator(&unit),
                        2 => &unit * &self.j,
                        _ => &self.i * &unit,
                    };
                    cols.push(Matrix::column(&f, img.vec_col_major()));
                }
            }
        }
        let dmu = Matrix::hstack(&cols.iter().collect::<Vec<_>>()).unwrap();
        let ker = n - dmu.rank();
        let mut orbit = Vec::with_capacity(c * c);
        for jj in 0..c {
            for ii in 0..c {
                let xi = Matrix::zeros(&f, c, c).with_entry(ii, jj, f.one());
                let mut v = xi.commutator(&self.b1).vec_col_major();
                v.extend(xi.commutator(&self.b2).vec_col_major());
                v.extend((&xi * &self.i).vec_col_major());
                v.extend((-&(&self.j * &xi)).vec_col_major());
                orbit.push(Matrix::column(&f, v));
            }
        }
        let orbit_rank =
            if orbit.is_empty() { 0 } else { Matrix::hstack(&orbit.iter().collect::<Vec<_>>()).unwrap().rank() };
        ker - orbit_rank
    }

    /// As a representation of the framed double Jordan quiver:
    /// `B = B1`, `B* = B2`, `d_0 = j`, `d_0* = i`.
    pub fn to_representation(&self) -> Representation {
        Representation::new(
            p2_quiver(),
            self.field().clone(),
            vec![self.c, self.r],
            vec![self.b1.clone(), self.j.clone(), self.b2.clone(), self.i.clone()],
        )
        .unwrap()
    }

    pub fn from_representation(rep: &Representation) -> Result<AdhmP2> {
        if rep.quiver() != &p2_quiver() {
            return Err(Error::PathError("not a framed double Jordan quiver".into()));
        }
        AdhmP2::new(
            rep.dim("0'")?,
            rep.dim("0")?,
            rep.map("B")?.clone(),
            rep.map("B*")?.clone(),
            rep.map("d_0*")?.clone(),
            rep.map("d_0")?.clone(),
        )
    }

    pub fn to_json(&self) -> Value {
        json!({
            "r": self.r,
            "c": self.c,
            "B1": matrix_to_json(&self.b1),
            "B2": matrix_to_json(&self.b2),
            "i": matrix_to_json(&self.i),
            "j": matrix_to_json(&self.j),
        })
    }

    pub fn from_json(v: &Value) -> Result<AdhmP2> {
        let n = |k: &str| {
            v.get(k)
                .and_then(Value::as_u64)
                .map(|x| x as usize)
                .ok_or_else(|| Error::Parse(format!("missing integer \"{k}\"")))
        };
        let m = |k: &str| matrix_from_json(v.get(k).ok_or_else(|| Error::Parse(format!("missing \"{k}\"")))?);
        AdhmP2::new(n("r")?, n("c")?, m("B1")?, m("B2")?, m("i")?, m("j")?)
    }
}

/// Framed double of the Jordan quiver.
pub fn p2_quiver() -> Quiver {
    Quiver::jordan().framed().double()
}

/// Closure criteria for `θ ≠ 0` on the plane quiver: for `θ < 0` stable iff
/// `Im i` generates, for `θ > 0` stable iff no nonzero invariant subspace
/// lies in `ker j`. Strict semistability cannot occur.
pub fn structural_stability(
    rep: &Representation,
    framing: &[String],
    theta: &[BigRational],
) -> Result<Option<StabilityReport>> {
    if rep.quiver() != &p2_quiver() || framing != ["0'".to_string()] || theta[0].is_zero() {
        return Ok(None);
    }
    let d = AdhmP2::from_representation(rep)?;
    let f = d.field().clone();
    let report = if theta[0].is_negative() {
        let s = d.closure();
        if s.dim() == d.c {
            None
        } else {
            Some((s, Subspace::full(&f, 1), "Im i generates a proper invariant subspace"))
        }
    } else {
        let s = d.costable_obstruction();
        if s.dim() == 0 {
            None
        } else {
            Some((s, Subspace::zero(&f, 1), "nonzero invariant subspace inside ker j"))
        }
    };
    Ok(Some(match report {
        None => StabilityReport { verdict: Verdict::Stable, witness: None, reason: None, method: "closure" },
        Some((s, inf, why)) => StabilityReport {
            verdict: Verdict::Unstable,
            witness: Some(vec![("0".into(), s), (CB_VERTEX.into(), inf)]),
            reason: Some(why.into()),
            method: "closure",
        },
    }))
}

fn fp_closure_full(b1: &FpMat, b2: &FpMat, i: &FpMat) -> bool {
    let c = b1.rows;
    let mut s = i.clone();
    let mut rank = s.rank();
    loop {
        if rank == c {
            return true;
        }
        let stacked = [s.clone(), b1.mul(&s), b2.mul(&s)];
        let cols: usize = stacked.iter().map(|m| m.cols).sum();
        let mut next = FpMat::zeros(s.p, c, cols);
        let mut off = 0;
        for m in &stacked {
            for r in 0..c {
                for k in 0..m.cols {
                    next.set(r, off + k, m.get(r, k));
                }
            }
            off += m.cols;
        }
        let nr = next.rank();
        if nr == rank {
            return false;
        }
        rank = nr;
        s = next;
    }
}

/// Outcome of the exhaustive rank-1 sweep.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Rank1Sweep {
    pub quadruples: u64,
    pub stable_solutions: u64,
    pub exceptions: u64,
}

/// Enumerates every `r = 1` quadruple over `F_p` of size `c`; counts stable
/// solutions of the moment equation and those violating `j = 0` or
/// `[B1, B2] = 0` (checked exactly through [`AdhmP2::rank1_hilbert_check`]).
pub fn rank1_sweep(p: u64, c: usize) -> Result<Rank1Sweep> {
    let field = Field::prime(p)?;
    let p32 = p as u32;
    let n = 2 * c * c + 2 * c;
    let total = (p as u128).pow(n as u32);
    if total > 100_000_000 {
        return Err(Error::TooLarge(format!("{total} quadruples")));
    }
    let mut out = Rank1Sweep::default();
    let mut digits = vec![0u32; n];
    loop {
        out.quadruples += 1;
        let b1 = FpMat::from_vec(p32, c, c, digits[..c * c].to_vec());
        let b2 = FpMat::from_vec(p32, c, c, digits[c * c..2 * c * c].to_vec());
        let i = FpMat::from_vec(p32, c, 1, digits[2 * c * c..2 * c * c + c].to_vec());
        let j = FpMat::from_vec(p32, 1, c, digits[2 * c * c + c..].to_vec());
        let mu = b1.mul(&b2).sub(&b2.mul(&b1)).add(&i.mul(&j));
        if mu.is_zero() && fp_closure_full(&b1, &b2, &i) {
            out.stable_solutions += 1;
            let d = AdhmP2::new(1, c, b1.to_matrix(), b2.to_matrix(), i.to_matrix(), j.to_matrix())?;
            debug_assert_eq!(d.field(), &field);
            if !d.rank1_hilbert_check()? {
                out.exceptions += 1;
            }
        }
        let mut k = 0;
        while k < n {
            digits[k] += 1;
            if digits[k] < p32 {
                break;
            }
            digits[k] = 0;
            k += 1;
        }
        if k == n {
            return Ok(out);
        }
    }
}
