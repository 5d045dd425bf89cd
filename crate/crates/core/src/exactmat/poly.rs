//! Univariate polynomials over the rationals.

use std::fmt;

use num::{BigInt, BigRational, Integer, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Dense polynomial, coefficients stored from the constant term upwards.
/// The coefficient vector never ends in a zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Poly {
    coeffs: Vec<BigRational>,
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl Poly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Poly::new(coeffs.iter().map(|&c| rat(c)).collect())
    }

    pub fn zero() -> Self {
        Poly { coeffs: vec![] }
    }

    pub fn one() -> Self {
        Poly::constant(BigRational::one())
    }

    pub fn x() -> Self {
        Poly::from_ints(&[0, 1])
    }

    pub fn constant(c: BigRational) -> Self {
        Poly::new(vec![c])
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    /// Coefficient of `x^k`, zero past the degree.
    pub fn coeff(&self, k: usize) -> BigRational {
        self.coeffs.get(k).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> BigRational {
        self.coeffs.last().cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_one()
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let lead = self.leading();
        self.scale(&lead.recip())
    }

    pub fn scale(&self, c: &BigRational) -> Poly {
        Poly::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) + other.coeff(k)).collect())
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) - other.coeff(k)).collect())
    }

    pub fn neg(&self) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| -c).collect())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    /// Euclidean division. Panics on a zero divisor.
    pub fn div_rem(&self, d: &Poly) -> (Poly, Poly) {
        assert!(!d.is_zero(), "polynomial division by zero");
        let dd = d.coeffs.len() - 1;
        let lead_inv = d.leading().recip();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        let mut quot = vec![BigRational::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = &rem[k + dd] * &lead_inv;
            if c.is_zero() {
                continue;
            }
            for (j, b) in d.coeffs.iter().enumerate() {
                rem[k + j] -= &c * b;
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        (Poly::new(quot), Poly::new(rem))
    }

    pub fn rem(&self, d: &Poly) -> Poly {
        self.div_rem(d).1
    }

    /// Monic greatest common divisor (zero if both inputs vanish).
    pub fn gcd(&self, other: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Returns `(g, s, t)` with `s*self + t*other = g`, `g` monic.
    pub fn ext_gcd(&self, other: &Poly) -> (Poly, Poly, Poly) {
        let (mut r0, mut r1) = (self.clone(), other.clone());
        let (mut s0, mut s1) = (Poly::one(), Poly::zero());
        let (mut t0, mut t1) = (Poly::zero(), Poly::one());
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1);
            let s2 = s0.sub(&q.mul(&s1));
            let t2 = t0.sub(&q.mul(&t1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s2;
            t0 = t1;
            t1 = t2;
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let inv = r0.leading().recip();
        (r0.scale(&inv), s0.scale(&inv), t0.scale(&inv))
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * rat(k as i64))
                .collect(),
        )
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Product of the distinct monic irreducible factors.
    pub fn squarefree_part(&self) -> Poly {
        if self.degree().unwrap_or(0) == 0 {
            return self.monic();
        }
        let g = self.gcd(&self.derivative());
        self.div_rem(&g).0.monic()
    }

    /// Scales to a primitive integer polynomial with positive leading coefficient.
    pub fn primitive_integer(&self) -> Vec<BigInt> {
        if self.is_zero() {
            return vec![];
        }
        let lcm = self
            .coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let mut ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| (c * BigRational::from_integer(lcm.clone())).to_integer())
            .collect();
        let content = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
        let sign = if ints.last().unwrap().is_negative() { -1 } else { 1 };
        for c in ints.iter_mut() {
            *c = &*c / &content * sign;
        }
        ints
    }

    fn from_bigints(c: &[BigInt]) -> Poly {
        Poly::new(c.iter().map(|x| BigRational::from_integer(x.clone())).collect())
    }

    /// Distinct rational roots in increasing order.
    pub fn rational_roots(&self) -> Vec<BigRational> {
        if self.degree().unwrap_or(0) == 0 {
            return vec![];
        }
        let mut roots = Vec::new();
        let mut f = self.squarefree_part();
        if f.coeff(0).is_zero() {
            roots.push(BigRational::zero());
            f = f.div_rem(&Poly::x()).0;
        }
        if f.degree().unwrap_or(0) > 0 {
            let ints = f.primitive_integer();
            let a0 = ints[0].abs();
            let an = ints.last().unwrap().abs();
            let ps = divisors(&a0);
            let qs = divisors(&an);
            for p in &ps {
                for q in &qs {
                    for s in [1i64, -1] {
                        let cand = BigRational::new(p * BigInt::from(s), q.clone());
                        if f.eval(&cand).is_zero() && !roots.contains(&cand) {
                            roots.push(cand);
                        }
                    }
                }
            }
        }
        roots.sort();
        roots
    }

    /// Distinct monic irreducible factors over the rationals, sorted by
    /// degree and then coefficients.
    pub fn irreducible_factors(&self) -> Result<Vec<Poly>> {
        if self.degree().unwrap_or(0) == 0 {
            return Ok(vec![]);
        }
        let mut f = self.squarefree_part();
        let mut out = Vec::new();
        for r in f.rational_roots() {
            let lin = Poly::new(vec![-r, BigRational::one()]);
            f = f.div_rem(&lin).0;
            out.push(lin);
        }
        let mut stack = vec![f];
        while let Some(g) = stack.pop() {
            let d = g.degree().unwrap_or(0);
            if d == 0 {
                continue;
            }
            // No rational roots remain, so degree <= 3 means irreducible.
            if d <= 3 {
                out.push(g.monic());
                continue;
            }
            match kronecker_split(&g)? {
                Some((h, k)) => {
                    stack.push(h);
                    stack.push(k);
                }
                None => out.push(g.monic()),
            }
        }
        out.sort_by(|a, b| {
            a.degree()
                .cmp(&b.degree())
                .then_with(|| a.coeffs.cmp(&b.coeffs))
        });
        Ok(out)
    }

    pub fn is_irreducible(&self) -> Result<bool> {
        if self.degree().unwrap_or(0) == 0 {
            return Ok(false);
        }
        if self.squarefree_part().degree() != self.degree() {
            return Ok(false);
        }
        Ok(self.irreducible_factors()?.len() == 1)
    }

    /// Parses expressions such as `x^2 + 1`, `1/2*x - 3` or `-x^3+2x`.
    pub fn parse(s: &str) -> Result<Poly> {
        let src: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if src.is_empty() {
            return Err(Error::Parse("empty polynomial".into()));
        }
        let mut terms = Vec::new();
        let mut start = 0;
        let bytes = src.as_bytes();
        for i in 1..bytes.len() {
            if (bytes[i] == b'+' || bytes[i] == b'-') && bytes[i - 1] != b'^' && bytes[i - 1] != b'/' {
                terms.push(&src[start..i]);
                start = i;
            }
        }
        terms.push(&src[start..]);
        let mut acc = Poly::zero();
        for t in terms {
            acc = acc.add(&parse_term(t)?);
        }
        Ok(acc)
    }
}

fn parse_term(t: &str) -> Result<Poly> {
    let bad = || Error::Parse(format!("bad polynomial term '{t}'"));
    let (sign, body) = match t.as_bytes().first() {
        Some(b'+') => (1, &t[1..]),
        Some(b'-') => (-1, &t[1..]),
        _ => (1, t),
    };
    if body.is_empty() {
        return Err(bad());
    }
    let (coef_str, var_str) = match body.find('x') {
        Some(pos) => (&body[..pos], Some(&body[pos + 1..])),
        None => (body, None),
    };
    let coef_str = coef_str.strip_suffix('*').unwrap_or(coef_str);
    let coef = if coef_str.is_empty() {
        if var_str.is_none() {
            return Err(bad());
        }
        BigRational::one()
    } else {
        parse_rational(coef_str)?
    };
    let exp = match var_str {
        None => 0usize,
        Some("") => 1,
        Some(e) => e
            .strip_prefix('^')
            .and_then(|e| e.parse::<usize>().ok())
            .ok_or_else(bad)?,
    };
    let mut coeffs = vec![BigRational::zero(); exp + 1];
    coeffs[exp] = coef * rat(sign);
    Ok(Poly::new(coeffs))
}

/// Parses `p`, `-p` or `p/q` into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::Parse(format!("bad rational '{s}'"));
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// Renders `p/q`, or `p` for integers.
pub fn format_rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    let n = n.abs();
    if n.is_zero() {
        return vec![];
    }
    // Trial division factorisation; inputs here are small determinants.
    let mut primes: Vec<(BigInt, u32)> = Vec::new();
    let mut m = n.clone();
    let mut p = BigInt::from(2);
    while &p * &p <= m {
        let mut e = 0;
        while (&m % &p).is_zero() {
            m /= &p;
            e += 1;
        }
        if e > 0 {
            primes.push((p.clone(), e));
        }
        p += 1;
    }
    if m > BigInt::one() {
        primes.push((m, 1));
    }
    let mut divs = vec![BigInt::one()];
    for (p, e) in primes {
        let mut next = Vec::new();
        for d in &divs {
            let mut pk = BigInt::one();
            for _ in 0..=e {
                next.push(d * &pk);
                pk *= &p;
            }
        }
        divs = next;
    }
    divs.sort();
    divs
}

const KRONECKER_BUDGET: u128 = 2_000_000;

/// Kronecker's method: finds a nontrivial factorisation of a squarefree
/// polynomial without rational roots, or `None` if it is irreducible.
fn kronecker_split(g: &Poly) -> Result<Option<(Poly, Poly)>> {
    let ints = g.primitive_integer();
    let gi = Poly::from_bigints(&ints);
    let d = gi.degree().unwrap();
    // Points with small nonzero values keep divisor lists short.
    let mut pts: Vec<(i64, BigInt)> = (-12i64..=12)
        .map(|x| (x, gi.eval(&rat(x)).to_integer()))
        .filter(|(_, v)| !v.is_zero())
        .collect();
    pts.sort_by(|a, b| a.1.abs().cmp(&b.1.abs()).then(a.0.abs().cmp(&b.0.abs())));
    for m in 2..=d / 2 {
        let chosen = &pts[..m + 1];
        let divs: Vec<Vec<BigInt>> = chosen
            .iter()
            .enumerate()
            .map(|(i, (_, v))| {
                let pos = divisors(v);
                if i == 0 {
                    pos
                } else {
                    pos.iter().flat_map(|x| [x.clone(), -x]).collect()
                }
            })
            .collect();
        let total: u128 = divs.iter().map(|v| v.len() as u128).product();
        if total > KRONECKER_BUDGET {
            return Err(Error::TooLarge(format!(
                "factorisation of degree {d} polynomial needs {total} trials"
            )));
        }
        let xs: Vec<BigRational> = chosen.iter().map(|(x, _)| rat(*x)).collect();
        let mut idx = vec![0usize; m + 1];
        loop {
            let ys: Vec<BigRational> = (0..=m)
                .map(|i| BigRational::from_integer(divs[i][idx[i]].clone()))
                .collect();
            let h = interpolate(&xs, &ys);
            if h.degree() == Some(m) && h.coeffs.iter().all(|c| c.is_integer()) {
                let (q, r) = gi.div_rem(&h);
                if r.is_zero() && q.coeffs.iter().all(|c| c.is_integer()) {
                    return Ok(Some((h, q)));
                }
            }
            // Odometer increment.
            let mut k = 0;
            loop {
                if k > m {
                    break;
                }
                idx[k] += 1;
                if idx[k] < divs[k].len() {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
            if k > m {
                break;
            }
        }
    }
    Ok(None)
}

/// Lagrange interpolation through `(xs[i], ys[i])`.
pub fn interpolate(xs: &[BigRational], ys: &[BigRational]) -> Poly {
    let mut acc = Poly::zero();
    for (i, (xi, yi)) in xs.iter().zip(ys).enumerate() {
        if yi.is_zero() {
            continue;
        }
        let mut basis = Poly::one();
        let mut denom = BigRational::one();
        for (j, xj) in xs.iter().enumerate() {
            if i != j {
                basis = basis.mul(&Poly::new(vec![-xj.clone(), BigRational::one()]));
                denom *= xi - xj;
            }
        }
        acc = acc.add(&basis.scale(&(yi / denom)));
    }
    acc
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let cs = format_rational(&a);
            match k {
                0 => write!(f, "{cs}")?,
                _ => {
                    if !a.is_one() {
                        write!(f, "{cs}*")?;
                    }
                    if k == 1 {
                        write!(f, "x")?;
                    } else {
                        write!(f, "x^{k}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

/// Small helper for tests and callers holding machine integers.
pub fn to_i64(q: &BigRational) -> Option<i64> {
    if q.is_integer() {
        q.numer().to_i64()
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display_round_trip() {
        for s in ["x^2 + 1", "1/2*x - 3", "-x^3 + 2*x", "7", "x"] {
            let p = Poly::parse(s).unwrap();
            assert_eq!(p.to_string(), s);
        }
        assert_eq!(Poly::parse("2x+x").unwrap(), Poly::from_ints(&[0, 3]));
        assert!(Poly::parse("x^").is_err());
    }

    #[test]
    fn division_identity() {
        let a = Poly::from_ints(&[1, -2, 0, 3, 5]);
        let b = Poly::from_ints(&[2, 0, 1]);
        let (q, r) = a.div_rem(&b);
        assert_eq!(q.mul(&b).add(&r), a);
        assert!(r.degree().unwrap() < 2);
    }

    #[test]
    fn ext_gcd_bezout() {
        let a = Poly::from_ints(&[-1, 0, 1]);
        let b = Poly::from_ints(&[1, 1]);
        let (g, s, t) = a.ext_gcd(&b);
        assert_eq!(g, Poly::from_ints(&[1, 1]));
        assert_eq!(s.mul(&a).add(&t.mul(&b)), g);
    }

    #[test]
    fn rational_roots_found() {
        // (2x - 1)(x + 3)(x^2 + 1)
        let p = Poly::from_ints(&[-1, 2])
            .mul(&Poly::from_ints(&[3, 1]))
            .mul(&Poly::from_ints(&[1, 0, 1]));
        let roots = p.rational_roots();
        assert_eq!(roots, vec![rat(-3), BigRational::new(1.into(), 2.into())]);
    }

    #[test]
    fn factors_quartic_product() {
        // (x^2 + 1)(x^2 - 2) has no rational roots but splits.
        let p = Poly::from_ints(&[1, 0, 1]).mul(&Poly::from_ints(&[-2, 0, 1]));
        let f = p.irreducible_factors().unwrap();
        assert_eq!(f, vec![Poly::from_ints(&[-2, 0, 1]), Poly::from_ints(&[1, 0, 1])]);
        assert!(!p.is_irreducible().unwrap());
        assert!(Poly::from_ints(&[1, 0, 0, 0, 1]).is_irreducible().unwrap());
        assert!(Poly::from_ints(&[-2, 0, 0, 1]).is_irreducible().unwrap());
    }

    #[test]
    fn squarefree_drops_multiplicity() {
        let p = Poly::from_ints(&[1, 1]).mul(&Poly::from_ints(&[1, 1])).mul(&Poly::x());
        assert_eq!(p.squarefree_part(), Poly::from_ints(&[0, 1, 1]));
    }
}
