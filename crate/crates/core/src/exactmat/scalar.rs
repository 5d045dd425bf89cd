//! Exact fields and their elements.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};

use super::poly::{format_rational, parse_rational, Poly};
use crate::error::{Error, Result};

/// A simple algebraic extension Q[x]/(f) with `f` monic and irreducible.
#[derive(Debug, PartialEq, Eq, Hash)]
pub struct NumberField {
    modulus: Poly,
}

impl NumberField {
    pub fn new(modulus: Poly) -> Result<Arc<NumberField>> {
        let deg = modulus.degree().unwrap_or(0);
        if deg < 2 {
            return Err(Error::Parse(format!("extension modulus '{modulus}' has degree < 2")));
        }
        if !modulus.is_monic() {
            return Err(Error::Parse(format!("extension modulus '{modulus}' is not monic")));
        }
        if !modulus.is_irreducible()? {
            return Err(Error::Parse(format!("extension modulus '{modulus}' is reducible")));
        }
        Ok(Arc::new(NumberField { modulus }))
    }

    pub fn modulus(&self) -> &Poly {
        &self.modulus
    }

    pub fn degree(&self) -> usize {
        self.modulus.degree().unwrap()
    }

    fn pack(&self, p: &Poly) -> Vec<BigRational> {
        let r = p.rem(&self.modulus);
        (0..self.degree()).map(|k| r.coeff(k)).collect()
    }

    fn unpack(v: &[BigRational]) -> Poly {
        Poly::new(v.to_vec())
    }
}

/// The coefficient field of a matrix.
#[derive(Clone, Debug)]
pub enum Field {
    Rational,
    Prime(u64),
    Extension(Arc<NumberField>),
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Field::Rational, Field::Rational) => true,
            (Field::Prime(p), Field::Prime(q)) => p == q,
            (Field::Extension(a), Field::Extension(b)) => Arc::ptr_eq(a, b) || a.modulus == b.modulus,
            _ => false,
        }
    }
}

impl Eq for Field {}

/// Raw field element; meaningful only together with its [`Field`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Elem {
    Rat(BigRational),
    Mod(u64),
    Alg(Vec<BigRational>),
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn mod_pow(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = ((acc as u128 * b as u128) % p as u128) as u64;
        }
        b = ((b as u128 * b as u128) % p as u128) as u64;
        e >>= 1;
    }
    acc
}

fn bigint_mod(n: &BigInt, p: u64) -> u64 {
    let r = n % BigInt::from(p);
    let r = if r.is_negative() { r + BigInt::from(p) } else { r };
    r.to_u64().unwrap()
}

impl Field {
    pub fn prime(p: u64) -> Result<Field> {
        if !is_prime(p) {
            return Err(Error::Parse(format!("modulus {p} is not prime")));
        }
        if p >= 1 << 32 {
            return Err(Error::Parse(format!("modulus {p} exceeds 32 bits")));
        }
        Ok(Field::Prime(p))
    }

    pub fn extension(modulus: Poly) -> Result<Field> {
        Ok(Field::Extension(NumberField::new(modulus)?))
    }

    /// Parses `Q`, `Fp:<p>` or `ext:<poly>`.
    pub fn parse(s: &str) -> Result<Field> {
        let s = s.trim();
        if s == "Q" {
            Ok(Field::Rational)
        } else if let Some(p) = s.strip_prefix("Fp:") {
            let p: u64 = p.trim().parse().map_err(|_| Error::Parse(format!("bad field '{s}'")))?;
            Field::prime(p)
        } else if let Some(f) = s.strip_prefix("ext:") {
            Field::extension(Poly::parse(f)?)
        } else {
            Err(Error::Parse(format!("unknown field tag '{s}'")))
        }
    }

    pub fn characteristic(&self) -> u64 {
        match self {
            Field::Prime(p) => *p,
            _ => 0,
        }
    }

    pub fn zero(&self) -> Elem {
        match self {
            Field::Rational => Elem::Rat(BigRational::zero()),
            Field::Prime(_) => Elem::Mod(0),
            Field::Extension(k) => Elem::Alg(vec![BigRational::zero(); k.degree()]),
        }
    }

    pub fn one(&self) -> Elem {
        self.from_i64(1)
    }

    pub fn from_i64(&self, n: i64) -> Elem {
        match self {
            Field::Rational => Elem::Rat(BigRational::from_integer(n.into())),
            Field::Prime(p) => Elem::Mod(n.rem_euclid(*p as i64) as u64),
            Field::Extension(k) => {
                let mut v = vec![BigRational::zero(); k.degree()];
                v[0] = BigRational::from_integer(n.into());
                Elem::Alg(v)
            }
        }
    }

    /// Image of a rational number; fails in characteristic p when p divides the denominator.
    pub fn from_rational(&self, q: &BigRational) -> Result<Elem> {
        match self {
            Field::Rational => Ok(Elem::Rat(q.clone())),
            Field::Prime(p) => {
                let d = bigint_mod(q.denom(), *p);
                if d == 0 {
                    return Err(Error::FieldMismatch(format!(
                        "denominator of {} vanishes mod {p}",
                        format_rational(q)
                    )));
                }
                let n = bigint_mod(q.numer(), *p);
                Ok(Elem::Mod(((n as u128 * mod_pow(d, p - 2, *p) as u128) % *p as u128) as u64))
            }
            Field::Extension(k) => {
                let mut v = vec![BigRational::zero(); k.degree()];
                v[0] = q.clone();
                Ok(Elem::Alg(v))
            }
        }
    }

    /// Image of a polynomial in the generator (extension fields only).
    pub fn from_poly(&self, p: &Poly) -> Result<Elem> {
        match self {
            Field::Extension(k) => Ok(Elem::Alg(k.pack(p))),
            _ => match p.degree() {
                None => Ok(self.zero()),
                Some(0) => self.from_rational(&p.coeff(0)),
                _ => Err(Error::FieldMismatch(format!("'{p}' is not a constant"))),
            },
        }
    }

    /// The generator x of Q[x]/(f).
    pub fn generator(&self) -> Option<Elem> {
        match self {
            Field::Extension(k) => Some(Elem::Alg(k.pack(&Poly::x()))),
            _ => None,
        }
    }

    pub fn is_zero(&self, a: &Elem) -> bool {
        match a {
            Elem::Rat(q) => q.is_zero(),
            Elem::Mod(v) => *v == 0,
            Elem::Alg(v) => v.iter().all(|c| c.is_zero()),
        }
    }

    pub fn is_one(&self, a: &Elem) -> bool {
        *a == self.one()
    }

    pub fn add(&self, a: &Elem, b: &Elem) -> Elem {
        match (self, a, b) {
            (Field::Rational, Elem::Rat(x), Elem::Rat(y)) => Elem::Rat(x + y),
            (Field::Prime(p), Elem::Mod(x), Elem::Mod(y)) => Elem::Mod((x + y) % p),
            (Field::Extension(_), Elem::Alg(x), Elem::Alg(y)) => {
                Elem::Alg(x.iter().zip(y).map(|(u, v)| u + v).collect())
            }
            _ => panic!("element does not belong to field {self}"),
        }
    }

    pub fn neg(&self, a: &Elem) -> Elem {
        match (self, a) {
            (Field::Rational, Elem::Rat(x)) => Elem::Rat(-x),
            (Field::Prime(p), Elem::Mod(x)) => Elem::Mod((p - x) % p),
            (Field::Extension(_), Elem::Alg(x)) => Elem::Alg(x.iter().map(|u| -u).collect()),
            _ => panic!("element does not belong to field {self}"),
        }
    }

    pub fn sub(&self, a: &Elem, b: &Elem) -> Elem {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &Elem, b: &Elem) -> Elem {
        match (self, a, b) {
            (Field::Rational, Elem::Rat(x), Elem::Rat(y)) => Elem::Rat(x * y),
            (Field::Prime(p), Elem::Mod(x), Elem::Mod(y)) => {
                Elem::Mod(((*x as u128 * *y as u128) % *p as u128) as u64)
            }
            (Field::Extension(k), Elem::Alg(x), Elem::Alg(y)) => {
                Elem::Alg(k.pack(&NumberField::unpack(x).mul(&NumberField::unpack(y))))
            }
            _ => panic!("element does not belong to field {self}"),
        }
    }

    /// Multiplicative inverse, `None` for zero.
    pub fn inv(&self, a: &Elem) -> Option<Elem> {
        if self.is_zero(a) {
            return None;
        }
        Some(match (self, a) {
            (Field::Rational, Elem::Rat(x)) => Elem::Rat(x.recip()),
            (Field::Prime(p), Elem::Mod(x)) => Elem::Mod(mod_pow(*x, p - 2, *p)),
            (Field::Extension(k), Elem::Alg(x)) => {
                let (g, s, _) = NumberField::unpack(x).ext_gcd(&k.modulus);
                debug_assert!(g.is_one_poly());
                Elem::Alg(k.pack(&s))
            }
            _ => panic!("element does not belong to field {self}"),
        })
    }

    pub fn div(&self, a: &Elem, b: &Elem) -> Option<Elem> {
        self.inv(b).map(|bi| self.mul(a, &bi))
    }

    pub fn contains(&self, a: &Elem) -> bool {
        match (self, a) {
            (Field::Rational, Elem::Rat(_)) => true,
            (Field::Prime(p), Elem::Mod(v)) => v < p,
            (Field::Extension(k), Elem::Alg(v)) => v.len() == k.degree(),
            _ => false,
        }
    }

    /// Canonical text form used by the JSON encoding.
    pub fn format(&self, a: &Elem) -> String {
        match a {
            Elem::Rat(q) => format_rational(q),
            Elem::Mod(v) => v.to_string(),
            Elem::Alg(v) => NumberField::unpack(v).to_string(),
        }
    }

    pub fn parse_elem(&self, s: &str) -> Result<Elem> {
        match self {
            Field::Extension(k) => Ok(Elem::Alg(k.pack(&Poly::parse(s)?))),
            _ => self.from_rational(&parse_rational(s)?),
        }
    }

    /// Lifts a rational element into an extension field.
    pub fn embed(&self, a: &Elem, target: &Field) -> Result<Elem> {
        match (self, a) {
            (f, _) if f == target => Ok(a.clone()),
            (Field::Rational, Elem::Rat(q)) => target.from_rational(q),
            _ => Err(Error::FieldMismatch(format!("cannot embed {self} into {target}"))),
        }
    }
}

impl Poly {
    fn is_one_poly(&self) -> bool {
        self.degree() == Some(0) && self.coeff(0).is_one()
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rational => write!(f, "Q"),
            Field::Prime(p) => write!(f, "Fp:{p}"),
            Field::Extension(k) => write!(f, "ext:{}", k.modulus),
        }
    }
}

/// A field element bundled with its field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scalar {
    field: Field,
    value: Elem,
}

impl Scalar {
    pub fn new(field: Field, value: Elem) -> Result<Scalar> {
        if !field.contains(&value) {
            return Err(Error::FieldMismatch(format!("{value:?} is not an element of {field}")));
        }
        Ok(Scalar { field, value })
    }

    pub fn rational(q: BigRational) -> Scalar {
        Scalar { field: Field::Rational, value: Elem::Rat(q) }
    }

    pub fn from_i64(field: &Field, n: i64) -> Scalar {
        Scalar { field: field.clone(), value: field.from_i64(n) }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn value(&self) -> &Elem {
        &self.value
    }

    pub fn is_zero(&self) -> bool {
        self.field.is_zero(&self.value)
    }

    pub fn inv(&self) -> Option<Scalar> {
        self.field.inv(&self.value).map(|v| Scalar { field: self.field.clone(), value: v })
    }

    fn check(&self, other: &Scalar) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch(format!("{} vs {}", self.field, other.field)));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Scalar) -> Result<Scalar> {
        self.check(other)?;
        Ok(Scalar { field: self.field.clone(), value: self.field.add(&self.value, &other.value) })
    }

    pub fn try_mul(&self, other: &Scalar) -> Result<Scalar> {
        self.check(other)?;
        Ok(Scalar { field: self.field.clone(), value: self.field.mul(&self.value, &other.value) })
    }

    pub fn try_sub(&self, other: &Scalar) -> Result<Scalar> {
        self.check(other)?;
        Ok(Scalar { field: self.field.clone(), value: self.field.sub(&self.value, &other.value) })
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.field.format(&self.value))
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        self.try_add(rhs).expect("scalar field mismatch")
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self.try_sub(rhs).expect("scalar field mismatch")
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        self.try_mul(rhs).expect("scalar field mismatch")
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar { field: self.field.clone(), value: self.field.neg(&self.value) }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_arithmetic() {
        let f = Field::prime(7).unwrap();
        let a = f.from_i64(3);
        let b = f.from_i64(-2);
        assert_eq!(f.add(&a, &b), Elem::Mod(1));
        assert_eq!(f.mul(&a, &f.inv(&a).unwrap()), f.one());
        let half = f.from_rational(&BigRational::new(1.into(), 2.into())).unwrap();
        assert_eq!(half, Elem::Mod(4));
        assert!(f.from_rational(&BigRational::new(1.into(), 7.into())).is_err());
        assert!(Field::prime(9).is_err());
    }

    #[test]
    fn gaussian_rationals() {
        let f = Field::parse("ext:x^2 + 1").unwrap();
        let i = f.generator().unwrap();
        assert_eq!(f.mul(&i, &i), f.from_i64(-1));
        let z = f.parse_elem("1 + x").unwrap();
        let zi = f.inv(&z).unwrap();
        assert_eq!(f.format(&zi), "-1/2*x + 1/2");
        assert!(Field::parse("ext:x^2 - 1").is_err());
        assert!(Field::parse("ext:2*x^2 + 1").is_err());
    }

    #[test]
    fn scalar_mismatch_is_reported() {
        let a = Scalar::from_i64(&Field::Rational, 1);
        let b = Scalar::from_i64(&Field::Prime(5), 1);
        assert!(matches!(a.try_add(&b), Err(Error::FieldMismatch(_))));
    }
}
