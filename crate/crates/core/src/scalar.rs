//! Exact scalar fields of characteristic other than 2.
//!
//! Two domains exist: the rationals (arbitrary precision, always in lowest
//! terms) and prime fields `Z/p` for odd primes `p <= 2^31`. Scalars are
//! canonical at all times, so derived `PartialEq` is exact equality.
//!
//! The arithmetic operators on `&Scalar` panic when the operands come from
//! different domains; use [`scalar_arith`] for the checked form.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{One, Zero};
use rand::Rng;

use crate::error::{Error, Result};

/// Largest accepted prime modulus.
pub const MAX_PRIME: u64 = 1 << 31;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum DomainKind {
    Rationals,
    PrimeField(u64),
}

/// A field of characteristic 0 or an odd prime.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ScalarDomain(DomainKind);

impl ScalarDomain {
    pub const fn rationals() -> Self {
        ScalarDomain(DomainKind::Rationals)
    }

    /// `Z/p`. Rejects 2, composites, and moduli above [`MAX_PRIME`].
    pub fn prime_field(p: u64) -> Result<Self> {
        let spelled = format!("Fp:{p}");
        if p == 2 {
            return Err(Error::InvalidDomain(
                spelled,
                "characteristic 2 is not supported".into(),
            ));
        }
        if p > MAX_PRIME {
            return Err(Error::InvalidDomain(
                spelled,
                format!("modulus must not exceed 2^31 = {MAX_PRIME}"),
            ));
        }
        if !is_prime(p) {
            return Err(Error::InvalidDomain(spelled, "modulus is not prime".into()));
        }
        Ok(ScalarDomain(DomainKind::PrimeField(p)))
    }

    /// 0 for the rationals, `p` for `Z/p`.
    pub fn characteristic(&self) -> u64 {
        match self.0 {
            DomainKind::Rationals => 0,
            DomainKind::PrimeField(p) => p,
        }
    }

    pub fn is_rationals(&self) -> bool {
        matches!(self.0, DomainKind::Rationals)
    }

    pub fn zero(&self) -> Scalar {
        self.from_i64(0)
    }

    pub fn one(&self) -> Scalar {
        self.from_i64(1)
    }

    pub fn from_i64(&self, v: i64) -> Scalar {
        match self.0 {
            DomainKind::Rationals => Scalar(Repr::Rational(BigRational::from_integer(v.into()))),
            DomainKind::PrimeField(p) => Scalar(Repr::Residue {
                value: v.rem_euclid(p as i64) as u64,
                modulus: p,
            }),
        }
    }

    /// Builds `num/den` in this domain.
    pub fn ratio(&self, num: i64, den: i64) -> Result<Scalar> {
        self.from_i64(num).checked_div(&self.from_i64(den))
    }

    /// Samples a small element: integers in `-3..=3` over the rationals,
    /// a uniform residue over `Z/p`.
    pub fn sample_small<R: Rng + ?Sized>(&self, rng: &mut R) -> Scalar {
        match self.0 {
            DomainKind::Rationals => self.from_i64(rng.gen_range(-3..=3)),
            DomainKind::PrimeField(p) => Scalar(Repr::Residue {
                value: rng.gen_range(0..p),
                modulus: p,
            }),
        }
    }

    /// Parses the canonical spelling produced by `Display for Scalar`.
    /// Prime-field inputs may be any integer (reduced mod p) or a fraction.
    pub fn parse_scalar(&self, s: &str) -> Result<Scalar> {
        let bad = || Error::InvalidScalar(s.to_string(), self.to_string());
        let t = s.trim();
        let (num, den) = match t.split_once('/') {
            Some((n, d)) => (n.trim(), Some(d.trim())),
            None => (t, None),
        };
        let num: BigInt = num.parse().map_err(|_| bad())?;
        let den: BigInt = match den {
            Some(d) => d.parse().map_err(|_| bad())?,
            None => BigInt::one(),
        };
        if den.is_zero() {
            return Err(bad());
        }
        match self.0 {
            DomainKind::Rationals => Ok(Scalar(Repr::Rational(BigRational::new(num, den)))),
            DomainKind::PrimeField(p) => {
                let reduce = |v: &BigInt| -> u64 {
                    let m = BigInt::from(p);
                    let r = ((v % &m) + &m) % &m;
                    r.to_string().parse().expect("residue fits in u64")
                };
                let n = Scalar(Repr::Residue { value: reduce(&num), modulus: p });
                let d = Scalar(Repr::Residue { value: reduce(&den), modulus: p });
                n.checked_div(&d).map_err(|_| bad())
            }
        }
    }
}

impl fmt::Display for ScalarDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            DomainKind::Rationals => write!(f, "Q"),
            DomainKind::PrimeField(p) => write!(f, "Fp:{p}"),
        }
    }
}

impl FromStr for ScalarDomain {
    type Err = Error;

    /// Accepts `Q` or `Fp:<p>`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t == "Q" {
            return Ok(ScalarDomain::rationals());
        }
        match t.strip_prefix("Fp:") {
            Some(p) => {
                let p: u64 = p.parse().map_err(|_| {
                    Error::InvalidDomain(s.to_string(), "modulus is not an integer".into())
                })?;
                ScalarDomain::prime_field(p)
            }
            None => Err(Error::InvalidDomain(
                s.to_string(),
                "expected Q or Fp:<p>".into(),
            )),
        }
    }
}

fn is_prime(p: u64) -> bool {
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

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Repr {
    Rational(BigRational),
    Residue { value: u64, modulus: u64 },
}

/// An exact field element in canonical form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Scalar(Repr);

/// Binary operation selector for [`scalar_arith`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// Checked binary arithmetic: errors on domain mismatch or division by zero.
pub fn scalar_arith(a: &Scalar, b: &Scalar, op: ArithOp) -> Result<Scalar> {
    a.same_domain(b)?;
    Ok(match op {
        ArithOp::Add => a + b,
        ArithOp::Sub => a - b,
        ArithOp::Mul => a * b,
        ArithOp::Div => return a.checked_div(b),
    })
}

impl Scalar {
    pub fn domain(&self) -> ScalarDomain {
        match &self.0 {
            Repr::Rational(_) => ScalarDomain::rationals(),
            Repr::Residue { modulus, .. } => ScalarDomain(DomainKind::PrimeField(*modulus)),
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.0 {
            Repr::Rational(r) => r.is_zero(),
            Repr::Residue { value, .. } => *value == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match &self.0 {
            Repr::Rational(r) => r.is_one(),
            Repr::Residue { value, .. } => *value == 1,
        }
    }

    fn same_domain(&self, other: &Scalar) -> Result<()> {
        if self.domain() == other.domain() {
            Ok(())
        } else {
            Err(Error::DomainMismatch {
                left: self.domain().to_string(),
                right: other.domain().to_string(),
            })
        }
    }

    /// Multiplicative inverse; errors on zero.
    pub fn inv(&self) -> Result<Scalar> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(match &self.0 {
            Repr::Rational(r) => Scalar(Repr::Rational(r.recip())),
            Repr::Residue { value, modulus } => Scalar(Repr::Residue {
                value: mod_inverse(*value, *modulus),
                modulus: *modulus,
            }),
        })
    }

    pub fn checked_div(&self, rhs: &Scalar) -> Result<Scalar> {
        self.same_domain(rhs)?;
        Ok(self * &rhs.inv()?)
    }

    /// `self / 2`. Always defined because no domain has characteristic 2.
    pub fn halve(&self) -> Scalar {
        match &self.0 {
            Repr::Rational(r) => Scalar(Repr::Rational(r / BigInt::from(2))),
            Repr::Residue { value, modulus } => {
                // (p + 1) / 2 is the inverse of 2 modulo an odd p.
                let half = (modulus + 1) / 2;
                Scalar(Repr::Residue {
                    value: value * half % modulus,
                    modulus: *modulus,
                })
            }
        }
    }

    /// Rebuilds the value through its constructor. Identity on every valid scalar.
    pub fn recanonicalize(&self) -> Scalar {
        match &self.0 {
            Repr::Rational(r) => Scalar(Repr::Rational(BigRational::new(
                r.numer().clone(),
                r.denom().clone(),
            ))),
            Repr::Residue { value, modulus } => Scalar(Repr::Residue {
                value: value % modulus,
                modulus: *modulus,
            }),
        }
    }

    /// Integer numerator/denominator view, used by tests for invariant checks.
    pub fn as_rational(&self) -> Option<&BigRational> {
        match &self.0 {
            Repr::Rational(r) => Some(r),
            Repr::Residue { .. } => None,
        }
    }

    pub fn as_residue(&self) -> Option<u64> {
        match &self.0 {
            Repr::Rational(_) => None,
            Repr::Residue { value, .. } => Some(*value),
        }
    }
}

fn mod_inverse(a: u64, p: u64) -> u64 {
    let (mut t, mut new_t) = (0i64, 1i64);
    let (mut r, mut new_r) = (p as i64, a as i64);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    debug_assert_eq!(r, 1);
    t.rem_euclid(p as i64) as u64
}

fn mismatch(a: &Scalar, b: &Scalar) -> ! {
    panic!(
        "scalar domain mismatch: {} vs {}",
        a.domain(),
        b.domain()
    )
}

impl Add for &Scalar {
    type Output = Scalar;

    fn add(self, rhs: &Scalar) -> Scalar {
        match (&self.0, &rhs.0) {
            (Repr::Rational(a), Repr::Rational(b)) => Scalar(Repr::Rational(a + b)),
            (Repr::Residue { value: a, modulus: p }, Repr::Residue { value: b, modulus: q })
                if p == q =>
            {
                Scalar(Repr::Residue { value: (a + b) % p, modulus: *p })
            }
            _ => mismatch(self, rhs),
        }
    }
}

impl Sub for &Scalar {
    type Output = Scalar;

    fn sub(self, rhs: &Scalar) -> Scalar {
        match (&self.0, &rhs.0) {
            (Repr::Rational(a), Repr::Rational(b)) => Scalar(Repr::Rational(a - b)),
            (Repr::Residue { value: a, modulus: p }, Repr::Residue { value: b, modulus: q })
                if p == q =>
            {
                Scalar(Repr::Residue { value: (a + p - b) % p, modulus: *p })
            }
            _ => mismatch(self, rhs),
        }
    }
}

impl Mul for &Scalar {
    type Output = Scalar;

    fn mul(self, rhs: &Scalar) -> Scalar {
        match (&self.0, &rhs.0) {
            (Repr::Rational(a), Repr::Rational(b)) => Scalar(Repr::Rational(a * b)),
            (Repr::Residue { value: a, modulus: p }, Repr::Residue { value: b, modulus: q })
                if p == q =>
            {
                Scalar(Repr::Residue { value: a * b % p, modulus: *p })
            }
            _ => mismatch(self, rhs),
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;

    fn neg(self) -> Scalar {
        match &self.0 {
            Repr::Rational(a) => Scalar(Repr::Rational(-a)),
            Repr::Residue { value, modulus } => Scalar(Repr::Residue {
                value: (modulus - value) % modulus,
                modulus: *modulus,
            }),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;

    fn neg(self) -> Scalar {
        -&self
    }
}

impl fmt::Display for Scalar {
    /// Rationals print as `n` or `n/d` (d > 1); residues as `0..p-1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Rational(r) => {
                if r.denom().is_one() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            Repr::Residue { value, .. } => write!(f, "{value}"),
        }
    }
}
