//! Exact scalars in a real quadratic field `Q(sqrt(D))`.
//!
//! A [`FieldScalar`] stores `rat + irr * sqrt(D)` with rational parts. The
//! discriminant `D = 0` encodes plain `Q`. Signs are decided exactly, so
//! positivity tests on Gram matrices never touch floating point.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Checks that `d` is a usable discriminant: 0, or squarefree and at least 2.
pub fn check_discriminant(d: u64) -> Result<()> {
    if d == 0 {
        return Ok(());
    }
    if d == 1 {
        return Err(Error::BadDiscriminant(d));
    }
    let mut p = 2u64;
    while p * p <= d {
        if d.is_multiple_of(p * p) {
            return Err(Error::BadDiscriminant(d));
        }
        p += 1;
    }
    Ok(())
}

/// Parses `"p/q"` or `"p"` into a rational in lowest terms.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num
        .parse()
        .map_err(|_| Error::Parse(format!("bad rational numerator in {s:?}")))?;
    let den: BigInt = den
        .parse()
        .map_err(|_| Error::Parse(format!("bad rational denominator in {s:?}")))?;
    if den.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(BigRational::new(num, den))
}

pub fn format_rational(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// `rat + irr * sqrt(d)`, canonical: `d == 0` implies `irr == 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FieldScalar {
    rat: BigRational,
    irr: BigRational,
    d: u64,
}

impl FieldScalar {
    pub fn new(rat: BigRational, irr: BigRational, d: u64) -> Result<Self> {
        check_discriminant(d)?;
        if d == 0 && !irr.is_zero() {
            return Err(Error::BadDiscriminant(0));
        }
        Ok(Self { rat, irr, d })
    }

    /// A rational number viewed inside `Q(sqrt(d))`.
    pub fn rational_in(q: BigRational, d: u64) -> Self {
        Self {
            rat: q,
            irr: BigRational::zero(),
            d,
        }
    }

    pub fn rational(q: BigRational) -> Self {
        Self::rational_in(q, 0)
    }

    pub fn from_int_in(n: i64, d: u64) -> Self {
        Self::rational_in(BigRational::from_integer(n.into()), d)
    }

    pub fn from_bigint_in(n: &BigInt, d: u64) -> Self {
        Self::rational_in(BigRational::from_integer(n.clone()), d)
    }

    pub fn zero_in(d: u64) -> Self {
        Self::from_int_in(0, d)
    }

    pub fn one_in(d: u64) -> Self {
        Self::from_int_in(1, d)
    }

    /// `sqrt(d)` itself.
    pub fn sqrt_d(d: u64) -> Result<Self> {
        if d == 0 {
            return Err(Error::BadDiscriminant(0));
        }
        Self::new(BigRational::zero(), BigRational::one(), d)
    }

    pub fn rat(&self) -> &BigRational {
        &self.rat
    }

    pub fn irr(&self) -> &BigRational {
        &self.irr
    }

    pub fn discriminant(&self) -> u64 {
        self.d
    }

    pub fn is_zero(&self) -> bool {
        self.rat.is_zero() && self.irr.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.irr.is_zero()
    }

    /// Re-tags a rational scalar (`irr == 0`) with discriminant `d`.
    pub fn lift(&self, d: u64) -> Result<Self> {
        if self.d == d {
            return Ok(self.clone());
        }
        if !self.irr.is_zero() {
            return Err(Error::MixedDiscriminant(self.d, d));
        }
        check_discriminant(d)?;
        Ok(Self::rational_in(self.rat.clone(), d))
    }

    /// Galois conjugate `rat - irr * sqrt(d)`.
    pub fn conj(&self) -> Self {
        Self {
            rat: self.rat.clone(),
            irr: -&self.irr,
            d: self.d,
        }
    }

    /// Field norm `rat^2 - d * irr^2`.
    pub fn norm(&self) -> BigRational {
        &self.rat * &self.rat - BigRational::from_integer(self.d.into()) * &self.irr * &self.irr
    }

    /// Exact sign of `rat + irr * sqrt(d)`.
    pub fn signum(&self) -> Ordering {
        let a = self.rat.cmp(&BigRational::zero());
        let b = self.irr.cmp(&BigRational::zero());
        match (a, b) {
            (Ordering::Equal, b) => b,
            (a, Ordering::Equal) => a,
            (a, b) if a == b => a,
            // opposite signs: compare a^2 against d*b^2
            (a, _) => {
                let n = self.norm();
                match n.cmp(&BigRational::zero()) {
                    Ordering::Equal => Ordering::Equal,
                    Ordering::Greater => a,
                    Ordering::Less => a.reverse(),
                }
            }
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() == Ordering::Greater
    }

    pub fn is_negative(&self) -> bool {
        self.signum() == Ordering::Less
    }

    fn same_field(&self, other: &Self) -> Result<u64> {
        if self.d == other.d {
            Ok(self.d)
        } else {
            Err(Error::MixedDiscriminant(self.d, other.d))
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        let d = self.same_field(other)?;
        Ok(Self {
            rat: &self.rat + &other.rat,
            irr: &self.irr + &other.irr,
            d,
        })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        let d = self.same_field(other)?;
        Ok(Self {
            rat: &self.rat - &other.rat,
            irr: &self.irr - &other.irr,
            d,
        })
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        let d = self.same_field(other)?;
        let dd = BigRational::from_integer(d.into());
        Ok(Self {
            rat: &self.rat * &other.rat + dd * &self.irr * &other.irr,
            irr: &self.rat * &other.irr + &self.irr * &other.rat,
            d,
        })
    }

    pub fn inv(&self) -> Result<Self> {
        let n = self.norm();
        if n.is_zero() {
            // norm vanishes only at zero since d is not a square
            return Err(Error::DivisionByZero);
        }
        Ok(Self {
            rat: &self.rat / &n,
            irr: -(&self.irr / &n),
            d: self.d,
        })
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        self.checked_mul(&other.inv()?)
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        Self {
            rat: &self.rat * q,
            irr: &self.irr * q,
            d: self.d,
        }
    }

    pub fn cmp_exact(&self, other: &Self) -> Result<Ordering> {
        Ok(self.checked_sub(other)?.signum())
    }

    /// Rational bounds `lo <= value <= hi`, tight to within `1/2^bits` per unit of `irr`.
    pub fn rational_bounds(&self, bits: u32) -> (BigRational, BigRational) {
        if self.irr.is_zero() {
            return (self.rat.clone(), self.rat.clone());
        }
        let scale = BigInt::one() << bits;
        let s = (BigInt::from(self.d) * &scale * &scale).sqrt();
        let lo_root = BigRational::new(s.clone(), scale.clone());
        let hi_root = BigRational::new(s + 1, scale);
        let (a, b) = (&self.irr * &lo_root, &self.irr * &hi_root);
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        (&self.rat + lo, &self.rat + hi)
    }
}

impl PartialOrd for FieldScalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.cmp_exact(other).ok()
    }
}

// Operator forms panic on mixed discriminants; use the checked_* methods
// when the fields of the operands are not known to agree.
impl Add for &FieldScalar {
    type Output = FieldScalar;
    fn add(self, rhs: &FieldScalar) -> FieldScalar {
        self.checked_add(rhs).expect("mixed discriminants")
    }
}

impl Sub for &FieldScalar {
    type Output = FieldScalar;
    fn sub(self, rhs: &FieldScalar) -> FieldScalar {
        self.checked_sub(rhs).expect("mixed discriminants")
    }
}

impl Mul for &FieldScalar {
    type Output = FieldScalar;
    fn mul(self, rhs: &FieldScalar) -> FieldScalar {
        self.checked_mul(rhs).expect("mixed discriminants")
    }
}

impl Neg for &FieldScalar {
    type Output = FieldScalar;
    fn neg(self) -> FieldScalar {
        FieldScalar {
            rat: -&self.rat,
            irr: -&self.irr,
            d: self.d,
        }
    }
}

impl fmt::Display for FieldScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.irr.is_zero() {
            return write!(f, "{}", format_rational(&self.rat));
        }
        let sign = if self.irr.is_negative() { "-" } else { "+" };
        write!(
            f,
            "{}{}{}*sqrt({})",
            format_rational(&self.rat),
            sign,
            format_rational(&self.irr.abs()),
            self.d
        )
    }
}
