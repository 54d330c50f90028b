//! Coefficient rings.
//!
//! Everything in this crate is exact. Point-case computations use [`Q`];
//! the polynomial tangent-bundle case uses [`crate::poly::Poly`]. Both
//! implement [`Ring`], so the pointwise exterior constructions are written
//! once.

use std::fmt::Debug;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Q = BigRational;

/// A commutative ring with exact arithmetic.
pub trait Ring:
    Clone
    + PartialEq
    + Debug
    + Send
    + Sync
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + AddAssign
{
    /// Multiplicative inverse, when it exists in the ring.
    fn try_inverse(&self) -> Option<Self>;

    fn scale(&self, q: &Q) -> Self;
}

impl Ring for Q {
    fn try_inverse(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(self.recip())
        }
    }

    fn scale(&self, q: &Q) -> Self {
        self * q
    }
}

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qf(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn sign(s: i32) -> Q {
    if s >= 0 {
        Q::one()
    } else {
        -Q::one()
    }
}

/// `(-1)^k` as ±1.
pub fn parity(k: i64) -> i32 {
    if k.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// Formats as `"p/q"`, or `"p"` when the denominator is one.
pub fn format_q(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn parse_q(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || Error::Invalid(format!("bad rational {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(Error::Invalid(format!("zero denominator in {s:?}")));
            }
            Ok(Q::new(n, d))
        }
        None => {
            let n: BigInt = s.parse().map_err(|_| bad())?;
            Ok(Q::from_integer(n))
        }
    }
}

pub fn abs_q(x: &Q) -> Q {
    x.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lowest_terms_and_sign() {
        let x = parse_q("6/-4").unwrap();
        assert_eq!(format_q(&x), "-3/2");
        assert!(x.denom() > &BigInt::zero());
        assert_eq!(format_q(&parse_q("0/7").unwrap()), "0");
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_q("1/0").is_err());
        assert!(parse_q("x").is_err());
        assert!(parse_q("1.5").is_err());
    }
}
