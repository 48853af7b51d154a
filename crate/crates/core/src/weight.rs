//! Scalar types usable as probability weights.
//!
//! Everything in [`crate::dist`] and [`crate::semantics`] is generic over a
//! [`Weight`]. The exact instantiation used by the analyses is
//! [`crate::Prob`] (`BigRational`); `Ratio<i64>` and `f64` are provided for
//! small experiments where exactness or speed matter differently.

use std::fmt::Debug;

use num_bigint::{BigInt, BigUint};
use num_rational::{BigRational, Ratio};
use num_traits::{One, ToPrimitive, Zero};

/// A probability scalar: closed under the semiring operations used by the
/// sub-distribution monad, ordered, and able to express `1/k`.
pub trait Weight:
    Clone
    + Debug
    + PartialEq
    + PartialOrd
    + Zero
    + One
    + std::ops::Add<Output = Self>
    + std::ops::Sub<Output = Self>
    + std::ops::Mul<Output = Self>
    + std::ops::Div<Output = Self>
{
    /// The weight `1/count`. `count` is never zero.
    fn uniform(count: &BigUint) -> Self;
}

/// A weight with an exact numerator/denominator representation. Required by
/// the flow-based coupling checker, which scales to integer capacities.
pub trait ExactWeight: Weight + Ord {
    fn to_ratio(&self) -> BigRational;
    fn from_ratio(r: &BigRational) -> Self;
}

impl Weight for BigRational {
    fn uniform(count: &BigUint) -> Self {
        Ratio::new(BigInt::one(), BigInt::from(count.clone()))
    }
}

impl ExactWeight for BigRational {
    fn to_ratio(&self) -> BigRational {
        self.clone()
    }

    fn from_ratio(r: &BigRational) -> Self {
        r.clone()
    }
}

impl Weight for Ratio<i64> {
    fn uniform(count: &BigUint) -> Self {
        let d = count
            .to_i64()
            .expect("sample space too large for Ratio<i64> weights");
        Ratio::new(1, d)
    }
}

impl ExactWeight for Ratio<i64> {
    fn to_ratio(&self) -> BigRational {
        Ratio::new(BigInt::from(*self.numer()), BigInt::from(*self.denom()))
    }

    fn from_ratio(r: &BigRational) -> Self {
        let n = r.numer().to_i64().expect("numerator overflows i64");
        let d = r.denom().to_i64().expect("denominator overflows i64");
        Ratio::new(n, d)
    }
}

impl Weight for f64 {
    fn uniform(count: &BigUint) -> Self {
        1.0 / count.to_f64().unwrap_or(f64::INFINITY)
    }
}

/// Renders an exact rational as `num/den` in lowest terms, or as a bare
/// integer when the denominator is one.
pub fn format_ratio(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `num/den` or a bare integer.
pub fn parse_ratio(s: &str) -> Option<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(Ratio::new(n, d))
        }
        None => s.parse::<BigInt>().ok().map(Ratio::from_integer),
    }
}
