//! Exact probabilities and the numeric abstraction used by the solvers.
//!
//! Probabilities are stored as reduced `i64` rationals so that file inputs
//! like `1/3` or `0.25` survive parsing without rounding. Heavy arithmetic
//! happens through the [`ProbValue`] trait, which every solver is generic
//! over: `f64` for everyday runs and `BigRational` when a result must be
//! bit-for-bit exact.

use std::fmt;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// An appearance probability in `[0, 1]`, kept as an exact rational.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Prob(Ratio<i64>);

impl Prob {
    pub fn new(num: i64, den: i64) -> Result<Prob> {
        if den <= 0 || num < 0 || num > den {
            return Err(Error::InvalidProbability(format!("{num}/{den}")));
        }
        Ok(Prob(Ratio::new(num, den)))
    }

    pub fn zero() -> Prob {
        Prob(Ratio::zero())
    }

    pub fn one() -> Prob {
        Prob(Ratio::one())
    }

    /// Accepts `p/q`, a decimal like `0.25`, or a bare integer (`0`, `1`).
    pub fn parse(s: &str) -> Result<Prob> {
        let s = s.trim();
        let bad = || Error::InvalidProbability(s.to_string());
        if let Some((num, den)) = s.split_once('/') {
            let num: i64 = num.trim().parse().map_err(|_| bad())?;
            let den: i64 = den.trim().parse().map_err(|_| bad())?;
            return Prob::new(num, den);
        }
        if let Some((int, frac)) = s.split_once('.') {
            if frac.len() > 18 || frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            let int: i64 = if int.is_empty() { 0 } else { int.parse().map_err(|_| bad())? };
            let frac_num: i64 = frac.parse().map_err(|_| bad())?;
            let den = 10i64.pow(frac.len() as u32);
            let num = int.checked_mul(den).and_then(|v| v.checked_add(frac_num)).ok_or_else(bad)?;
            return Prob::new(num, den);
        }
        let num: i64 = s.parse().map_err(|_| bad())?;
        Prob::new(num, 1)
    }

    pub fn numer(&self) -> i64 {
        *self.0.numer()
    }

    pub fn denom(&self) -> i64 {
        *self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    /// 1 - p. Safe for any probability: no overflow for values in [0, 1].
    pub fn complement(&self) -> Prob {
        Prob(Ratio::one() - self.0)
    }

    pub fn to_f64(&self) -> f64 {
        *self.0.numer() as f64 / *self.0.denom() as f64
    }

    pub fn to_big(&self) -> BigRational {
        Ratio::new(BigInt::from(*self.0.numer()), BigInt::from(*self.0.denom()))
    }
}

impl fmt::Display for Prob {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

/// Number type the solvers compute in. Implemented for `f64` (fast, default)
/// and `BigRational` (exact; turns tolerance checks into equality checks).
pub trait ProbValue:
    Clone
    + PartialOrd
    + fmt::Display
    + num_traits::Zero
    + num_traits::One
    + std::ops::Add<Output = Self>
    + std::ops::Sub<Output = Self>
    + std::ops::Mul<Output = Self>
    + std::ops::Div<Output = Self>
{
    fn from_prob(p: &Prob) -> Self;

    /// Slack allowed when checking structural invariants (monotone tails,
    /// non-negative masses). Zero for exact types.
    fn invariant_slack() -> Self;

    fn to_f64_lossy(&self) -> f64;
}

impl ProbValue for f64 {
    fn from_prob(p: &Prob) -> f64 {
        p.to_f64()
    }

    fn invariant_slack() -> f64 {
        1e-9
    }

    fn to_f64_lossy(&self) -> f64 {
        *self
    }
}

impl ProbValue for BigRational {
    fn from_prob(p: &Prob) -> BigRational {
        p.to_big()
    }

    fn invariant_slack() -> BigRational {
        BigRational::zero()
    }

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

/// Convenience for tests and callers that build exact expectations.
pub fn big(num: i64, den: i64) -> BigRational {
    Ratio::new(BigInt::from(num), BigInt::from(den))
}

/// `abs(a - b) <= tol` for any ProbValue; exact comparison when tol is zero.
pub fn within<P: ProbValue>(a: &P, b: &P, tol: &P) -> bool {
    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
    hi.clone() - lo.clone() <= tol.clone()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_decimals_and_integers() {
        assert_eq!(Prob::parse("1/2").unwrap(), Prob::new(1, 2).unwrap());
        assert_eq!(Prob::parse("0.25").unwrap(), Prob::new(1, 4).unwrap());
        assert_eq!(Prob::parse("1").unwrap(), Prob::one());
        assert_eq!(Prob::parse("0").unwrap(), Prob::zero());
        assert_eq!(Prob::parse(".5").unwrap(), Prob::new(1, 2).unwrap());
        assert_eq!(Prob::parse("0.125").unwrap(), Prob::new(1, 8).unwrap());
    }

    #[test]
    fn rejects_out_of_range_and_garbage() {
        assert!(Prob::parse("3/2").is_err());
        assert!(Prob::parse("-1/2").is_err());
        assert!(Prob::parse("1/0").is_err());
        assert!(Prob::parse("2").is_err());
        assert!(Prob::parse("0.5.1").is_err());
        assert!(Prob::parse("half").is_err());
        assert!(Prob::parse("").is_err());
    }

    #[test]
    fn display_round_trips() {
        for s in ["0", "1", "1/2", "2/3", "7/16"] {
            let p = Prob::parse(s).unwrap();
            assert_eq!(p.to_string(), s);
            assert_eq!(Prob::parse(&p.to_string()).unwrap(), p);
        }
        // Decimals normalize to reduced fractions.
        assert_eq!(Prob::parse("0.5").unwrap().to_string(), "1/2");
    }

    #[test]
    fn complement_and_conversions() {
        let p = Prob::parse("1/3").unwrap();
        assert_eq!(p.complement(), Prob::new(2, 3).unwrap());
        assert_eq!(p.to_big(), big(1, 3));
        assert!((p.to_f64() - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(Prob::one().complement(), Prob::zero());
    }
}
