//! Exact non-negative rationals for divisors and normalized scores.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A non-negative rational in lowest terms with a positive denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rational(Ratio<u64>);

impl Rational {
    /// `None` when `den` is zero.
    pub fn new(num: u64, den: u64) -> Option<Self> {
        (den != 0).then(|| Rational(Ratio::new(num, den)))
    }

    pub fn from_integer(n: u64) -> Self {
        Rational(Ratio::from_integer(n))
    }

    pub fn numer(&self) -> u64 {
        *self.0.numer()
    }

    pub fn denom(&self) -> u64 {
        *self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.numer() == 0
    }

    /// `n / self` exactly. `None` if `self` is zero.
    pub fn divide(&self, n: u64) -> Option<Rational> {
        if self.is_zero() {
            return None;
        }
        Rational::new(n.checked_mul(self.denom())?, self.numer())
    }

    pub fn mul(&self, other: Rational) -> Rational {
        Rational(self.0 * other.0)
    }

    /// Nearest integer, halves rounded away from zero.
    pub fn round_half_away(&self) -> u64 {
        let (n, d) = (self.numer() as u128, self.denom() as u128);
        ((2 * n + d) / (2 * d)) as u64
    }

    pub fn to_f64(&self) -> f64 {
        self.numer() as f64 / self.denom() as f64
    }

    /// The rational with denominator `den` nearest to `x` (halves away from
    /// zero), reduced to lowest terms. `None` for negative or non-finite `x`
    /// or a zero denominator.
    pub fn approximate(x: f64, den: u64) -> Option<Rational> {
        if !x.is_finite() || x < 0.0 || den == 0 {
            return None;
        }
        let scaled = x * den as f64;
        if scaled > u64::MAX as f64 {
            return None;
        }
        Rational::new(scaled.round() as u64, den)
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        let lhs = self.numer() as u128 * other.denom() as u128;
        let rhs = other.numer() as u128 * self.denom() as u128;
        lhs.cmp(&rhs)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denom() == 1 {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseRationalError(String);

impl fmt::Display for ParseRationalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "not a non-negative rational: `{}`", self.0)
    }
}

impl std::error::Error for ParseRationalError {}

impl FromStr for Rational {
    type Err = ParseRationalError;

    /// Accepts `n` or `n/d`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseRationalError(s.to_string());
        let s = s.trim();
        match s.split_once('/') {
            Some((n, d)) => {
                let n = n.trim().parse().map_err(|_| err())?;
                let d = d.trim().parse().map_err(|_| err())?;
                Rational::new(n, d).ok_or_else(err)
            }
            None => s.parse().map(Rational::from_integer).map_err(|_| err()),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct RationalRepr {
    num: u64,
    den: u64,
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        RationalRepr {
            num: self.numer(),
            den: self.denom(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = RationalRepr::deserialize(deserializer)?;
        Rational::new(repr.num, repr.den)
            .ok_or_else(|| serde::de::Error::custom("zero denominator"))
    }
}
