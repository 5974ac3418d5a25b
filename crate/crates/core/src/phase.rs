//! Exact rational phases, stored as multiples of π reduced modulo 2π.

use std::fmt;
use std::ops::Add;
use std::str::FromStr;

use num_integer::Integer;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PhaseError {
    #[error("invalid phase `{0}`: expected `p` or `p/q`")]
    Syntax(String),
    #[error("invalid phase `{0}`: zero denominator")]
    ZeroDenominator(String),
}

/// A phase `num/den · π` with `0 <= num < 2·den` and `gcd(num, den) = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Phase {
    num: i64,
    den: i64,
}

impl Phase {
    pub const ZERO: Phase = Phase { num: 0, den: 1 };
    pub const PI: Phase = Phase { num: 1, den: 1 };

    /// Builds `num/den · π`, reducing the fraction and wrapping into `[0, 2)`.
    ///
    /// Panics if `den == 0`.
    pub fn new(num: i64, den: i64) -> Phase {
        assert!(den != 0, "phase denominator must be nonzero");
        let (mut num, mut den) = if den < 0 { (-num, -den) } else { (num, den) };
        let g = num.gcd(&den);
        num /= g;
        den /= g;
        num = num.rem_euclid(2 * den);
        Phase { num, den }
    }

    pub fn numerator(self) -> i64 {
        self.num
    }

    pub fn denominator(self) -> i64 {
        self.den
    }

    pub fn is_zero(self) -> bool {
        self.num == 0
    }

    pub fn radians(self) -> f64 {
        std::f64::consts::PI * self.num as f64 / self.den as f64
    }
}

impl std::ops::Neg for Phase {
    type Output = Phase;

    fn neg(self) -> Phase {
        Phase::new(-self.num, self.den)
    }
}

impl Default for Phase {
    fn default() -> Self {
        Phase::ZERO
    }
}

impl Add for Phase {
    type Output = Phase;

    fn add(self, rhs: Phase) -> Phase {
        let l = self.den.lcm(&rhs.den);
        Phase::new(self.num * (l / self.den) + rhs.num * (l / rhs.den), l)
    }
}

impl std::iter::Sum for Phase {
    fn sum<I: Iterator<Item = Phase>>(iter: I) -> Phase {
        iter.fold(Phase::ZERO, |a, b| a + b)
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl FromStr for Phase {
    type Err = PhaseError;

    fn from_str(s: &str) -> Result<Phase, PhaseError> {
        let t = s.trim();
        let parse = |x: &str| {
            x.trim()
                .parse::<i64>()
                .map_err(|_| PhaseError::Syntax(s.to_string()))
        };
        let (num, den) = match t.split_once('/') {
            Some((n, d)) => (parse(n)?, parse(d)?),
            None => (parse(t)?, 1),
        };
        if den == 0 {
            return Err(PhaseError::ZeroDenominator(s.to_string()));
        }
        Ok(Phase::new(num, den))
    }
}

impl Serialize for Phase {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Phase {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Phase, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(n) => Ok(Phase::new(n, 1)),
            Raw::Str(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}
