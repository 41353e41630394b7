//! Exact elements of ℚ/ℤ, the additive exponents of roots of unity.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::str::FromStr;

use num_complex::Complex64;
use num_integer::Integer;
use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::error::Error;

/// A rational number modulo 1, stored reduced in [0, 1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Qz(Rational64);

impl Qz {
    pub const ZERO: Qz = Qz(Rational64::new_raw(0, 1));

    pub fn new(num: i64, den: i64) -> Qz {
        assert!(den != 0, "zero denominator");
        Qz::from_ratio(Rational64::new(num, den))
    }

    fn from_ratio(r: Rational64) -> Qz {
        let fl = r.floor();
        Qz(r - fl)
    }

    pub fn is_zero(&self) -> bool {
        *self.0.numer() == 0
    }

    pub fn numer(&self) -> i64 {
        *self.0.numer()
    }

    pub fn denom(&self) -> i64 {
        *self.0.denom()
    }

    /// e^{2πi·self}.
    pub fn root_of_unity(&self) -> Complex64 {
        let n = self.numer();
        let d = self.denom();
        // reduce to exact values at the quarter points so symmetric sums cancel cleanly
        match (n * 4).div_rem(&d) {
            (k, 0) => [
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, 1.0),
                Complex64::new(-1.0, 0.0),
                Complex64::new(0.0, -1.0),
            ][k as usize],
            _ => Complex64::from_polar(1.0, std::f64::consts::TAU * n as f64 / d as f64),
        }
    }
}

impl Add for Qz {
    type Output = Qz;
    fn add(self, o: Qz) -> Qz {
        Qz::from_ratio(self.0 + o.0)
    }
}

impl AddAssign for Qz {
    fn add_assign(&mut self, o: Qz) {
        *self = *self + o;
    }
}

impl Sub for Qz {
    type Output = Qz;
    fn sub(self, o: Qz) -> Qz {
        Qz::from_ratio(self.0 - o.0)
    }
}

impl Neg for Qz {
    type Output = Qz;
    fn neg(self) -> Qz {
        Qz::from_ratio(-self.0)
    }
}

impl Mul<i64> for Qz {
    type Output = Qz;
    fn mul(self, k: i64) -> Qz {
        Qz::from_ratio(self.0 * k)
    }
}

impl std::iter::Sum for Qz {
    fn sum<I: Iterator<Item = Qz>>(iter: I) -> Qz {
        iter.fold(Qz::ZERO, |a, b| a + b)
    }
}

impl fmt::Display for Qz {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denom() == 1 {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl FromStr for Qz {
    type Err = Error;
    fn from_str(s: &str) -> Result<Qz, Error> {
        let bad = || Error::Malformed(format!("'{s}' is not a rational number p/q"));
        let s = s.trim();
        match s.split_once('/') {
            Some((p, q)) => {
                let p: i64 = p.trim().parse().map_err(|_| bad())?;
                let q: i64 = q.trim().parse().map_err(|_| bad())?;
                if q == 0 {
                    return Err(bad());
                }
                Ok(Qz::new(p, q))
            }
            None => Ok(Qz::new(s.parse().map_err(|_| bad())?, 1)),
        }
    }
}

impl Serialize for Qz {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Qz {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Qz, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Str(String),
            Int(i64),
        }
        match Repr::deserialize(d)? {
            Repr::Str(s) => s.parse().map_err(serde::de::Error::custom),
            Repr::Int(i) => Ok(Qz::new(i, 1)),
        }
    }
}
