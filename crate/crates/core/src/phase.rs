//! Elements of Q/Z, standing for the roots of unity `e^{2πi·k/m}`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A reduced fraction `k/m` with `0 <= k < m`, read modulo 1.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Phase {
    num: u64,
    den: u64,
}

impl Phase {
    pub const ZERO: Phase = Phase { num: 0, den: 1 };

    /// `k/m` reduced into `[0, 1)`. Panics on `m == 0`.
    pub fn new(k: i64, m: u64) -> Self {
        assert!(m != 0, "phase denominator must be nonzero");
        let r = (k as i128).rem_euclid(m as i128) as u64;
        Self::reduced(r, m)
    }

    fn reduced(num: u64, den: u64) -> Self {
        let g = num.gcd(&den);
        Self {
            num: num / g,
            den: den / g,
        }
    }

    pub fn numer(&self) -> u64 {
        self.num
    }

    pub fn denom(&self) -> u64 {
        self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    /// Multiplicative order of the root of unity.
    pub fn order(&self) -> u64 {
        self.den
    }

    /// `k · self`.
    pub fn scale(&self, k: i64) -> Self {
        let m = self.den as i128;
        let r = ((k as i128).rem_euclid(m) * self.num as i128).rem_euclid(m);
        Self::reduced(r as u64, self.den)
    }

    /// `k · self` for an arbitrary-precision integer `k`.
    pub fn scale_big(&self, k: &BigInt) -> Self {
        let m = BigInt::from(self.den);
        let r = k.mod_floor(&m).to_i64().expect("residue below denominator");
        self.scale(r)
    }
}

impl Default for Phase {
    fn default() -> Self {
        Self::ZERO
    }
}

impl Add for Phase {
    type Output = Phase;
    fn add(self, rhs: Phase) -> Phase {
        let l = self.den.lcm(&rhs.den);
        let x = self.num as u128 * (l / self.den) as u128 + rhs.num as u128 * (l / rhs.den) as u128;
        Phase::reduced((x % l as u128) as u64, l)
    }
}

impl Neg for Phase {
    type Output = Phase;
    fn neg(self) -> Phase {
        if self.num == 0 {
            self
        } else {
            Phase {
                num: self.den - self.num,
                den: self.den,
            }
        }
    }
}

impl Sub for Phase {
    type Output = Phase;
    fn sub(self, rhs: Phase) -> Phase {
        self + (-rhs)
    }
}

impl std::iter::Sum for Phase {
    fn sum<I: Iterator<Item = Phase>>(iter: I) -> Phase {
        iter.fold(Phase::ZERO, Add::add)
    }
}

/// Orders by the representative in `[0, 1)`.
impl Ord for Phase {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.num as u128 * other.den as u128).cmp(&(other.num as u128 * self.den as u128))
    }
}

impl PartialOrd for Phase {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.num == 0 {
            write!(f, "0")
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl FromStr for Phase {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("expected a fraction k/m, got {s:?}"));
        let s = s.trim();
        let (k, m) = match s.split_once('/') {
            Some((k, m)) => (
                k.trim().parse::<i64>().map_err(|_| bad())?,
                m.trim().parse::<u64>().map_err(|_| bad())?,
            ),
            None => (s.parse::<i64>().map_err(|_| bad())?, 1),
        };
        if m == 0 {
            return Err(bad());
        }
        Ok(Phase::new(k, m))
    }
}

impl Serialize for Phase {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Phase {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn arithmetic() {
        assert_eq!(Phase::new(1, 3) + Phase::new(1, 3), Phase::new(2, 3));
        assert_eq!(Phase::new(1, 8).scale(4), Phase::new(1, 2));
        assert_eq!(-Phase::ZERO, Phase::ZERO);
        assert_eq!(-Phase::new(1, 8), Phase::new(7, 8));
        assert_eq!(Phase::new(-1, 4), Phase::new(3, 4));
        assert_eq!(Phase::new(6, 8), Phase::new(3, 4));
        assert_eq!(Phase::new(5, 5), Phase::ZERO);
        assert_eq!(Phase::new(1, 3).scale(-1), Phase::new(2, 3));
        assert_eq!(Phase::new(1, 3).scale_big(&BigInt::from(-4)), Phase::new(2, 3));
        assert_eq!(Phase::new(4, 12).order(), 3);
    }

    #[test]
    fn text_form() {
        assert_eq!(Phase::new(2, 6).to_string(), "1/3");
        assert_eq!(Phase::ZERO.to_string(), "0");
        assert_eq!("3/8".parse::<Phase>().unwrap(), Phase::new(3, 8));
        assert_eq!("-1/8".parse::<Phase>().unwrap(), Phase::new(7, 8));
        assert!("1/0".parse::<Phase>().is_err());
        assert!("0.5".parse::<Phase>().is_err());
    }

    fn phase() -> impl Strategy<Value = Phase> {
        (0i64..200, 1u64..60).prop_map(|(k, m)| Phase::new(k, m))
    }

    proptest! {
        #[test]
        fn group_laws(x in phase(), y in phase(), z in phase()) {
            prop_assert_eq!(x + y, y + x);
            prop_assert_eq!((x + y) + z, x + (y + z));
            prop_assert_eq!(x + Phase::ZERO, x);
            prop_assert!((x + (-x)).is_zero());
            prop_assert!(x.scale(x.order() as i64).is_zero());
        }
    }
}
