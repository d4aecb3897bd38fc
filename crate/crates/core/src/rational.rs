// Copyright 2026 The toystab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Exact dyadic rationals `num / 2^log2` and conversions to general rationals.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

/// General exact rational used where denominators need not be powers of two.
pub type Ratio = BigRational;

/// A rational number whose denominator is a power of two.
///
/// Values are kept normalized: the numerator is odd, or zero with `log2 == 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Dyadic {
    num: i128,
    log2: u32,
}

impl Dyadic {
    pub const ZERO: Dyadic = Dyadic { num: 0, log2: 0 };
    pub const ONE: Dyadic = Dyadic { num: 1, log2: 0 };

    pub fn new(num: i128, log2: u32) -> Dyadic {
        let mut d = Dyadic { num, log2 };
        d.normalize();
        d
    }

    pub fn from_int(v: i128) -> Dyadic {
        Dyadic::new(v, 0)
    }

    /// `2^-k`.
    pub fn pow2_inv(k: u32) -> Dyadic {
        Dyadic::new(1, k)
    }

    fn normalize(&mut self) {
        if self.num == 0 {
            self.log2 = 0;
            return;
        }
        let tz = self.num.trailing_zeros().min(self.log2);
        self.num >>= tz;
        self.log2 -= tz;
    }

    pub fn numerator(&self) -> i128 {
        self.num
    }

    pub fn denominator_log2(&self) -> u32 {
        self.log2
    }

    /// Numerator after rescaling to the denominator `2^log2`.
    ///
    /// Panics if `log2` is smaller than the normalized exponent.
    pub fn numerator_at(&self, log2: u32) -> i128 {
        assert!(log2 >= self.log2, "cannot express {self} over 2^{log2}");
        self.num << (log2 - self.log2)
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    pub fn abs(&self) -> Dyadic {
        Dyadic { num: self.num.abs(), log2: self.log2 }
    }

    pub fn half(&self) -> Dyadic {
        Dyadic::new(self.num, self.log2 + 1)
    }

    pub fn to_ratio(&self) -> Ratio {
        Ratio::new(BigInt::from(self.num), BigInt::one() << self.log2 as usize)
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / 2f64.powi(self.log2 as i32)
    }
}

impl Default for Dyadic {
    fn default() -> Self {
        Dyadic::ZERO
    }
}

impl Add for Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: Dyadic) -> Dyadic {
        let l = self.log2.max(rhs.log2);
        Dyadic::new(self.numerator_at(l) + rhs.numerator_at(l), l)
    }
}

impl Sub for Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: Dyadic) -> Dyadic {
        self + (-rhs)
    }
}

impl Neg for Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic { num: -self.num, log2: self.log2 }
    }
}

impl Mul for Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: Dyadic) -> Dyadic {
        Dyadic::new(self.num * rhs.num, self.log2 + rhs.log2)
    }
}

impl std::iter::Sum for Dyadic {
    fn sum<I: Iterator<Item = Dyadic>>(iter: I) -> Dyadic {
        iter.fold(Dyadic::ZERO, |a, b| a + b)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let l = self.log2.max(other.log2);
        self.numerator_at(l).cmp(&other.numerator_at(l))
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.log2 == 0 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, 1u128 << self.log2)
        }
    }
}

/// JSON form `{num, den}` for any exact rational.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RationalJson {
    pub num: serde_json::Value,
    pub den: serde_json::Value,
}

fn int_json(v: &BigInt) -> serde_json::Value {
    match i64::try_from(v) {
        Ok(x) => serde_json::Value::from(x),
        Err(_) => serde_json::Value::from(v.to_string()),
    }
}

impl RationalJson {
    pub fn from_ratio(r: &Ratio) -> RationalJson {
        RationalJson { num: int_json(r.numer()), den: int_json(r.denom()) }
    }
}

impl Serialize for Dyadic {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        RationalJson::from_ratio(&self.to_ratio()).serialize(s)
    }
}

/// Serialize a [`Ratio`] as `{num, den}`; for use with `serialize_with`.
pub fn serialize_ratio<S: Serializer>(r: &Ratio, s: S) -> Result<S::Ok, S::Error> {
    RationalJson::from_ratio(r).serialize(s)
}

/// `|r|` for a general rational.
pub fn ratio_abs(r: &Ratio) -> Ratio {
    r.abs()
}

pub fn ratio_from_int(v: i64) -> Ratio {
    Ratio::from_integer(BigInt::from(v))
}

pub fn ratio_zero() -> Ratio {
    Ratio::zero()
}

pub fn ratio_to_f64(r: &Ratio) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalizes_and_adds() {
        let a = Dyadic::new(2, 2);
        assert_eq!(a, Dyadic::new(1, 1));
        assert_eq!(a + a, Dyadic::ONE);
        assert_eq!(Dyadic::new(1, 2) - Dyadic::new(1, 1), Dyadic::new(-1, 2));
        assert_eq!(Dyadic::new(3, 2) * Dyadic::new(1, 1), Dyadic::new(3, 3));
        assert!(Dyadic::new(1, 3) < Dyadic::new(1, 2));
        assert_eq!(Dyadic::new(0, 7), Dyadic::ZERO);
    }

    #[test]
    fn json_shape() {
        let v = serde_json::to_value(Dyadic::new(3, 4)).unwrap();
        assert_eq!(v, serde_json::json!({"num": 3, "den": 16}));
    }
}
