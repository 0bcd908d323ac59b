//! Exact half-integers.
//!
//! The algebraic quantization conditions are statements about numbers of the
//! form `p/2`; storing `2j` as an integer keeps equality and ordering exact.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// An exact number `twice / 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HalfInteger {
    twice: i64,
}

// Largest |2j| that survives a round trip through f64 without loss.
const MAX_TWICE: i64 = 1 << 52;

impl HalfInteger {
    pub const HALF: HalfInteger = HalfInteger { twice: 1 };

    pub fn from_twice(twice: i64) -> Self {
        Self { twice }
    }

    pub fn from_integer(n: i64) -> Self {
        Self { twice: 2 * n }
    }

    /// Returns `Some` only when `2v` is an integer exactly representable in `f64`.
    pub fn from_f64_exact(v: f64) -> Option<Self> {
        if !v.is_finite() {
            return None;
        }
        let t = 2.0 * v;
        if t.fract() != 0.0 || t.abs() > MAX_TWICE as f64 {
            return None;
        }
        Some(Self { twice: t as i64 })
    }

    pub fn twice_value(self) -> i64 {
        self.twice
    }

    pub fn value(self) -> f64 {
        self.twice as f64 / 2.0
    }

    /// `p/2` with `p` odd.
    pub fn is_half_odd(self) -> bool {
        self.twice.rem_euclid(2) == 1
    }

    pub fn is_integer(self) -> bool {
        !self.is_half_odd()
    }

    /// `1 - self`, the partner under the `j -> 1 - j` symmetry.
    pub fn mirror(self) -> Self {
        Self { twice: 2 - self.twice }
    }

    pub fn checked_add_int(self, n: i64) -> Option<Self> {
        self.twice.checked_add(2 * n).map(|twice| Self { twice })
    }

    /// Exact test of `self^2 < g` for `self > 0`: `(2v)^2 < 4g`, where both
    /// sides are computed without rounding for the magnitudes we accept.
    pub fn square_lt(self, g: f64) -> bool {
        let t = self.twice as f64;
        t * t < 4.0 * g
    }
}

impl Ord for HalfInteger {
    fn cmp(&self, other: &Self) -> Ordering {
        self.twice.cmp(&other.twice)
    }
}

impl PartialOrd for HalfInteger {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for HalfInteger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.twice % 2 == 0 {
            write!(f, "{}", self.twice / 2)
        } else {
            write!(f, "{}/2", self.twice)
        }
    }
}

impl Serialize for HalfInteger {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl FromStr for HalfInteger {
    type Err = Error;

    /// Accepts `p/2`, `p/1`, an integer, or a decimal whose double is an exact integer.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some((num, den)) = s.split_once('/') {
            let p: i64 = num
                .trim()
                .parse()
                .map_err(|_| Error::InvalidInput(format!("bad numerator in {s:?}")))?;
            let q: i64 = den
                .trim()
                .parse()
                .map_err(|_| Error::InvalidInput(format!("bad denominator in {s:?}")))?;
            return match q {
                1 => p
                    .checked_mul(2)
                    .map(Self::from_twice)
                    .ok_or_else(|| Error::InvalidInput(format!("{s:?} overflows"))),
                2 => Ok(Self::from_twice(p)),
                _ => Err(Error::InvalidInput(format!(
                    "{s:?} is not a half-integer (denominator must be 1 or 2)"
                ))),
            };
        }
        let v: f64 = s
            .parse()
            .map_err(|_| Error::InvalidInput(format!("cannot parse {s:?} as a number")))?;
        Self::from_f64_exact(v)
            .ok_or_else(|| Error::InvalidInput(format!("{s:?} is not an exact half-integer")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_fraction_and_decimal_forms() {
        assert_eq!("3/2".parse::<HalfInteger>().unwrap().twice_value(), 3);
        assert_eq!("-5/2".parse::<HalfInteger>().unwrap().twice_value(), -5);
        assert_eq!("2".parse::<HalfInteger>().unwrap().twice_value(), 4);
        assert_eq!("2.5".parse::<HalfInteger>().unwrap().twice_value(), 5);
        assert_eq!("4/1".parse::<HalfInteger>().unwrap().twice_value(), 8);
        assert!("1.7".parse::<HalfInteger>().is_err());
        assert!("1/3".parse::<HalfInteger>().is_err());
        assert!("abc".parse::<HalfInteger>().is_err());
    }

    #[test]
    fn half_odd_detection() {
        assert!(HalfInteger::from_twice(1).is_half_odd());
        assert!(HalfInteger::from_twice(-3).is_half_odd());
        assert!(!HalfInteger::from_twice(4).is_half_odd());
        assert!(HalfInteger::from_twice(0).is_integer());
    }

    #[test]
    fn strict_square_comparison() {
        // 3^2 = 9 is not strictly below g = 9.
        assert!(!HalfInteger::from_twice(6).square_lt(9.0));
        assert!(HalfInteger::from_twice(5).square_lt(9.0));
        assert!(HalfInteger::from_twice(1).square_lt(0.2500001));
        assert!(!HalfInteger::from_twice(1).square_lt(0.25));
    }

    #[test]
    fn display_round_trips() {
        for t in [-7, -2, 0, 1, 3, 10] {
            let h = HalfInteger::from_twice(t);
            assert_eq!(h.to_string().parse::<HalfInteger>().unwrap(), h);
        }
    }

    proptest! {
        #[test]
        fn value_and_ordering_are_exact(a in -1_000_000i64..1_000_000, b in -1_000_000i64..1_000_000) {
            let (x, y) = (HalfInteger::from_twice(a), HalfInteger::from_twice(b));
            prop_assert_eq!(x.cmp(&y), a.cmp(&b));
            prop_assert_eq!(HalfInteger::from_f64_exact(x.value()), Some(x));
            prop_assert_eq!(x.mirror().mirror(), x);
            prop_assert_eq!(x.mirror().value(), 1.0 - x.value());
        }
    }
}
