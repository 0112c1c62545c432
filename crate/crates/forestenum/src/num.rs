//! Unbounded natural numbers with an inline machine-word fast path.
//!
//! Sizes and preorder offsets in an f-SLP can be exponential in the grammar
//! size, so every constant carried by a preorder effect is a [`Num`].

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Sub};

use num_bigint::BigUint;

/// A natural number. Values that fit in a `u64` never allocate.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Num {
    Small(u64),
    Big(Box<BigUint>),
}

impl Num {
    pub const ZERO: Num = Num::Small(0);
    pub const ONE: Num = Num::Small(1);

    fn from_big(b: BigUint) -> Num {
        match u64::try_from(&b) {
            Ok(v) => Num::Small(v),
            Err(_) => Num::Big(Box::new(b)),
        }
    }

    fn to_big(&self) -> BigUint {
        match self {
            Num::Small(v) => BigUint::from(*v),
            Num::Big(b) => (**b).clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Num::Small(0))
    }

    /// The value as a `u64`, if it fits.
    pub fn to_u64(&self) -> Option<u64> {
        match self {
            Num::Small(v) => Some(*v),
            Num::Big(_) => None,
        }
    }

    /// The value as a `usize`, if it fits.
    pub fn to_usize(&self) -> Option<usize> {
        self.to_u64().and_then(|v| usize::try_from(v).ok())
    }

    /// `self - rhs`, or `None` if the result would be negative.
    pub fn checked_sub(&self, rhs: &Num) -> Option<Num> {
        match (self, rhs) {
            (Num::Small(a), Num::Small(b)) => a.checked_sub(*b).map(Num::Small),
            _ if self < rhs => None,
            _ => Some(Num::from_big(self.to_big() - rhs.to_big())),
        }
    }

    /// Quotient and remainder by a nonzero `d`.
    pub fn div_rem_u64(&self, d: u64) -> (Num, u64) {
        assert!(d != 0, "division by zero");
        match self {
            Num::Small(v) => (Num::Small(v / d), v % d),
            Num::Big(b) => {
                let d = BigUint::from(d);
                let r = u64::try_from(&**b % &d).expect("remainder below divisor");
                (Num::from_big(&**b / d), r)
            }
        }
    }

    /// `self * k`.
    pub fn mul_u64(&self, k: u64) -> Num {
        match self {
            Num::Small(v) => match v.checked_mul(k) {
                Some(p) => Num::Small(p),
                None => Num::from_big(BigUint::from(*v) * k),
            },
            Num::Big(b) => Num::from_big(&**b * k),
        }
    }

    /// Number of bits needed to represent the value (0 for zero).
    pub fn bits(&self) -> u64 {
        match self {
            Num::Small(v) => 64 - u64::from(v.leading_zeros()),
            Num::Big(b) => b.bits(),
        }
    }
}

impl Default for Num {
    fn default() -> Self {
        Num::ZERO
    }
}

impl From<u64> for Num {
    fn from(v: u64) -> Self {
        Num::Small(v)
    }
}

impl From<usize> for Num {
    fn from(v: usize) -> Self {
        Num::Small(v as u64)
    }
}

impl From<BigUint> for Num {
    fn from(b: BigUint) -> Self {
        Num::from_big(b)
    }
}

impl Ord for Num {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Num::Small(a), Num::Small(b)) => a.cmp(b),
            (Num::Small(_), Num::Big(_)) => Ordering::Less,
            (Num::Big(_), Num::Small(_)) => Ordering::Greater,
            (Num::Big(a), Num::Big(b)) => a.cmp(b),
        }
    }
}

impl PartialOrd for Num {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add<&Num> for &Num {
    type Output = Num;
    fn add(self, rhs: &Num) -> Num {
        if let (Num::Small(a), Num::Small(b)) = (self, rhs) {
            if let Some(s) = a.checked_add(*b) {
                return Num::Small(s);
            }
        }
        Num::from_big(self.to_big() + rhs.to_big())
    }
}

impl Add<Num> for Num {
    type Output = Num;
    fn add(self, rhs: Num) -> Num {
        &self + &rhs
    }
}

impl Add<&Num> for Num {
    type Output = Num;
    fn add(self, rhs: &Num) -> Num {
        &self + rhs
    }
}

impl Add<u64> for &Num {
    type Output = Num;
    fn add(self, rhs: u64) -> Num {
        self + &Num::Small(rhs)
    }
}

impl Sub<&Num> for &Num {
    type Output = Num;
    /// Panics on underflow.
    fn sub(self, rhs: &Num) -> Num {
        self.checked_sub(rhs).expect("natural number underflow")
    }
}

impl fmt::Display for Num {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Num::Small(v) => write!(f, "{v}"),
            Num::Big(b) => write!(f, "{b}"),
        }
    }
}

impl fmt::Debug for Num {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_arithmetic_stays_inline() {
        let a = Num::from(40u64);
        let b = Num::from(2u64);
        assert_eq!(&a + &b, Num::Small(42));
        assert_eq!(&a - &b, Num::Small(38));
        assert_eq!(b.checked_sub(&a), None);
    }

    #[test]
    fn overflow_promotes_and_demotes() {
        let max = Num::from(u64::MAX);
        let big = &max + &Num::ONE;
        assert!(matches!(big, Num::Big(_)));
        assert_eq!(big.to_string(), "18446744073709551616");
        let back = &big - &Num::ONE;
        assert_eq!(back, Num::Small(u64::MAX));
        assert!(big > max);
        assert_eq!(big.bits(), 65);
    }

    #[test]
    fn doubling_matches_bigint() {
        let mut n = Num::ONE;
        let mut b = BigUint::from(1u32);
        for _ in 0..200 {
            n = &n + &n;
            b = &b + &b;
        }
        assert_eq!(n, Num::from(b));
    }
}
