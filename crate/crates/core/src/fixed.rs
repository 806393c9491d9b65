//! Signed fixed-point scalar with 192 fractional bits on a 256-bit integer.
//!
//! Each square root is rounded down once when it is created; everything after
//! that is exact integer arithmetic, so sums and comparisons are reproducible.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Neg, Sub, SubAssign};

use ethnum::I256;
use num_bigint::{BigInt, BigUint};

use crate::exact::floor_sqrt;

pub const FRAC_BITS: u32 = 192;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Fixed(I256);

impl Fixed {
    pub const ZERO: Fixed = Fixed(I256::ZERO);
    pub const ONE: Fixed = Fixed(I256::from_words(1 << (FRAC_BITS - 128), 0));

    pub fn from_int(v: i64) -> Fixed {
        Fixed(I256::from(v) << FRAC_BITS)
    }

    /// `⌊√s · 2^192⌋ / 2^192`.
    pub fn sqrt(s: u64) -> Fixed {
        let r = floor_sqrt(&(BigUint::from(s) << (2 * FRAC_BITS as u64)));
        Fixed::from_raw_big(&BigInt::from(r))
    }

    pub fn from_raw(raw: I256) -> Fixed {
        Fixed(raw)
    }

    pub fn raw(self) -> I256 {
        self.0
    }

    pub fn from_raw_big(v: &BigInt) -> Fixed {
        let bytes = v.to_signed_bytes_le();
        assert!(bytes.len() <= 32, "fixed-point overflow");
        let fill = if v.sign() == num_bigint::Sign::Minus { 0xff } else { 0 };
        let mut buf = [fill; 32];
        buf[..bytes.len()].copy_from_slice(&bytes);
        Fixed(I256::from_le_bytes(buf))
    }

    pub fn to_raw_big(self) -> BigInt {
        BigInt::from_signed_bytes_le(&self.0.to_le_bytes())
    }

    pub fn mul_int(self, k: i64) -> Fixed {
        Fixed(self.0 * I256::from(k))
    }

    pub fn to_f64(self) -> f64 {
        self.0.as_f64() / 2f64.powi(FRAC_BITS as i32)
    }

    pub fn is_negative(self) -> bool {
        self.0 < 0
    }
}

impl Add for Fixed {
    type Output = Fixed;
    fn add(self, rhs: Fixed) -> Fixed {
        Fixed(self.0 + rhs.0)
    }
}

impl Sub for Fixed {
    type Output = Fixed;
    fn sub(self, rhs: Fixed) -> Fixed {
        Fixed(self.0 - rhs.0)
    }
}

impl Neg for Fixed {
    type Output = Fixed;
    fn neg(self) -> Fixed {
        Fixed(-self.0)
    }
}

impl AddAssign for Fixed {
    fn add_assign(&mut self, rhs: Fixed) {
        self.0 += rhs.0;
    }
}

impl SubAssign for Fixed {
    fn sub_assign(&mut self, rhs: Fixed) {
        self.0 -= rhs.0;
    }
}

impl Sum for Fixed {
    fn sum<I: Iterator<Item = Fixed>>(iter: I) -> Fixed {
        iter.fold(Fixed::ZERO, |a, b| a + b)
    }
}

impl fmt::Display for Fixed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.12}", self.to_f64())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt_of_squares_is_exact() {
        assert_eq!(Fixed::sqrt(9), Fixed::from_int(3));
        assert_eq!(Fixed::sqrt(0), Fixed::ZERO);
        assert_eq!(Fixed::sqrt(1), Fixed::ONE);
    }

    #[test]
    fn ordering_and_arith() {
        let a = Fixed::sqrt(2) + Fixed::sqrt(3);
        let b = Fixed::sqrt(10);
        assert!(a < b);
        assert!(Fixed::sqrt(8) > Fixed::sqrt(2) + Fixed::ONE);
    }

    #[test]
    fn big_roundtrip() {
        let x = Fixed::sqrt(7) - Fixed::from_int(40);
        assert_eq!(Fixed::from_raw_big(&x.to_raw_big()), x);
        assert!((x.to_f64() - (7f64.sqrt() - 40.0)).abs() < 1e-12);
        assert_eq!(Fixed::ONE.mul_int(-3), Fixed::from_int(-3));
    }
}
