//! Ordered additive scalars shared by the exact solvers.

use std::fmt::Debug;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::fixed::Fixed;

pub trait Scalar:
    Clone + Ord + Debug + Add<Output = Self> + Sub<Output = Self> + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn mul_int(&self, k: i64) -> Self;
}

macro_rules! prim_scalar {
    ($($t:ty),*) => {$(
        impl Scalar for $t {
            fn zero() -> Self { 0 }
            fn one() -> Self { 1 }
            fn mul_int(&self, k: i64) -> Self { self * (k as $t) }
        }
    )*};
}

prim_scalar!(i64, i128);

impl Scalar for BigInt {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn mul_int(&self, k: i64) -> Self {
        self * BigInt::from(k)
    }
}

impl Scalar for Fixed {
    fn zero() -> Self {
        Fixed::ZERO
    }
    fn one() -> Self {
        Fixed::ONE
    }
    fn mul_int(&self, k: i64) -> Self {
        Fixed::mul_int(*self, k)
    }
}
