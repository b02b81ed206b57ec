use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{Num, ToPrimitive};

/// Exact ordered field used for the size grid.
///
/// Only exact rationals implement this; rounding decisions at grid
/// boundaries must not depend on floating-point ties.
pub trait ExactScalar: Num + Clone + Ord + Debug + Display + Send + Sync + 'static {
    fn from_u64(value: u64) -> Self;

    fn from_fraction(numer: u64, denom: u64) -> Self;

    /// Smallest integer not below `self`, for nonnegative values.
    fn ceil_u64(&self) -> u64;

    fn mul_u64(&self, factor: u64) -> Self {
        self.clone() * Self::from_u64(factor)
    }
}

macro_rules! impl_primitive_ratio {
    ($int:ty) => {
        impl ExactScalar for Ratio<$int> {
            fn from_u64(value: u64) -> Self {
                Ratio::from_integer(<$int>::try_from(value).expect("value exceeds scalar range"))
            }

            fn from_fraction(numer: u64, denom: u64) -> Self {
                Ratio::new(
                    <$int>::try_from(numer).expect("value exceeds scalar range"),
                    <$int>::try_from(denom).expect("value exceeds scalar range"),
                )
            }

            fn ceil_u64(&self) -> u64 {
                self.ceil()
                    .to_integer()
                    .to_u64()
                    .expect("ceil of a negative or oversized value")
            }
        }
    };
}

impl_primitive_ratio!(i64);
impl_primitive_ratio!(i128);

impl ExactScalar for BigRational {
    fn from_u64(value: u64) -> Self {
        Ratio::from_integer(BigInt::from(value))
    }

    fn from_fraction(numer: u64, denom: u64) -> Self {
        Ratio::new(BigInt::from(numer), BigInt::from(denom))
    }

    fn ceil_u64(&self) -> u64 {
        self.ceil()
            .to_integer()
            .to_u64()
            .expect("ceil of a negative or oversized value")
    }
}
