use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer as _;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Failure of an [`Exact`] operation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum ExactError {
    /// The value does not fit the scalar (never produced by `BigInt`).
    #[error("overflow")]
    Overflow,
    /// An exact division left a remainder.
    #[error("inexact division")]
    Inexact,
    #[error("division by zero")]
    DivisionByZero,
}

/// Exact integer arithmetic with checked operations.
///
/// Implemented for `i128` (checked, reports [`ExactError::Overflow`]) and
/// for `BigInt` (never overflows).
pub trait Exact: Clone + fmt::Debug + PartialEq + Sized {
    fn from_i128(v: i128) -> Result<Self, ExactError>;
    fn exact_zero() -> Self;
    fn exact_one() -> Self;
    fn try_add(&self, rhs: &Self) -> Result<Self, ExactError>;
    fn try_sub(&self, rhs: &Self) -> Result<Self, ExactError>;
    fn try_mul(&self, rhs: &Self) -> Result<Self, ExactError>;
    /// Division that must leave no remainder.
    fn exact_div(&self, rhs: &Self) -> Result<Self, ExactError>;
    fn vanishes(&self) -> bool;
    fn is_neg(&self) -> bool;
    fn to_integer(&self) -> BigInt;

    fn try_neg(&self) -> Result<Self, ExactError> {
        Self::exact_zero().try_sub(self)
    }

    fn try_pow(&self, exp: usize) -> Result<Self, ExactError> {
        let mut acc = Self::exact_one();
        for _ in 0..exp {
            acc = acc.try_mul(self)?;
        }
        Ok(acc)
    }
}

impl Exact for i128 {
    fn from_i128(v: i128) -> Result<Self, ExactError> {
        Ok(v)
    }
    fn exact_zero() -> Self {
        0
    }
    fn exact_one() -> Self {
        1
    }
    fn try_add(&self, rhs: &Self) -> Result<Self, ExactError> {
        self.checked_add(*rhs).ok_or(ExactError::Overflow)
    }
    fn try_sub(&self, rhs: &Self) -> Result<Self, ExactError> {
        self.checked_sub(*rhs).ok_or(ExactError::Overflow)
    }
    fn try_mul(&self, rhs: &Self) -> Result<Self, ExactError> {
        self.checked_mul(*rhs).ok_or(ExactError::Overflow)
    }
    fn exact_div(&self, rhs: &Self) -> Result<Self, ExactError> {
        if *rhs == 0 {
            return Err(ExactError::DivisionByZero);
        }
        let (q, r) = (
            self.checked_div(*rhs).ok_or(ExactError::Overflow)?,
            self.checked_rem(*rhs).ok_or(ExactError::Overflow)?,
        );
        if r != 0 {
            Err(ExactError::Inexact)
        } else {
            Ok(q)
        }
    }
    fn vanishes(&self) -> bool {
        *self == 0
    }
    fn is_neg(&self) -> bool {
        *self < 0
    }
    fn to_integer(&self) -> BigInt {
        BigInt::from(*self)
    }
}

impl Exact for BigInt {
    fn from_i128(v: i128) -> Result<Self, ExactError> {
        Ok(BigInt::from(v))
    }
    fn exact_zero() -> Self {
        Zero::zero()
    }
    fn exact_one() -> Self {
        One::one()
    }
    fn try_add(&self, rhs: &Self) -> Result<Self, ExactError> {
        Ok(self + rhs)
    }
    fn try_sub(&self, rhs: &Self) -> Result<Self, ExactError> {
        Ok(self - rhs)
    }
    fn try_mul(&self, rhs: &Self) -> Result<Self, ExactError> {
        Ok(self * rhs)
    }
    fn exact_div(&self, rhs: &Self) -> Result<Self, ExactError> {
        if Zero::is_zero(rhs) {
            return Err(ExactError::DivisionByZero);
        }
        let (q, r) = self.div_rem(rhs);
        if Zero::is_zero(&r) {
            Ok(q)
        } else {
            Err(ExactError::Inexact)
        }
    }
    fn vanishes(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_neg(&self) -> bool {
        Signed::is_negative(self)
    }
    fn to_integer(&self) -> BigInt {
        self.clone()
    }
}
