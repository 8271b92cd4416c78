//! Exact integers, rationals and Gaussian rationals, plus the falling
//! factorial `f(a, n)` every count is built from.
//!
//! Counting code is written against the [`Exact`] trait so that sweeps can
//! run on checked `i128` and fall back to [`Integer`] only when a value
//! actually overflows.

mod exact;
mod gaussian;

pub use exact::{Exact, ExactError};
pub use gaussian::{GaussianRational, ParseError};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

/// Arbitrary-precision signed integer.
pub type Integer = BigInt;
/// Arbitrary-precision rational, always in lowest terms with positive denominator.
pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

/// `f(a, n) = a (a-1) ... (a-n+3)` for `n >= 2` (empty product when `n = 2`),
/// and `1 / (a+1)` for `n = 1`.
///
/// Evaluated as a product rather than a quotient of factorials, so negative
/// `a` is fine.
pub fn falling_f(a: &Integer, n: u32) -> Result<Rational, ArithError> {
    match n {
        0 => Err(ArithError::InvalidArgument("falling_f needs n >= 1")),
        1 => {
            let denom: Integer = a + 1;
            if denom.is_zero() {
                Err(ArithError::DivisionByZero)
            } else {
                Ok(Rational::new(Integer::one(), denom))
            }
        }
        _ => Ok(Rational::from_integer(falling_int(a, n))),
    }
}

/// Integer branch of [`falling_f`], `n >= 2`.
pub fn falling_int(a: &Integer, n: u32) -> Integer {
    debug_assert!(n >= 2);
    let mut acc = Integer::one();
    let mut factor = a.clone();
    for _ in 0..n.saturating_sub(2) {
        acc *= &factor;
        factor -= 1;
    }
    acc
}

/// [`falling_int`] over any [`Exact`] scalar; `n >= 2`.
pub fn falling_exact<T: Exact>(a: i128, n: usize) -> Result<T, ExactError> {
    debug_assert!(n >= 2);
    let mut acc = T::exact_one();
    for j in 0..n - 2 {
        let factor = a.checked_sub(j as i128).ok_or(ExactError::Overflow)?;
        acc = acc.try_mul(&T::from_i128(factor)?)?;
        if acc.vanishes() {
            break;
        }
    }
    Ok(acc)
}

/// `n!` as an [`Integer`].
pub fn factorial(n: u64) -> Integer {
    (2..=n).fold(Integer::one(), |acc, k| acc * k)
}
