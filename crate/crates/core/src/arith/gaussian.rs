use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use super::{ArithError, Rational};

/// Element of `Q(i)`: `re + im * i` with exact rational parts.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct GaussianRational {
    pub re: Rational,
    pub im: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at byte {pos}: {msg}")]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

impl GaussianRational {
    pub fn new(re: Rational, im: Rational) -> Self {
        Self { re, im }
    }

    pub fn real(re: Rational) -> Self {
        Self { re, im: Rational::zero() }
    }

    pub fn from_int(v: i64) -> Self {
        Self::real(Rational::from_integer(BigInt::from(v)))
    }

    /// `p/q` as a real value; `q` must be nonzero.
    pub fn from_ratio(p: i64, q: i64) -> Self {
        Self::real(Rational::new(BigInt::from(p), BigInt::from(q)))
    }

    pub fn i() -> Self {
        Self { re: Rational::zero(), im: Rational::one() }
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self { re: self.re.clone(), im: -self.im.clone() }
    }

    /// `re^2 + im^2`.
    pub fn norm_sqr(&self) -> Rational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn inv(&self) -> Result<Self, ArithError> {
        let norm = self.norm_sqr();
        if norm.is_zero() {
            return Err(ArithError::DivisionByZero);
        }
        Ok(Self { re: &self.re / &norm, im: -(&self.im / &norm) })
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self, ArithError> {
        Ok(self * &rhs.inv()?)
    }

    /// Parse the canonical text form: `<rat>`, `<rat>i`, `i`, or
    /// `<rat>(+|-)<rat>i`, where `<rat>` is an optionally signed integer
    /// or `p/q`.
    pub fn parse(text: &str) -> Result<Self, ArithError> {
        Parser::new(text).parse()
    }
}

impl Zero for GaussianRational {
    fn zero() -> Self {
        Self::default()
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for GaussianRational {
    fn one() -> Self {
        Self::real(Rational::one())
    }
}

impl From<Rational> for GaussianRational {
    fn from(re: Rational) -> Self {
        Self::real(re)
    }
}

impl FromStr for GaussianRational {
    type Err = ArithError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse(s)
    }
}

impl<'a> Add<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn add(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational { re: &self.re + &rhs.re, im: &self.im + &rhs.im }
    }
}

impl<'a> Sub<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn sub(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational { re: &self.re - &rhs.re, im: &self.im - &rhs.im }
    }
}

impl<'a> Mul<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn mul(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }
}

impl Neg for &GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational { re: -self.re.clone(), im: -self.im.clone() }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident) => {
        impl $tr<GaussianRational> for GaussianRational {
            type Output = GaussianRational;
            fn $method(self, rhs: GaussianRational) -> GaussianRational {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $tr<&'a GaussianRational> for GaussianRational {
            type Output = GaussianRational;
            fn $method(self, rhs: &GaussianRational) -> GaussianRational {
                (&self).$method(rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        -&self
    }
}

impl<'a> std::iter::Sum<&'a GaussianRational> for GaussianRational {
    fn sum<I: Iterator<Item = &'a GaussianRational>>(iter: I) -> Self {
        iter.fold(Self::zero(), |acc, x| acc + x)
    }
}

impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            return write!(f, "{}", self.re);
        }
        if !self.re.is_zero() {
            write!(f, "{}", self.re)?;
            f.write_str(if self.im.is_negative() { "-" } else { "+" })?;
        } else if self.im.is_negative() {
            f.write_str("-")?;
        }
        let mag = self.im.abs();
        if mag.is_one() {
            f.write_str("i")
        } else {
            write!(f, "{mag}i")
        }
    }
}

struct Parser<'a> {
    text: &'a str,
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Self { text, bytes: text.as_bytes(), pos: 0 }
    }

    fn error<T>(&self, msg: impl Into<String>) -> Result<T, ArithError> {
        Err(ParseError { pos: self.pos, msg: msg.into() }.into())
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(b) if b.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn sign(&mut self) -> bool {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                true
            }
            Some(b'+') => {
                self.pos += 1;
                false
            }
            _ => false,
        }
    }

    fn digits(&mut self) -> Result<BigInt, ArithError> {
        let start = self.pos;
        while matches!(self.peek(), Some(b) if b.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return self.error("expected digits");
        }
        // ASCII digits only, so this cannot fail.
        Ok(self.text[start..self.pos].parse().expect("digit run"))
    }

    /// Unsigned `p` or `p/q`.
    fn magnitude(&mut self) -> Result<Rational, ArithError> {
        let numer = self.digits()?;
        if self.peek() == Some(b'/') {
            self.pos += 1;
            let denom = self.digits()?;
            if denom.is_zero() {
                return Err(ArithError::DivisionByZero);
            }
            Ok(Rational::new(numer, denom))
        } else {
            Ok(Rational::from_integer(numer))
        }
    }

    /// `[<magnitude>] i`, with the leading sign already consumed.
    fn imaginary(&mut self, negative: bool) -> Result<Rational, ArithError> {
        let mag = if self.peek() == Some(b'i') {
            Rational::one()
        } else {
            self.magnitude()?
        };
        if self.peek() != Some(b'i') {
            return self.error("expected 'i'");
        }
        self.pos += 1;
        Ok(if negative { -mag } else { mag })
    }

    fn parse(mut self) -> Result<GaussianRational, ArithError> {
        self.skip_ws();
        if self.peek().is_none() {
            return self.error("empty input");
        }
        let negative = self.sign();
        let value = if self.peek() == Some(b'i') {
            GaussianRational::new(Rational::zero(), self.imaginary(negative)?)
        } else {
            let mag = self.magnitude()?;
            let first = if negative { -mag } else { mag };
            match self.peek() {
                Some(b'i') => {
                    self.pos += 1;
                    GaussianRational::new(Rational::zero(), first)
                }
                Some(b'+') | Some(b'-') => {
                    let neg_im = self.sign();
                    if !matches!(self.peek(), Some(b) if b == b'i' || b.is_ascii_digit()) {
                        return self.error("expected imaginary part");
                    }
                    GaussianRational::new(first, self.imaginary(neg_im)?)
                }
                _ => GaussianRational::real(first),
            }
        };
        self.skip_ws();
        if self.pos != self.bytes.len() {
            return self.error("unexpected trailing input");
        }
        Ok(value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn g(text: &str) -> GaussianRational {
        GaussianRational::parse(text).unwrap()
    }

    fn rat(p: i64, q: i64) -> Rational {
        Rational::new(BigInt::from(p), BigInt::from(q))
    }

    #[test]
    fn parses_grammar_cases() {
        assert_eq!(g("3/2-1/3i"), GaussianRational::new(rat(3, 2), rat(-1, 3)));
        assert_eq!(g("0"), GaussianRational::zero());
        assert_eq!(g("i"), GaussianRational::i());
        assert_eq!(g("-i"), GaussianRational::new(rat(0, 1), rat(-1, 1)));
        assert_eq!(g("-7"), GaussianRational::from_int(-7));
        assert_eq!(g("+4/6"), GaussianRational::from_ratio(2, 3));
        assert_eq!(g("2i"), GaussianRational::new(rat(0, 1), rat(2, 1)));
        assert_eq!(g("1+i"), GaussianRational::new(rat(1, 1), rat(1, 1)));
        assert_eq!(g(" -1/2+5i "), GaussianRational::new(rat(-1, 2), rat(5, 1)));
    }

    #[test]
    fn rejects_malformed_input() {
        for bad in ["", "1/", "/2", "1+", "1+2", "ii", "1 2", "3/2i+1", "1/2/3", "--1", "x"] {
            match GaussianRational::parse(bad) {
                Err(ArithError::Parse(_)) => {}
                other => panic!("{bad:?} gave {other:?}"),
            }
        }
        let err = GaussianRational::parse("12+3x").unwrap_err();
        assert_eq!(err, ArithError::Parse(ParseError { pos: 4, msg: "expected 'i'".into() }));
    }

    #[test]
    fn zero_denominator() {
        assert_eq!(GaussianRational::parse("1/0"), Err(ArithError::DivisionByZero));
        assert_eq!(GaussianRational::parse("1+2/0i"), Err(ArithError::DivisionByZero));
    }

    #[test]
    fn canonical_printing() {
        assert_eq!(g("6/4-2/6i").to_string(), "3/2-1/3i");
        assert_eq!(g("0i").to_string(), "0");
        assert_eq!(g("1i").to_string(), "i");
        assert_eq!(g("-1i").to_string(), "-i");
        assert_eq!(g("2-1i").to_string(), "2-i");
        assert_eq!(g("-5/10").to_string(), "-1/2");
    }

    #[test]
    fn division_by_zero_is_an_error() {
        assert_eq!(g("3").checked_div(&g("0")), Err(ArithError::DivisionByZero));
        assert_eq!(g("1+i").checked_div(&g("1-i")).unwrap(), g("i"));
    }

    fn arb_rational() -> impl Strategy<Value = Rational> {
        (-50i64..50, 1i64..20).prop_map(|(p, q)| rat(p, q))
    }

    fn arb_gaussian() -> impl Strategy<Value = GaussianRational> {
        (arb_rational(), arb_rational()).prop_map(|(re, im)| GaussianRational::new(re, im))
    }

    proptest! {
        #[test]
        fn text_round_trip(x in arb_gaussian()) {
            let printed = x.to_string();
            let back = GaussianRational::parse(&printed).unwrap();
            prop_assert_eq!(&back, &x);
            prop_assert_eq!(back.to_string(), printed);
        }

        #[test]
        fn multiply_then_divide(x in arb_gaussian(), y in arb_gaussian()) {
            prop_assume!(!y.is_zero());
            prop_assert_eq!((&x * &y).checked_div(&y).unwrap(), x);
        }
    }
}
