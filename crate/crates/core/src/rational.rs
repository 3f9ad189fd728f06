//! Exact rational scalars.
//!
//! Every length, height, coefficient and Busemann value in this crate is a
//! [`Rational`]: an arbitrary-precision fraction kept in lowest terms with a
//! positive denominator. On the wire a rational is the string `"p/q"`, or
//! `"p"` when the denominator is one.

use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::Error;

pub type Rational = num_rational::BigRational;

/// `n / d` as an exact rational. Panics if `d == 0`.
pub fn q(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// The integer `n` as a rational.
pub fn qi(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn parse(s: &str) -> Result<Rational, Error> {
    let t = s.trim();
    if t.is_empty() {
        return Err(Error::Parse("empty rational literal".into()));
    }
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n, d),
        None => (t, "1"),
    };
    let num = BigInt::from_str(num.trim())
        .map_err(|_| Error::Parse(format!("bad rational numerator in {s:?}")))?;
    let den = BigInt::from_str(den.trim())
        .map_err(|_| Error::Parse(format!("bad rational denominator in {s:?}")))?;
    if den.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(Rational::new(num, den))
}

/// Canonical wire form: `"p/q"` in lowest terms, `"p"` for integers.
pub fn format(x: &Rational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn is_positive(x: &Rational) -> bool {
    x.is_positive()
}

/// Least common multiple of the denominators, used to move a finite batch
/// of rationals onto a common integer grid without losing exactness.
pub fn common_denominator<'a>(xs: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    use num_integer::Integer;
    xs.into_iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

/// Serde adapter for a single rational field stored as a string.
pub mod serde_str {
    use serde::{Deserialize, Deserializer, Serializer};

    use super::Rational;

    pub fn serialize<S: Serializer>(x: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&super::format(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let raw = String::deserialize(d)?;
        super::parse(&raw).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_integers() {
        assert_eq!(parse("3/2").unwrap(), q(3, 2));
        assert_eq!(parse("-7").unwrap(), qi(-7));
        assert_eq!(parse(" 2/4 ").unwrap(), q(1, 2));
        assert!(parse("1/0").is_err());
        assert!(parse("x").is_err());
        assert!(parse("").is_err());
    }

    #[test]
    fn formats_in_lowest_terms() {
        assert_eq!(format(&q(4, 2)), "2");
        assert_eq!(format(&q(-3, 6)), "-1/2");
        assert_eq!(format(&q(0, 5)), "0");
    }

    #[test]
    fn common_denominator_is_lcm() {
        let xs = [q(1, 4), q(1, 6), qi(3)];
        assert_eq!(common_denominator(xs.iter()), BigInt::from(12));
    }
}
