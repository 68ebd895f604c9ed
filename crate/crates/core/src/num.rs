//! Exact rational scalars and their text form.
//!
//! `Rat` is the coefficient type used everywhere in this crate. The text
//! form is `num/den` (or a bare integer when the denominator is 1); it is
//! shared by the CSV point/line formats and the JSON reports.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::Error;

/// Arbitrary-precision rational, always in lowest terms with positive
/// denominator (enforced by `num-rational`).
pub type Rat = num_rational::BigRational;

/// Rational from an integer.
pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Rational from a numerator/denominator pair.
///
/// Panics when `d == 0`; callers pass literal constants.
pub fn ratio(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Canonical text form: `num/den`, or just `num` for integers.
pub fn fmt_rat(x: &Rat) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parse the canonical text form: a decimal integer or `num/den`.
pub fn parse_rat(s: &str) -> Result<Rat, Error> {
    let s = s.trim();
    let bad = || Error::Parse(format!("invalid rational `{s}`"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator in `{s}`")));
        }
        Ok(Rat::new(n, d))
    } else {
        let n: BigInt = s.parse().map_err(|_| bad())?;
        Ok(Rat::from_integer(n))
    }
}

/// Sign of a rational as -1, 0, or 1.
pub fn sign(x: &Rat) -> i8 {
    if x.is_zero() {
        0
    } else if x.is_positive() {
        1
    } else {
        -1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parse_and_format_round_trip() {
        for s in ["3", "-7", "1/2", "-22/7", "0"] {
            let x = parse_rat(s).unwrap();
            assert_eq!(fmt_rat(&x), s);
        }
        // non-canonical input normalizes
        assert_eq!(fmt_rat(&parse_rat("4/2").unwrap()), "2");
        assert_eq!(fmt_rat(&parse_rat("2/-4").unwrap()), "-1/2");
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("a").is_err());
        assert!(parse_rat("1.5").is_err());
    }

    proptest! {
        // Exactness of field arithmetic: associativity and distributivity
        // hold structurally, not approximately.
        #[test]
        fn rational_arithmetic_is_exact(
            a in (-1000i64..1000, 1i64..60),
            b in (-1000i64..1000, 1i64..60),
            c in (-1000i64..1000, 1i64..60),
        ) {
            let a = ratio(a.0, a.1);
            let b = ratio(b.0, b.1);
            let c = ratio(c.0, c.1);
            prop_assert_eq!((&a + &b) + &c, &a + (&b + &c));
            prop_assert_eq!(&a * (&b + &c), &a * &b + &a * &c);
        }
    }
}
