//! Exact rational arithmetic helpers.
//!
//! All probabilities and matrix entries in this crate are `BigRational`
//! values (arbitrary-precision, always reduced, denominator positive);
//! floating point only appears at the entropy/optimization boundary.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Parses "a/b" or a plain decimal like "0.11" into an exact rational.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let bad = |t: &str| Error::InvalidParam(format!("cannot parse {t:?} as a rational"));
    let text = text.trim();
    if let Some((num, den)) = text.split_once('/') {
        let n: BigInt = num.trim().parse().map_err(|_| bad(text))?;
        let d: BigInt = den.trim().parse().map_err(|_| bad(text))?;
        if d.is_zero() {
            return Err(Error::InvalidParam("zero denominator".into()));
        }
        Ok(Rational::new(n, d))
    } else if let Some((int, frac)) = text.split_once('.') {
        let int = if int.is_empty() { "0" } else { int };
        let whole: BigInt = int.parse().map_err(|_| bad(text))?;
        if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad(text));
        }
        let digits: BigInt = frac.parse().map_err(|_| bad(text))?;
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        let frac_part = Rational::new(digits, scale);
        let r = Rational::from(whole.clone());
        Ok(if whole.is_negative() { r - frac_part } else { r + frac_part })
    } else {
        let n: BigInt = text.parse().map_err(|_| bad(text))?;
        Ok(Rational::from(n))
    }
}

/// Exact text form: "num/den" for proper fractions, "num" for integers
/// (matching `BigRational`'s `Display`).
pub fn rational_to_string(r: &Rational) -> String {
    r.to_string()
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    r.to_f64().expect("rational convertible to f64")
}

/// Checks 0 < r < 1.
pub fn in_open_unit_interval(r: &Rational) -> bool {
    r > &Rational::zero() && r < &Rational::one()
}

/// (numerator, denominator) of a rational in (0, 1) as unsigned integers.
pub fn unit_fraction_parts(r: &Rational) -> (BigUint, BigUint) {
    debug_assert!(in_open_unit_interval(r));
    (
        r.numer().magnitude().clone(),
        r.denom().magnitude().clone(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fraction_and_decimal() {
        assert_eq!(parse_rational("1/2").unwrap(), Rational::new(1.into(), 2.into()));
        assert_eq!(parse_rational("2/4").unwrap(), Rational::new(1.into(), 2.into()));
        assert_eq!(
            parse_rational("0.11").unwrap(),
            Rational::new(11.into(), 100.into())
        );
        assert_eq!(parse_rational(".5").unwrap(), Rational::new(1.into(), 2.into()));
        assert_eq!(parse_rational("1").unwrap(), Rational::one());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("0.1a").is_err());
    }

    #[test]
    fn renders_reduced() {
        assert_eq!(rational_to_string(&parse_rational("2/4").unwrap()), "1/2");
        assert_eq!(rational_to_string(&Rational::zero()), "0");
        assert_eq!(rational_to_string(&Rational::one()), "1");
    }
}
