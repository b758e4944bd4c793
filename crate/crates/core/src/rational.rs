//! Exact rational helpers.
//!
//! Every real-valued quantity in the verification core (clock values, delays,
//! rates after rescaling) is a [`Rational`]. `BigRational` keeps values in
//! lowest terms with a positive denominator, so structural equality is value
//! equality.

use alloc::string::{String, ToString};
use alloc::format;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

pub use num_rational::BigRational as Rational;

/// Builds `n` as a rational.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Builds `num/den`. Panics if `den` is zero.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Renders a rational as `p/q`, or `p` when the denominator is one.
pub fn to_text(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Error returned by [`parse`].
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid rational literal `{0}`")]
pub struct ParseRationalError(pub String);

/// Parses `p`, `p/q`, or a decimal literal such as `-0.25` into an exact
/// rational. Decimals are read digit by digit, never through floating point.
pub fn parse(text: &str) -> Result<Rational, ParseRationalError> {
    let err = || ParseRationalError(text.to_string());
    let s = text.trim();
    if s.is_empty() {
        return Err(err());
    }
    if let Some((n, d)) = s.split_once('/') {
        let n = parse_int(n.trim()).ok_or_else(err)?;
        let d = parse_int(d.trim()).ok_or_else(err)?;
        if d.is_zero() {
            return Err(err());
        }
        return Ok(Rational::new(n, d));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (whole, frac) = body.split_once('.').unwrap_or((body, ""));
    if whole.is_empty() && frac.is_empty() {
        return Err(err());
    }
    let digits_ok = |t: &str| t.bytes().all(|b| b.is_ascii_digit());
    if !digits_ok(whole) || !digits_ok(frac) {
        return Err(err());
    }
    let mut numer = BigInt::zero();
    for b in whole.bytes().chain(frac.bytes()) {
        numer = numer * 10u32 + u32::from(b - b'0');
    }
    let denom = num_traits::pow(BigInt::from(10u32), frac.len());
    let value = Rational::new(numer, denom);
    Ok(if neg { -value } else { value })
}

fn parse_int(s: &str) -> Option<BigInt> {
    let (neg, digits) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let mut v = BigInt::zero();
    for b in digits.bytes() {
        v = v * 10u32 + u32::from(b - b'0');
    }
    Some(if neg { -v } else { v })
}

/// Largest integer not above `r`.
pub fn floor(r: &Rational) -> BigInt {
    r.floor().to_integer()
}

/// `r - floor(r)`, always in `[0, 1)`.
pub fn fract(r: &Rational) -> Rational {
    r - r.floor()
}

/// Square root of a nonnegative rational.
///
/// Returns the exact root and `true` when numerator and denominator are both
/// perfect squares. Otherwise returns a truncated approximation `a/(q·10^13)`
/// whose error is below `10^-13`, and `false`.
pub fn sqrt(r: &Rational) -> (Rational, bool) {
    assert!(!r.is_negative(), "square root of a negative rational");
    let (p, q) = (r.numer(), r.denom());
    let (sp, sq) = (p.sqrt(), q.sqrt());
    if &(&sp * &sp) == p && &(&sq * &sq) == q {
        return (Rational::new(sp, sq), true);
    }
    // sqrt(p/q) = sqrt(p*q)/q; scale before truncating.
    let scale = num_traits::pow(BigInt::from(10u32), 13);
    let radicand = p * q * &scale * &scale;
    (Rational::new(radicand.sqrt(), q * scale), false)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_literals_are_exact() {
        assert_eq!(parse("0.5").unwrap(), ratio(1, 2));
        assert_eq!(parse("9.8").unwrap(), ratio(49, 5));
        assert_eq!(parse("-1.25").unwrap(), ratio(-5, 4));
        assert_eq!(parse("10").unwrap(), int(10));
        assert_eq!(parse("6/4").unwrap(), ratio(3, 2));
        assert!(parse("1/0").is_err());
        assert!(parse("abc").is_err());
        assert!(parse(".").is_err());
        assert!(parse("").is_err());
    }

    #[test]
    fn text_form() {
        assert_eq!(to_text(&ratio(6, 4)), "3/2");
        assert_eq!(to_text(&ratio(-4, 2)), "-2");
        assert_eq!(to_text(&int(0)), "0");
    }

    #[test]
    fn floor_and_fraction() {
        assert_eq!(floor(&ratio(7, 2)), BigInt::from(3));
        assert_eq!(fract(&ratio(7, 2)), ratio(1, 2));
        assert_eq!(floor(&ratio(-1, 2)), BigInt::from(-1));
        assert_eq!(fract(&ratio(-1, 2)), ratio(1, 2));
    }

    #[test]
    fn square_roots() {
        assert_eq!(sqrt(&ratio(100, 49)), (ratio(10, 7), true));
        let (approx, exact) = sqrt(&int(2));
        assert!(!exact);
        let err = &approx * &approx - int(2);
        assert!(err.abs() < ratio(1, 1_000_000_000_000));
        assert!(approx < ratio(1_414_214, 1_000_000));
    }

    proptest::proptest! {
        #[test]
        fn add_then_subtract_is_identity(a in -1000i64..1000, b in 1i64..1000, c in -1000i64..1000, d in 1i64..1000) {
            let x = ratio(a, b);
            let y = ratio(c, d);
            proptest::prop_assert_eq!(&(&x + &y) - &y, x.clone());
            // lowest terms, positive denominator
            let g = num_integer::Integer::gcd(x.numer(), x.denom());
            proptest::prop_assert!(g.is_one());
            proptest::prop_assert!(x.denom().is_positive());
        }
    }
}
