//! Exact rational scalar type and parsing/formatting helpers.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::str::FromStr;

/// The scalar used throughout: arbitrary-precision rational.
pub type Q = BigRational;

/// Shorthand for small constants.
pub fn q(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

pub fn q0() -> Q {
    Q::zero()
}

pub fn q1() -> Q {
    Q::one()
}

/// Parses "p/q" or a bare integer "p". Rejects anything else, floats included.
pub fn parse_q(s: &str) -> Result<Q, String> {
    let s = s.trim();
    let parse_int = |t: &str| -> Result<BigInt, String> {
        BigInt::from_str(t.trim()).map_err(|_| format!("not an integer: {t:?}"))
    };
    match s.split_once('/') {
        Some((p, d)) => {
            let num = parse_int(p)?;
            let den = parse_int(d)?;
            if den.is_zero() {
                return Err(format!("zero denominator in {s:?}"));
            }
            Ok(Q::new(num, den))
        }
        None => Ok(Q::from(parse_int(s)?)),
    }
}

/// Canonical "p/q" rendering (integers render without the "/1").
pub fn format_q(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Decimal rendering to `digits` places, for display only (truncation, sign-aware).
pub fn decimal_approx(x: &Q, digits: u32) -> String {
    let scale = BigInt::from(10u32).pow(digits);
    let scaled = (x * Q::from(scale.clone())).trunc();
    let num = scaled.numer().abs();
    let int_part = &num / &scale;
    let frac_part = &num % &scale;
    let sign = if x.is_negative() { "-" } else { "" };
    format!(
        "{sign}{int_part}.{frac:0>width$}",
        frac = frac_part.to_string(),
        width = digits as usize
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_integers() {
        assert_eq!(parse_q("3/4").unwrap(), q(3, 4));
        assert_eq!(parse_q(" -2/6 ").unwrap(), q(-1, 3));
        assert_eq!(parse_q("7").unwrap(), q(7, 1));
        assert_eq!(parse_q("0").unwrap(), q0());
    }

    #[test]
    fn rejects_floats_and_garbage() {
        assert!(parse_q("0.5").is_err());
        assert!(parse_q("1e-3").is_err());
        assert!(parse_q("1/0").is_err());
        assert!(parse_q("").is_err());
        assert!(parse_q("a/b").is_err());
    }

    #[test]
    fn formats_canonically() {
        assert_eq!(format_q(&q(1, 2)), "1/2");
        assert_eq!(format_q(&q(4, 2)), "2");
        assert_eq!(format_q(&q(0, 5)), "0");
    }

    #[test]
    fn decimal_rendering_truncates() {
        assert_eq!(decimal_approx(&q(1, 3), 4), "0.3333");
        assert_eq!(decimal_approx(&q(117, 1000), 6), "0.117000");
        assert_eq!(decimal_approx(&q(-1, 8), 3), "-0.125");
        assert_eq!(decimal_approx(&q(5, 1), 2), "5.00");
    }
}
