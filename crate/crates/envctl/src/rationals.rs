//! Rationals as text: strict "p/q" parsing and decimal annotations.
//!
//! Exact values travel as integer-ratio strings so no binary float ever
//! enters a computation; decimal renderings are display-only.

use anyhow::{anyhow, bail, Result};
use envelope_core::rational::Q;
use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

/// Parses "p" or "p/q" with optional leading minus. Anything else (floats,
/// exponents, whitespace padding inside the number) is rejected.
pub fn parse_q(text: &str) -> Result<Q> {
    let s = text.trim();
    if s.is_empty() {
        bail!("empty rational");
    }
    if s.contains(['.', 'e', 'E']) {
        bail!("{s:?} is not an integer ratio; write rationals as \"p/q\"");
    }
    let (num_text, den_text) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let num: BigInt = num_text
        .parse()
        .map_err(|_| anyhow!("bad numerator in {s:?}"))?;
    let den: BigInt = den_text
        .parse()
        .map_err(|_| anyhow!("bad denominator in {s:?}"))?;
    if den.is_zero() {
        bail!("zero denominator in {s:?}");
    }
    Ok(Q::new(num, den))
}

/// Canonical "p/q" rendering (plain "p" when the denominator is 1).
pub fn format_q(v: &Q) -> String {
    if v.denom() == &BigInt::from(1) {
        v.numer().to_string()
    } else {
        format!("{}/{}", v.numer(), v.denom())
    }
}

/// Display-only decimal approximation.
pub fn decimal(v: &Q) -> f64 {
    let num = v.numer().to_f64();
    let den = v.denom().to_f64();
    match (num, den) {
        (Some(n), Some(d)) if d != 0.0 => n / d,
        // Either side overflows f64: divide at reduced precision.
        _ => {
            let scaled = (v * Q::from_integer(BigInt::from(1_000_000_000i64)))
                .to_integer();
            scaled.to_f64().unwrap_or(if v.is_negative() {
                f64::NEG_INFINITY
            } else {
                f64::INFINITY
            }) / 1e9
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use envelope_core::rational::q;

    #[test]
    fn strict_ratio_parsing() {
        assert_eq!(parse_q("3/4").unwrap(), q(3, 4));
        assert_eq!(parse_q("7").unwrap(), q(7, 1));
        assert_eq!(parse_q("-1/3").unwrap(), q(-1, 3));
        assert_eq!(parse_q(" 1/2 ").unwrap(), q(1, 2));
        assert!(parse_q("0.5").is_err());
        assert!(parse_q("1e-3").is_err());
        assert!(parse_q("1/0").is_err());
        assert!(parse_q("").is_err());
        assert!(parse_q("a/b").is_err());
    }

    #[test]
    fn canonical_formatting_round_trips() {
        for v in [q(3, 4), q(7, 1), q(-1, 3), q(0, 5)] {
            assert_eq!(parse_q(&format_q(&v)).unwrap(), v);
        }
        assert_eq!(format_q(&q(6, 8)), "3/4");
        assert_eq!(format_q(&q(5, 1)), "5");
    }

    #[test]
    fn decimals_are_close() {
        assert!((decimal(&q(1, 3)) - 0.333_333).abs() < 1e-5);
    }
}
