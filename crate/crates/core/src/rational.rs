//! Exact rationals backed by `num-rational`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

/// Parses `"p/q"`, `"p"` or a finite decimal such as `"0.25"`.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let bad = || Error::Syntax {
        pos: 0,
        msg: format!("`{text}` is not a rational"),
    };
    let s = text.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(p, q));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let digits: BigInt = format!("{whole}{frac}").parse().map_err(|_| bad())?;
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        return Ok(Rational::new(digits, scale));
    }
    let p: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Rational::from_integer(p))
}

/// Always renders as `p/q`, including integers (`1/1`, `0/1`).
pub fn fmt_ratio(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Renders integers without a denominator; otherwise `p/q`.
pub fn fmt_short(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        fmt_ratio(r)
    }
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Truncated subtraction `max(a - b, 0)`.
pub fn monus(a: &Rational, b: &Rational) -> Rational {
    let d = a - b;
    if d.is_negative() {
        Rational::zero()
    } else {
        d
    }
}

/// Truncated addition `min(a + b, 1)`.
pub fn trunc_add(a: &Rational, b: &Rational) -> Rational {
    let s = a + b;
    if s > Rational::one() {
        Rational::one()
    } else {
        s
    }
}

pub fn in_unit_interval(r: &Rational) -> bool {
    !r.is_negative() && *r <= Rational::one()
}

pub fn lcm_of_denominators<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    use num_integer::Integer;
    values
        .into_iter()
        .fold(BigInt::one(), |acc, r| acc.lcm(r.denom()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(parse_rational("1/2").unwrap(), rat(1, 2));
        assert_eq!(parse_rational(" 6/8 ").unwrap(), rat(3, 4));
        assert_eq!(parse_rational("0.25").unwrap(), rat(1, 4));
        assert_eq!(parse_rational("3").unwrap(), int(3));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        assert!(parse_rational("0.").is_err());
    }

    #[test]
    fn formats_with_denominator() {
        assert_eq!(fmt_ratio(&zero()), "0/1");
        assert_eq!(fmt_ratio(&one()), "1/1");
        assert_eq!(fmt_ratio(&rat(2, 4)), "1/2");
        assert_eq!(fmt_short(&one()), "1");
    }

    #[test]
    fn truncated_connectives() {
        assert_eq!(monus(&rat(1, 4), &rat(1, 2)), zero());
        assert_eq!(monus(&rat(3, 4), &rat(1, 2)), rat(1, 4));
        assert_eq!(trunc_add(&rat(3, 4), &rat(1, 2)), one());
        assert_eq!(trunc_add(&rat(1, 4), &rat(1, 2)), rat(3, 4));
    }
}
