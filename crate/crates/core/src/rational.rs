//! Arbitrary-precision rational helpers shared by the exact paths.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};

use crate::error::Error;

pub fn int(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

pub fn frac(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Parses `"p/q"`, `"p"` or a finite decimal such as `"0.75"`.
pub fn parse_rational(text: &str) -> Result<BigRational, Error> {
    let t = text.trim();
    let bad = || Error::Parse(format!("not a rational number: {text:?}"));
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(n, d));
    }
    if let Some((whole, fracpart)) = t.split_once('.') {
        if fracpart.is_empty() || !fracpart.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = whole.starts_with('-');
        let whole_abs = whole.trim_start_matches(['-', '+']);
        let digits = format!("{}{}", if whole_abs.is_empty() { "0" } else { whole_abs }, fracpart);
        let n: BigInt = digits.parse().map_err(|_| bad())?;
        let d = BigInt::from(10u32).pow(fracpart.len() as u32);
        let r = BigRational::new(n, d);
        return Ok(if negative { -r } else { r });
    }
    let n: BigInt = t.parse().map_err(|_| bad())?;
    Ok(BigRational::from_integer(n))
}

pub fn format_rational(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    BigInt::from(acc)
}

pub fn pow(base: &BigRational, exp: u64) -> BigRational {
    let mut result = BigRational::one();
    let mut b = base.clone();
    let mut e = exp;
    while e > 0 {
        if e & 1 == 1 {
            result *= &b;
        }
        e >>= 1;
        if e > 0 {
            b = &b * &b;
        }
    }
    result
}

pub fn ipow(base: i64, exp: u64) -> BigInt {
    Pow::pow(BigInt::from(base), exp)
}

/// `floor(c^n)` with exact integer arithmetic.
pub fn floor_pow(c: &BigRational, n: u64) -> BigInt {
    pow(c, n).floor().to_integer()
}

/// Nearest double to a rational, robust to numerators and denominators far
/// outside the `f64` range.
pub fn to_f64(r: &BigRational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    if let (Some(n), Some(d)) = (r.numer().to_f64(), r.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && n.abs() < 1e300 && d < 1e300 {
            return n / d;
        }
    }
    let shift = r.numer().bits() as i64 - r.denom().bits() as i64 - 60;
    let scaled = if shift >= 0 {
        r.numer().abs() / (r.denom() << shift as usize)
    } else {
        (r.numer().abs() << (-shift) as usize) / r.denom()
    };
    let mantissa = scaled.to_f64().unwrap_or(f64::NAN);
    let v = mantissa * 2f64.powi(shift as i32);
    if r.is_negative() {
        -v
    } else {
        v
    }
}

/// `log2` of a positive rational, accurate to double precision even when the
/// numerator and denominator each overflow `f64`.
pub fn log2(r: &BigRational) -> f64 {
    if !r.is_positive() {
        return if r.is_zero() { f64::NEG_INFINITY } else { f64::NAN };
    }
    let nb = r.numer().bits() as i64;
    let db = r.denom().bits() as i64;
    let top = shifted_mantissa(r.numer(), nb);
    let bottom = shifted_mantissa(r.denom(), db);
    (top.log2() - bottom.log2()) + (nb - db) as f64
}

/// `v / 2^bits`, a value in `[1/2, 1)` for positive `v` with `bits` bits.
fn shifted_mantissa(v: &BigInt, bits: i64) -> f64 {
    const KEEP: i64 = 64;
    if bits <= KEEP {
        v.to_f64().unwrap_or(f64::NAN) / 2f64.powi(bits as i32)
    } else {
        let shifted: BigInt = v >> (bits - KEEP) as usize;
        shifted.to_f64().unwrap_or(f64::NAN) / 2f64.powi(KEEP as i32)
    }
}

pub fn lcm_of_denominators<'a>(values: impl IntoIterator<Item = &'a BigRational>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_forms() {
        assert_eq!(parse_rational("49/20").unwrap(), frac(49, 20));
        assert_eq!(parse_rational("1").unwrap(), int(1));
        assert_eq!(parse_rational("0.75").unwrap(), frac(3, 4));
        assert_eq!(parse_rational("-2/4").unwrap(), frac(-1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), BigInt::from(10));
        assert_eq!(binomial(3, 5), BigInt::zero());
        assert_eq!(binomial(120, 60).to_string(), "96614908840363322603893139521372656");
    }

    #[test]
    fn floors_of_powers() {
        assert_eq!(floor_pow(&frac(49, 20), 1), BigInt::from(2));
        assert_eq!(floor_pow(&frac(49, 20), 2), BigInt::from(6));
        assert_eq!(floor_pow(&frac(99, 40), 4), BigInt::from(37));
        assert_eq!(floor_pow(&frac(5, 3), 6), BigInt::from(21));
    }

    #[test]
    fn logs_of_huge_fractions() {
        let big = pow(&frac(3, 1), 2000) / pow(&frac(2, 1), 1000);
        let expected = 2000.0 * 3f64.log2() - 1000.0;
        assert!((log2(&big) - expected).abs() < 1e-9);
        assert!((log2(&frac(1, 8)) + 3.0).abs() < 1e-15);
        let tiny = BigRational::new(BigInt::one(), BigInt::one() << 2000usize);
        assert!((log2(&tiny) + 2000.0).abs() < 1e-12);
        assert!((to_f64(&frac(5, 6)) - 5.0 / 6.0).abs() < 1e-16);
    }
}
