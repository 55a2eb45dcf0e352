//! Helpers around arbitrary-precision rationals.
//!
//! `Rational` is `num_rational::BigRational`, which already keeps values in
//! canonical reduced form with a positive denominator.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;

/// Builds `num/den` from machine integers. Panics on a zero denominator.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `"p/q"`, `"p"` or a plain decimal literal such as `"0.125"`.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let s = text.trim();
    let bad = || Error::Parse(format!("not a rational number: {text:?}"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {text:?}")));
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        let negative = whole.trim_start().starts_with('-');
        let whole_digits = whole.trim_start_matches(['-', '+']);
        if !frac.chars().all(|c| c.is_ascii_digit())
            || !whole_digits.chars().all(|c| c.is_ascii_digit())
            || (whole_digits.is_empty() && frac.is_empty())
        {
            return Err(bad());
        }
        let digits = format!("{whole_digits}{frac}");
        let mag: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().map_err(|_| bad())? };
        let den = num_traits::pow(BigInt::from(10), frac.len());
        let q = Rational::new(mag, den);
        return Ok(if negative { -q } else { q });
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Rational::from_integer(n))
}

/// Canonical `"p/q"` (or `"p"` for integers) rendering; re-parses to the same value.
pub fn format_rational(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// `q^k` for any integer exponent; `q` must be nonzero when `k < 0`.
pub fn pow_int(q: &Rational, k: i64) -> Rational {
    if k >= 0 {
        num_traits::pow(q.clone(), k as usize)
    } else {
        num_traits::pow(q.recip(), k.unsigned_abs() as usize)
    }
}

pub fn two_pow(k: i64) -> Rational {
    pow_int(&int(2), k)
}

/// Largest multiple of `2^-bits` that is `<= q`.
pub fn round_down(q: &Rational, bits: i64) -> Rational {
    dyadic(scaled_floor(q, bits), bits)
}

/// Smallest multiple of `2^-bits` that is `>= q`.
pub fn round_up(q: &Rational, bits: i64) -> Rational {
    -dyadic(scaled_floor(&-q, bits), bits)
}

/// `floor(q * 2^bits)` using integer arithmetic only.
pub(crate) fn scaled_floor(q: &Rational, bits: i64) -> BigInt {
    let (n, d) = (q.numer(), q.denom());
    if bits >= 0 {
        (n << bits as usize).div_floor(d)
    } else {
        n.div_floor(&(d << (-bits) as usize))
    }
}

/// `k * 2^-bits` in lowest terms without a general gcd.
pub(crate) fn dyadic(k: BigInt, bits: i64) -> Rational {
    if k.is_zero() {
        return Rational::zero();
    }
    let tz = k.trailing_zeros().unwrap_or(0) as i64;
    let shift = tz.min(bits.max(0));
    let k = k >> shift as usize;
    let bits = bits - shift;
    if bits >= 0 {
        Rational::new_raw(k, BigInt::one() << bits as usize)
    } else {
        Rational::from_integer(k << (-bits) as usize)
    }
}

/// Rounds down keeping roughly `bits` significant bits.
pub fn round_down_rel(q: &Rational, bits: u32) -> Rational {
    if q.is_zero() {
        return q.clone();
    }
    round_down(q, bits as i64 - floor_log2(q))
}

/// Rounds up keeping roughly `bits` significant bits.
pub fn round_up_rel(q: &Rational, bits: u32) -> Rational {
    if q.is_zero() {
        return q.clone();
    }
    round_up(q, bits as i64 - floor_log2(q))
}

/// `floor(log2 |q|)` for nonzero `q`.
pub fn floor_log2(q: &Rational) -> i64 {
    debug_assert!(!q.is_zero());
    let n = q.numer().abs();
    let d = q.denom();
    let mut e = n.bits() as i64 - d.bits() as i64;
    // n / d lies in [2^(e-1), 2^(e+1)); settle the exact exponent.
    let lhs = |e: i64| -> bool {
        // 2^e <= n/d ?
        if e >= 0 {
            (d << e as usize) <= n
        } else {
            d <= &(n.clone() << (-e) as usize)
        }
    };
    while !lhs(e) {
        e -= 1;
    }
    while lhs(e + 1) {
        e += 1;
    }
    e
}

/// Decimal rendering with `places` fractional digits, rounded toward
/// negative infinity (`up == false`) or positive infinity (`up == true`).
pub fn to_decimal(q: &Rational, places: usize, up: bool) -> String {
    let scale = num_traits::pow(BigInt::from(10), places);
    let scaled = q * Rational::from_integer(scale.clone());
    let n = if up { scaled.ceil() } else { scaled.floor() }.to_integer();
    let negative = n.sign() == Sign::Minus;
    let digits = n.abs().to_string();
    let body = if places == 0 {
        digits
    } else {
        let padded = format!("{digits:0>width$}", width = places + 1);
        let (w, f) = padded.split_at(padded.len() - places);
        format!("{w}.{f}")
    };
    if negative {
        format!("-{body}")
    } else {
        body
    }
}

pub fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// Exact rational value of a finite `f64`.
pub fn from_f64(x: f64) -> Rational {
    Rational::from_float(x).expect("finite float")
}

/// Greatest common divisor of a nonempty list of positive integers.
pub fn gcd_all(values: &[i64]) -> i64 {
    values.iter().fold(0i64, |acc, v| acc.gcd(v))
}

pub fn min_rat<'a>(a: &'a Rational, b: &'a Rational) -> &'a Rational {
    if a <= b {
        a
    } else {
        b
    }
}

pub fn max_rat<'a>(a: &'a Rational, b: &'a Rational) -> &'a Rational {
    if a >= b {
        a
    } else {
        b
    }
}
