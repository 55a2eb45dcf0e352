//! Certified real enclosures `[lo, hi]` with rational endpoints.
//!
//! Field operations are exact on the endpoints. Transcendental operations
//! (`exp`, `ln`, `pow`) evaluate truncated series in fixed point, rounding
//! every partial result outward and adding an explicit bound for the
//! discarded series tail, so the true value is always contained.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use num_bigint::BigInt;
use num_integer::Integer;

use super::rational::{
    dyadic, floor_log2, int, max_rat, min_rat, round_down_rel, round_up_rel, scaled_floor, to_decimal,
    to_f64, two_pow, Rational,
};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Enclosure {
    lo: Rational,
    hi: Rational,
}

impl Enclosure {
    pub fn new(lo: Rational, hi: Rational) -> Self {
        assert!(lo <= hi, "enclosure endpoints out of order");
        Enclosure { lo, hi }
    }

    pub fn point(q: Rational) -> Self {
        Enclosure { lo: q.clone(), hi: q }
    }

    pub fn from_int(n: i64) -> Self {
        Self::point(int(n))
    }

    pub fn zero() -> Self {
        Self::from_int(0)
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn mid(&self) -> Rational {
        (&self.lo + &self.hi) / int(2)
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, q: &Rational) -> bool {
        &self.lo <= q && q <= &self.hi
    }

    /// Containment test against a float; only for diagnostics and tests.
    pub fn contains_f64(&self, x: f64) -> bool {
        to_f64(&self.lo) <= x && x <= to_f64(&self.hi)
    }

    /// True when `x` lies within relative distance `rel` of the enclosure.
    pub fn near_f64(&self, x: f64, rel: f64) -> bool {
        let slack = x.abs() * rel;
        to_f64(&self.lo) - slack <= x && x <= to_f64(&self.hi) + slack
    }

    pub fn contains_enclosure(&self, other: &Enclosure) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn overlaps(&self, other: &Enclosure) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn intersect(&self, other: &Enclosure) -> Option<Enclosure> {
        let lo = max_rat(&self.lo, &other.lo).clone();
        let hi = min_rat(&self.hi, &other.hi).clone();
        (lo <= hi).then_some(Enclosure { lo, hi })
    }

    pub fn hull(&self, other: &Enclosure) -> Enclosure {
        Enclosure {
            lo: min_rat(&self.lo, &other.lo).clone(),
            hi: max_rat(&self.hi, &other.hi).clone(),
        }
    }

    pub fn is_positive(&self) -> bool {
        self.lo.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.hi.is_negative()
    }

    pub fn contains_zero(&self) -> bool {
        !self.is_positive() && !self.is_negative()
    }

    /// `Some(true)` if certainly `> 0`, `Some(false)` if certainly `< 0`.
    pub fn sign(&self) -> Option<bool> {
        if self.is_positive() {
            Some(true)
        } else if self.is_negative() {
            Some(false)
        } else {
            None
        }
    }

    /// Outward rounding to `bits` significant bits per endpoint.
    pub fn round(&self, bits: u32) -> Enclosure {
        Enclosure { lo: round_down_rel(&self.lo, bits), hi: round_up_rel(&self.hi, bits) }
    }

    pub fn scale(&self, q: &Rational) -> Enclosure {
        let a = &self.lo * q;
        let b = &self.hi * q;
        if q.is_negative() {
            Enclosure { lo: b, hi: a }
        } else {
            Enclosure { lo: a, hi: b }
        }
    }

    pub fn add_rational(&self, q: &Rational) -> Enclosure {
        Enclosure { lo: &self.lo + q, hi: &self.hi + q }
    }

    pub fn recip(&self) -> Result<Enclosure> {
        if self.contains_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Enclosure { lo: self.hi.recip(), hi: self.lo.recip() })
    }

    pub fn div(&self, other: &Enclosure) -> Result<Enclosure> {
        Ok(self * &other.recip()?)
    }

    /// Integer power by repeated squaring (exact).
    pub fn powi(&self, k: u32) -> Enclosure {
        let mut result = Enclosure::one();
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = &result * &base;
            }
            base = base.sqr();
            k >>= 1;
        }
        result
    }

    pub fn sqr(&self) -> Enclosure {
        let a = &self.lo * &self.lo;
        let b = &self.hi * &self.hi;
        if self.lo.is_negative() && self.hi.is_positive() {
            Enclosure { lo: Rational::zero(), hi: max_rat(&a, &b).clone() }
        } else if self.hi.is_negative() || self.hi.is_zero() {
            Enclosure { lo: b, hi: a }
        } else {
            Enclosure { lo: a, hi: b }
        }
    }

    pub fn min(&self, other: &Enclosure) -> Enclosure {
        Enclosure {
            lo: min_rat(&self.lo, &other.lo).clone(),
            hi: min_rat(&self.hi, &other.hi).clone(),
        }
    }

    pub fn max(&self, other: &Enclosure) -> Enclosure {
        Enclosure {
            lo: max_rat(&self.lo, &other.lo).clone(),
            hi: max_rat(&self.hi, &other.hi).clone(),
        }
    }

    /// `exp` with roughly `bits` significant bits.
    pub fn exp(&self, bits: u32) -> Enclosure {
        if self.is_point() {
            let (lo, hi) = exp_bounds(&self.lo, bits);
            return Enclosure { lo, hi };
        }
        let lo = exp_bounds(&self.lo, bits).0;
        let hi = exp_bounds(&self.hi, bits).1;
        Enclosure { lo, hi }
    }

    /// Natural logarithm; the enclosure must be strictly positive.
    pub fn ln(&self, bits: u32) -> Result<Enclosure> {
        if !self.is_positive() {
            return Err(Error::NonPositiveLog);
        }
        if self.is_point() {
            let (lo, hi) = ln_bounds(&self.lo, bits);
            return Ok(Enclosure { lo, hi });
        }
        let lo = ln_bounds(&self.lo, bits).0;
        let hi = ln_bounds(&self.hi, bits).1;
        Ok(Enclosure { lo, hi })
    }

    /// `self^exponent = exp(exponent * ln(self))`; `self` must be positive.
    pub fn pow(&self, exponent: &Enclosure, bits: u32) -> Result<Enclosure> {
        let log = self.ln(bits + 8)?;
        Ok((exponent * &log).round(bits + 8).exp(bits))
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (to_f64(&self.lo), to_f64(&self.hi))
    }

    pub fn mid_f64(&self) -> f64 {
        to_f64(&self.mid())
    }

    /// Outward-rounded decimal endpoints with `places` fractional digits.
    pub fn decimal_endpoints(&self, places: usize) -> (String, String) {
        (to_decimal(&self.lo, places, false), to_decimal(&self.hi, places, true))
    }
}

impl fmt::Display for Enclosure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (lo, hi) = self.decimal_endpoints(20);
        write!(f, "[{lo}, {hi}]")
    }
}

impl From<Rational> for Enclosure {
    fn from(q: Rational) -> Self {
        Enclosure::point(q)
    }
}

impl Add for &Enclosure {
    type Output = Enclosure;
    fn add(self, rhs: &Enclosure) -> Enclosure {
        Enclosure { lo: &self.lo + &rhs.lo, hi: &self.hi + &rhs.hi }
    }
}

impl Sub for &Enclosure {
    type Output = Enclosure;
    fn sub(self, rhs: &Enclosure) -> Enclosure {
        Enclosure { lo: &self.lo - &rhs.hi, hi: &self.hi - &rhs.lo }
    }
}

impl Neg for &Enclosure {
    type Output = Enclosure;
    fn neg(self) -> Enclosure {
        Enclosure { lo: -&self.hi, hi: -&self.lo }
    }
}

impl Mul for &Enclosure {
    type Output = Enclosure;
    fn mul(self, rhs: &Enclosure) -> Enclosure {
        let products = [
            &self.lo * &rhs.lo,
            &self.lo * &rhs.hi,
            &self.hi * &rhs.lo,
            &self.hi * &rhs.hi,
        ];
        let lo = products.iter().min().unwrap().clone();
        let hi = products.iter().max().unwrap().clone();
        Enclosure { lo, hi }
    }
}

macro_rules! forward_owned {
    ($Op:ident, $op:ident) => {
        impl $Op for Enclosure {
            type Output = Enclosure;
            fn $op(self, rhs: Enclosure) -> Enclosure {
                (&self).$op(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

/// Interval `[lo, hi]·2^-w` with integer endpoints; the series kernels run
/// on these since rational arithmetic pays a gcd per operation.
#[derive(Clone, Debug)]
struct Fixed {
    lo: BigInt,
    hi: BigInt,
}

fn shr_floor(x: &BigInt, w: u32) -> BigInt {
    // arithmetic shift rounds toward negative infinity
    x >> w as usize
}

fn shr_ceil(x: &BigInt, w: u32) -> BigInt {
    -((-x) >> w as usize)
}

impl Fixed {
    fn from_rational(q: &Rational, w: u32) -> Fixed {
        Fixed { lo: scaled_floor(q, w as i64), hi: -scaled_floor(&-q, w as i64) }
    }

    fn exact(n: BigInt) -> Fixed {
        Fixed { lo: n.clone(), hi: n }
    }

    fn mul(&self, other: &Fixed, w: u32) -> Fixed {
        let p = [&self.lo * &other.lo, &self.lo * &other.hi, &self.hi * &other.lo, &self.hi * &other.hi];
        let lo = p.iter().min().expect("four products");
        let hi = p.iter().max().expect("four products");
        Fixed { lo: shr_floor(lo, w), hi: shr_ceil(hi, w) }
    }

    fn div_int(&self, n: u64) -> Fixed {
        let n = BigInt::from(n);
        Fixed { lo: self.lo.div_floor(&n), hi: self.hi.div_ceil(&n) }
    }

    fn add(&self, other: &Fixed) -> Fixed {
        Fixed { lo: &self.lo + &other.lo, hi: &self.hi + &other.hi }
    }

    fn scale_int(&self, k: i64) -> Fixed {
        let k = BigInt::from(k);
        let (a, b) = (&self.lo * &k, &self.hi * &k);
        if k.is_negative() {
            Fixed { lo: b, hi: a }
        } else {
            Fixed { lo: a, hi: b }
        }
    }

    fn widen(&self, units: &BigInt) -> Fixed {
        Fixed { lo: &self.lo - units, hi: &self.hi + units }
    }

    fn magnitude(&self) -> BigInt {
        self.lo.abs().max(self.hi.abs())
    }

    fn bounds(&self, w: u32) -> (Rational, Rational) {
        (dyadic(self.lo.clone(), w as i64), dyadic(self.hi.clone(), w as i64))
    }
}

/// Lower and upper bounds of `exp(q)`.
fn exp_bounds(q: &Rational, bits: u32) -> (Rational, Rational) {
    if q.is_zero() {
        return (Rational::one(), Rational::one());
    }
    if q.is_negative() {
        let (lo, hi) = exp_bounds(&-q, bits + 2);
        return (round_down_rel(&hi.recip(), bits + 4), round_up_rel(&lo.recip(), bits + 4));
    }
    // Reduce to y < 2^-10, then square back up.
    let k = (floor_log2(q) + 11).max(0);
    let y = q * two_pow(-k);
    let w = bits + k as u32 + 20;
    let yf = Fixed::from_rational(&y, w);
    let one = Fixed::exact(BigInt::one() << w as usize);
    let mut sum = one.clone();
    let mut term = one;
    let mut n = 1u64;
    loop {
        term = term.mul(&yf, w).div_int(n);
        sum = sum.add(&term);
        n += 1;
        let mag = term.magnitude();
        if mag <= BigInt::one() {
            // the rest is below 2y·|term| <= |term|
            sum = sum.widen(&mag.max(BigInt::one()));
            break;
        }
    }
    for _ in 0..k {
        sum = sum.mul(&sum, w);
    }
    let (lo, hi) = sum.bounds(w);
    (round_down_rel(&lo, bits + 4), round_up_rel(&hi, bits + 4))
}

/// `atanh(z)` for a rational `0 <= z <= 1/3`, scaled by `2^w`.
fn atanh_fixed(z: &Rational, w: u32) -> Fixed {
    let zero = Fixed::exact(BigInt::zero());
    if z.is_zero() {
        return zero;
    }
    let zf = Fixed::from_rational(z, w);
    let z2 = zf.mul(&zf, w);
    let mut power = zf;
    let mut sum = zero;
    let mut n = 0u64;
    loop {
        sum = sum.add(&power.div_int(2 * n + 1));
        power = power.mul(&z2, w);
        n += 1;
        if power.hi <= BigInt::one() {
            // tail <= z^(2n+1) / ((2n+1)(1 - z^2)) <= 2 z^(2n+1)
            let tail = BigInt::from(2) * power.hi.clone().max(BigInt::one());
            sum.hi += tail;
            break;
        }
    }
    sum
}

thread_local! {
    static LN2: std::cell::RefCell<std::collections::HashMap<u32, Fixed>> = Default::default();
}

fn ln2_fixed(w: u32) -> Fixed {
    LN2.with(|cache| {
        cache
            .borrow_mut()
            .entry(w)
            .or_insert_with(|| atanh_fixed(&Rational::new(1.into(), 3.into()), w).scale_int(2))
            .clone()
    })
}

/// Lower and upper bounds of `ln(q)` for `q > 0`.
fn ln_bounds(q: &Rational, bits: u32) -> (Rational, Rational) {
    debug_assert!(q.is_positive());
    if q.is_one() {
        return (Rational::zero(), Rational::zero());
    }
    let e = floor_log2(q);
    let m = q * two_pow(-e);
    // m in [1, 2): z = (m - 1) / (m + 1) in [0, 1/3)
    let z = (&m - int(1)) / (&m + int(1));
    let small = if z.is_zero() { 0 } else { (-floor_log2(&z)).max(0) as u32 };
    let w = bits + 20 + (64 - e.unsigned_abs().leading_zeros()) + if e == 0 { small } else { 0 };
    let total = ln2_fixed(w).scale_int(e).add(&atanh_fixed(&z, w).scale_int(2));
    let (lo, hi) = total.bounds(w);
    (round_down_rel(&lo, bits + 4), round_up_rel(&hi, bits + 4))
}
