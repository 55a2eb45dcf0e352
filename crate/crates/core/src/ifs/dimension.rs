//! Similarity dimension: the unique root `s` of `Σ r_i^s = 1`, by certified bisection.

use num_traits::{One, Signed, Zero};

use super::Ifs;
use crate::numerics::rational::{floor_log2, int, rat};
use crate::numerics::{Enclosure, Rational};

/// Certified enclosure of the Minkowski dimension `D`.
#[derive(Clone, Debug, PartialEq)]
pub struct DimensionEnclosure {
    pub value: Enclosure,
    pub requested_width: Rational,
}

impl DimensionEnclosure {
    pub fn lo(&self) -> &Rational {
        self.value.lo()
    }

    pub fn hi(&self) -> &Rational {
        self.value.hi()
    }

    /// True when the whole enclosure lies strictly below 1.
    pub fn below_one(&self) -> bool {
        self.value.hi() < &Rational::one()
    }

    pub fn is_exactly_one(&self) -> bool {
        self.value.is_point() && self.value.lo().is_one()
    }

    /// Working precision (significant bits) suited to this enclosure.
    pub fn bits(&self) -> u32 {
        precision_bits(&self.requested_width)
    }

    /// Narrows the enclosure to `width`, never widening it.
    pub fn refine(&self, ifs: &Ifs, width: &Rational) -> DimensionEnclosure {
        let fresh = moran_dimension(ifs, width);
        let value = self.value.intersect(&fresh.value).unwrap_or(fresh.value);
        DimensionEnclosure { value, requested_width: width.clone() }
    }

    /// Checks `Σ r_i^lo >= 1 >= Σ r_i^hi` with outward rounding.
    pub fn verify(&self, ifs: &Ifs) -> bool {
        let bits = self.bits() + 16;
        let at = |s: &Rational| moran_sum(ifs, &Enclosure::point(s.clone()), bits);
        let lo = at(self.value.lo());
        let hi = at(self.value.hi());
        lo.hi() >= &Rational::one() && hi.lo() <= &Rational::one()
    }
}

/// Bits needed to resolve `width` with some headroom.
pub fn precision_bits(width: &Rational) -> u32 {
    let e = if width.is_positive() { -floor_log2(width) } else { 64 };
    (e.max(0) as u32) + 24
}

/// Enclosure of `Σ_i r_i^s` for an enclosure `s`.
pub fn moran_sum(ifs: &Ifs, s: &Enclosure, bits: u32) -> Enclosure {
    ifs.ratios()
        .iter()
        .map(|r| Enclosure::point(r.clone()).pow(s, bits).expect("ratios are positive"))
        .fold(Enclosure::zero(), |acc, t| &acc + &t)
}

/// Enclosure of width at most `width` around the root of `Σ r_i^s = 1`.
pub fn moran_dimension(ifs: &Ifs, width: &Rational) -> DimensionEnclosure {
    let requested_width = width.clone();
    let one = Rational::one();
    let sum = ifs.ratio_sum();
    if sum == one {
        return DimensionEnclosure { value: Enclosure::point(one), requested_width };
    }
    let bits = precision_bits(width);
    let logs: Vec<Enclosure> = ifs
        .ratios()
        .iter()
        .map(|r| Enclosure::point(r.clone()).ln(bits + 16).expect("ratios are positive"))
        .collect();
    // f(s) = Σ exp(s ln r_i) - 1, strictly decreasing in s
    let f = |s: &Rational, bits: u32| -> Enclosure {
        let total = logs
            .iter()
            .map(|l| l.scale(s).round(bits + 8).exp(bits))
            .fold(Enclosure::zero(), |acc, t| &acc + &t);
        total.add_rational(&-int(1))
    };

    let mut lo = Rational::zero();
    let mut hi = one.clone();
    if sum > one {
        // root lies above 1 (overlapping system)
        while f(&hi, bits).sign() != Some(false) {
            lo = hi.clone();
            hi = &hi * int(2);
        }
    }
    while &hi - &lo > *width {
        let mid = (&lo + &hi) / int(2);
        match decide(&f, &mid, bits) {
            Some(true) => lo = mid,
            Some(false) => hi = mid,
            None => {
                // `mid` is (numerically indistinguishable from) the root itself.
                let delta = width / int(4);
                let left = &mid - &delta;
                let right = &mid + &delta;
                // otherwise keep the current (sound, wider) bracket
                if let (Some(true), Some(false)) = (decide(&f, &left, bits), decide(&f, &right, bits)) {
                    lo = left;
                    hi = right;
                }
                break;
            }
        }
    }
    DimensionEnclosure { value: Enclosure::new(lo, hi), requested_width }
}

/// Certified sign of `f(s)`, retrying at higher precision before giving up.
fn decide(f: &impl Fn(&Rational, u32) -> Enclosure, s: &Rational, bits: u32) -> Option<bool> {
    let mut b = bits;
    for _ in 0..3 {
        if let Some(sign) = f(s, b).sign() {
            return Some(sign);
        }
        b *= 2;
    }
    None
}

/// Default D precision: enclosure width 1e-30.
pub fn default_width() -> Rational {
    rat(1, 1) / Rational::from_integer(num_traits::pow(num_bigint::BigInt::from(10), 30))
}
