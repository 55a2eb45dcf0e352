use std::fmt;

use num_traits::{One, Zero};

use crate::numerics::rational::format_rational;
use crate::numerics::{Interval, IntervalSet, Rational};

/// The affine map `x -> scale * x + offset` with a nonzero rational scale.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Affine {
    pub scale: Rational,
    pub offset: Rational,
}

impl Affine {
    pub fn new(scale: Rational, offset: Rational) -> Self {
        debug_assert!(!scale.is_zero());
        Affine { scale, offset }
    }

    pub fn identity() -> Self {
        Affine { scale: Rational::one(), offset: Rational::zero() }
    }

    pub fn is_identity(&self) -> bool {
        self.scale.is_one() && self.offset.is_zero()
    }

    pub fn apply(&self, x: &Rational) -> Rational {
        &self.scale * x + &self.offset
    }

    /// `self ∘ inner`, i.e. `x -> self(inner(x))`.
    pub fn compose(&self, inner: &Affine) -> Affine {
        Affine {
            scale: &self.scale * &inner.scale,
            offset: &self.scale * &inner.offset + &self.offset,
        }
    }

    pub fn inverse(&self) -> Affine {
        let s = self.scale.recip();
        Affine { offset: -(&s * &self.offset), scale: s }
    }

    /// Unique fixed point; requires `scale != 1`.
    pub fn fixed_point(&self) -> Rational {
        &self.offset / (Rational::one() - &self.scale)
    }

    pub fn image(&self, iv: &Interval) -> Interval {
        iv.affine_image(&self.scale, &self.offset)
    }

    pub fn image_set(&self, s: &IntervalSet) -> IntervalSet {
        s.affine_image(&self.scale, &self.offset)
    }
}

impl fmt::Display for Affine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x ↦ {}·x + {}", format_rational(&self.scale), format_rational(&self.offset))
    }
}
