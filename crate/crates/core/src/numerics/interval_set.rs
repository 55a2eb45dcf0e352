//! Finite unions of intervals with exact rational endpoints.
//!
//! Each interval carries open/closed flags for both endpoints. A normalized
//! set is sorted, has no empty or single-point members, and merges any two
//! intervals whose union is connected (overlapping, or touching at a point
//! that at least one of them contains).

use std::cmp::Ordering;
use std::fmt;

use num_traits::{Signed, Zero};

use super::rational::{format_rational, max_rat, min_rat, Rational};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Interval {
    pub lo: Rational,
    pub hi: Rational,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Interval {
    pub fn closed(lo: Rational, hi: Rational) -> Self {
        Interval { lo, hi, lo_closed: true, hi_closed: true }
    }

    pub fn open(lo: Rational, hi: Rational) -> Self {
        Interval { lo, hi, lo_closed: false, hi_closed: false }
    }

    pub fn with_flags(lo: Rational, hi: Rational, lo_closed: bool, hi_closed: bool) -> Self {
        Interval { lo, hi, lo_closed, hi_closed }
    }

    pub fn length(&self) -> Rational {
        &self.hi - &self.lo
    }

    /// True when the interval contains no point at all.
    pub fn is_empty(&self) -> bool {
        match self.lo.cmp(&self.hi) {
            Ordering::Less => false,
            Ordering::Equal => !(self.lo_closed && self.hi_closed),
            Ordering::Greater => true,
        }
    }

    /// True when the interval has positive length.
    pub fn is_proper(&self) -> bool {
        self.lo < self.hi
    }

    pub fn contains(&self, x: &Rational) -> bool {
        let above = if self.lo_closed { &self.lo <= x } else { &self.lo < x };
        let below = if self.hi_closed { x <= &self.hi } else { x < &self.hi };
        above && below
    }

    pub fn midpoint(&self) -> Rational {
        (&self.lo + &self.hi) / Rational::from_integer(2.into())
    }

    pub fn intersect(&self, other: &Interval) -> Interval {
        let (lo, lo_closed) = match self.lo.cmp(&other.lo) {
            Ordering::Less => (other.lo.clone(), other.lo_closed),
            Ordering::Greater => (self.lo.clone(), self.lo_closed),
            Ordering::Equal => (self.lo.clone(), self.lo_closed && other.lo_closed),
        };
        let (hi, hi_closed) = match self.hi.cmp(&other.hi) {
            Ordering::Less => (self.hi.clone(), self.hi_closed),
            Ordering::Greater => (other.hi.clone(), other.hi_closed),
            Ordering::Equal => (self.hi.clone(), self.hi_closed && other.hi_closed),
        };
        Interval { lo, hi, lo_closed, hi_closed }
    }

    /// `self ⊆ other`.
    pub fn is_subset(&self, other: &Interval) -> bool {
        if self.is_empty() {
            return true;
        }
        let lo_ok = match self.lo.cmp(&other.lo) {
            Ordering::Greater => true,
            Ordering::Equal => other.lo_closed || !self.lo_closed,
            Ordering::Less => false,
        };
        let hi_ok = match self.hi.cmp(&other.hi) {
            Ordering::Less => true,
            Ordering::Equal => other.hi_closed || !self.hi_closed,
            Ordering::Greater => false,
        };
        lo_ok && hi_ok
    }

    /// Image under `x -> scale * x + offset` (`scale != 0`).
    pub fn affine_image(&self, scale: &Rational, offset: &Rational) -> Interval {
        let a = scale * &self.lo + offset;
        let b = scale * &self.hi + offset;
        if scale.is_negative() {
            Interval { lo: b, hi: a, lo_closed: self.hi_closed, hi_closed: self.lo_closed }
        } else {
            Interval { lo: a, hi: b, lo_closed: self.lo_closed, hi_closed: self.hi_closed }
        }
    }

    pub fn closure(&self) -> Interval {
        Interval::closed(self.lo.clone(), self.hi.clone())
    }

    pub fn interior(&self) -> Interval {
        Interval::open(self.lo.clone(), self.hi.clone())
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{}, {}{}",
            if self.lo_closed { '[' } else { '(' },
            format_rational(&self.lo),
            format_rational(&self.hi),
            if self.hi_closed { ']' } else { ')' }
        )
    }
}

fn start_order(a: &Interval, b: &Interval) -> Ordering {
    // closed starts sort before open starts at the same coordinate
    a.lo.cmp(&b.lo).then_with(|| b.lo_closed.cmp(&a.lo_closed))
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct IntervalSet {
    parts: Vec<Interval>,
}

impl IntervalSet {
    pub fn empty() -> Self {
        IntervalSet { parts: Vec::new() }
    }

    /// Normalizes an arbitrary list of intervals.
    pub fn from_intervals(parts: impl IntoIterator<Item = Interval>) -> Self {
        let mut parts: Vec<Interval> = parts.into_iter().filter(|iv| !iv.is_empty()).collect();
        parts.sort_by(start_order);
        let mut out: Vec<Interval> = Vec::with_capacity(parts.len());
        for iv in parts {
            if let Some(last) = out.last_mut() {
                let connected = iv.lo < last.hi || (iv.lo == last.hi && (iv.lo_closed || last.hi_closed));
                if connected {
                    match iv.hi.cmp(&last.hi) {
                        Ordering::Greater => {
                            last.hi = iv.hi;
                            last.hi_closed = iv.hi_closed;
                        }
                        Ordering::Equal => last.hi_closed |= iv.hi_closed,
                        Ordering::Less => {}
                    }
                    continue;
                }
            }
            out.push(iv);
        }
        IntervalSet { parts: out }
    }

    pub fn single(iv: Interval) -> Self {
        Self::from_intervals([iv])
    }

    pub fn closed(lo: Rational, hi: Rational) -> Self {
        Self::single(Interval::closed(lo, hi))
    }

    pub fn open(lo: Rational, hi: Rational) -> Self {
        Self::single(Interval::open(lo, hi))
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.parts
    }

    pub fn into_intervals(self) -> Vec<Interval> {
        self.parts
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Lebesgue measure; endpoint flags do not matter.
    pub fn measure(&self) -> Rational {
        self.parts.iter().fold(Rational::zero(), |acc, iv| acc + iv.length())
    }

    pub fn inf(&self) -> Option<&Rational> {
        self.parts.first().map(|iv| &iv.lo)
    }

    pub fn sup(&self) -> Option<&Rational> {
        self.parts.last().map(|iv| &iv.hi)
    }

    pub fn contains(&self, x: &Rational) -> bool {
        // binary search on the first interval whose upper end is >= x
        let idx = self.parts.partition_point(|iv| &iv.hi < x);
        self.parts[idx..].iter().take(2).any(|iv| iv.contains(x))
    }

    pub fn union(&self, other: &IntervalSet) -> IntervalSet {
        IntervalSet::from_intervals(self.parts.iter().chain(other.parts.iter()).cloned())
    }

    pub fn intersect(&self, other: &IntervalSet) -> IntervalSet {
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.parts.len() && j < other.parts.len() {
            let a = &self.parts[i];
            let b = &other.parts[j];
            let c = a.intersect(b);
            if !c.is_empty() {
                out.push(c);
            }
            // advance whichever ends first
            let a_first = match a.hi.cmp(&b.hi) {
                Ordering::Less => true,
                Ordering::Greater => false,
                Ordering::Equal => !a.hi_closed || b.hi_closed,
            };
            if a_first {
                i += 1;
            } else {
                j += 1;
            }
        }
        IntervalSet::from_intervals(out)
    }

    /// True if the two sets share at least one point (including single points).
    pub fn meets(&self, other: &IntervalSet) -> bool {
        let (mut i, mut j) = (0, 0);
        while i < self.parts.len() && j < other.parts.len() {
            let a = &self.parts[i];
            let b = &other.parts[j];
            if !a.intersect(b).is_empty() {
                return true;
            }
            if a.hi < b.hi || (a.hi == b.hi && !a.hi_closed) {
                i += 1;
            } else {
                j += 1;
            }
        }
        false
    }

    /// Complement of `self` inside the closed interval `[lo, hi]`.
    pub fn complement_within(&self, lo: &Rational, hi: &Rational) -> IntervalSet {
        let mut out = Vec::new();
        let mut cur = lo.clone();
        let mut cur_closed = true;
        for iv in &self.parts {
            if &iv.hi < lo {
                continue;
            }
            if &iv.lo > hi {
                break;
            }
            out.push(Interval::with_flags(cur.clone(), iv.lo.clone(), cur_closed, !iv.lo_closed));
            cur = iv.hi.clone();
            cur_closed = !iv.hi_closed;
        }
        out.push(Interval::with_flags(cur, hi.clone(), cur_closed, true));
        let region = Interval::closed(lo.clone(), hi.clone());
        IntervalSet::from_intervals(out.into_iter().map(|iv| iv.intersect(&region)))
    }

    /// Set difference `self \ other`, with exact endpoint flags.
    pub fn subtract(&self, other: &IntervalSet) -> IntervalSet {
        let (Some(lo), Some(hi)) = (self.inf(), self.sup()) else {
            return IntervalSet::empty();
        };
        if other.is_empty() {
            return self.clone();
        }
        self.intersect(&other.complement_within(lo, hi))
    }

    /// Closed `eps`-neighbourhood `{x : dist(x, S) <= eps}`.
    pub fn inflate(&self, eps: &Rational) -> Result<IntervalSet> {
        if eps.is_negative() {
            return Err(Error::NegativeRadius);
        }
        Ok(IntervalSet::from_intervals(
            self.parts.iter().map(|iv| Interval::closed(&iv.lo - eps, &iv.hi + eps)),
        ))
    }

    /// `self ⊆ other`, exact including single points.
    pub fn is_subset(&self, other: &IntervalSet) -> bool {
        // Components of a normalized set are maximal, so every component of
        // `self` must fit inside a single component of `other`.
        self.parts.iter().all(|iv| {
            let idx = other.parts.partition_point(|o| o.hi < iv.lo);
            other.parts[idx..].iter().take(2).any(|o| iv.is_subset(o))
        })
    }

    pub fn affine_image(&self, scale: &Rational, offset: &Rational) -> IntervalSet {
        IntervalSet::from_intervals(self.parts.iter().map(|iv| iv.affine_image(scale, offset)))
    }

    pub fn closure(&self) -> IntervalSet {
        IntervalSet::from_intervals(self.parts.iter().map(Interval::closure))
    }

    pub fn interior(&self) -> IntervalSet {
        IntervalSet::from_intervals(self.parts.iter().map(Interval::interior))
    }

    /// Every endpoint of every component, in order.
    pub fn endpoints(&self) -> Vec<Rational> {
        self.parts.iter().flat_map(|iv| [iv.lo.clone(), iv.hi.clone()]).collect()
    }

    pub fn max_component_length(&self) -> Option<Rational> {
        self.parts.iter().map(Interval::length).max()
    }

    pub fn span(&self) -> Option<(Rational, Rational)> {
        Some((self.inf()?.clone(), self.sup()?.clone()))
    }
}

impl fmt::Display for IntervalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            return write!(f, "∅");
        }
        for (k, iv) in self.parts.iter().enumerate() {
            if k > 0 {
                write!(f, " ∪ ")?;
            }
            write!(f, "{iv}")?;
        }
        Ok(())
    }
}

/// Hull of two rationals as a closed interval, whatever their order.
pub fn closed_between(a: &Rational, b: &Rational) -> Interval {
    Interval::closed(min_rat(a, b).clone(), max_rat(a, b).clone())
}
