//! Digit systems `φ_j(x) = (x + d_j) / A` and their open set condition.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::ifs::{Ifs, Similarity, Word};
use crate::numerics::rational::{int, pow_int, rat};
use crate::numerics::{Interval, IntervalSet, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DigitSystem {
    pub base: Rational,
    pub digits: Vec<Rational>,
}

impl DigitSystem {
    pub fn new(base: Rational, digits: Vec<Rational>) -> Result<Self> {
        if base <= Rational::one() {
            return Err(Error::invalid("A", "must be greater than 1"));
        }
        if digits.len() < 2 {
            return Err(Error::invalid("d", "at least two digits are required"));
        }
        let mut sorted = digits.clone();
        sorted.sort();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::invalid("d", "digits must be distinct"));
        }
        Ok(DigitSystem { base, digits })
    }

    pub fn from_integers(base: i64, digits: &[i64]) -> Result<Self> {
        DigitSystem::new(int(base), digits.iter().map(|&d| int(d)).collect())
    }

    pub fn to_ifs(&self) -> Result<Ifs> {
        let ratio = self.base.recip();
        let maps = self
            .digits
            .iter()
            .map(|d| Similarity::new(ratio.clone(), d * &ratio))
            .collect::<Result<Vec<_>>>()?;
        Ifs::new(maps)
    }

    /// Recognizes an IFS whose maps all read `x ↦ (x + d_j)/A`.
    pub fn from_ifs(ifs: &Ifs) -> Option<DigitSystem> {
        let first = &ifs.maps()[0];
        if ifs.maps().iter().any(|m| m.reflect || m.ratio != first.ratio) {
            return None;
        }
        let base = first.ratio.recip();
        let digits = ifs.maps().iter().map(|m| &m.translation * &base).collect();
        DigitSystem::new(base, digits).ok()
    }

    /// `(A, d_j)` as integers when all of them are integral.
    pub fn integral(&self) -> Option<(BigInt, Vec<BigInt>)> {
        if !self.base.is_integer() || self.digits.iter().any(|d| !d.is_integer()) {
            return None;
        }
        Some((self.base.to_integer(), self.digits.iter().map(|d| d.to_integer()).collect()))
    }
}

/// For integral data: are the digits pairwise distinct mod `A`? `true`
/// certifies OSC (base-`A` expansions are then unique). `false` does not
/// refute it: `A = 2`, `𝒟 = {0, 20}` has colliding residues and touching
/// images `[0, 10]`, `[10, 20]`.
pub fn osc_mod_check(ds: &DigitSystem) -> Result<bool> {
    let (a, digits) = ds.integral().ok_or(Error::NonIntegerDigits)?;
    let mut residues: Vec<BigInt> = digits.iter().map(|d| d.mod_floor(&a)).collect();
    residues.sort();
    Ok(residues.windows(2).all(|w| w[0] != w[1]))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HeLauOutcome {
    /// `#𝒟_k = N^k` for all `k <= depth`. `conclusive` is set when the
    /// digit sums lie on a lattice `(1/q)ℤ`, which makes `𝒟_∞` uniformly
    /// discrete outright.
    TrueToDepth { depth: usize, min_spacing: Rational, conclusive: bool },
    /// Two distinct digit words with the same sum in `𝒟_level`.
    Collision { level: usize, value: Rational, first: Word, second: Word },
}

impl HeLauOutcome {
    pub fn holds(&self) -> bool {
        matches!(self, HeLauOutcome::TrueToDepth { .. })
    }
}

/// Enumerates `𝒟_k = 𝒟 + A·𝒟_{k-1}` for `k <= depth` and checks
/// `#𝒟_k = N^k` and the spacing of `⋃ 𝒟_k`.
pub fn osc_helau_check(ds: &DigitSystem, depth: usize) -> Result<HeLauOutcome> {
    if depth == 0 {
        return Err(Error::NonPositive("depth"));
    }
    // value -> word (digit indices, least significant first)
    let mut level: BTreeMap<Rational, Word> = BTreeMap::new();
    let mut union: Vec<Rational> = Vec::new();
    for k in 1..=depth {
        let mut next: BTreeMap<Rational, Word> = BTreeMap::new();
        let previous: Vec<(Rational, Word)> = if k == 1 {
            vec![(Rational::zero(), Word::empty())]
        } else {
            level.into_iter().collect()
        };
        for (value, word) in &previous {
            for (j, d) in ds.digits.iter().enumerate() {
                let v = d + &ds.base * value;
                let w = Word(std::iter::once(j as u32).chain(word.letters().iter().copied()).collect());
                if let Some(other) = next.get(&v) {
                    return Ok(HeLauOutcome::Collision { level: k, value: v, first: other.clone(), second: w });
                }
                next.insert(v, w);
            }
        }
        union.extend(next.keys().cloned());
        level = next;
    }
    union.sort();
    union.dedup();
    let min_spacing = union
        .windows(2)
        .map(|w| &w[1] - &w[0])
        .min()
        .unwrap_or_else(Rational::zero);
    let conclusive = ds.base.is_integer();
    Ok(HeLauOutcome::TrueToDepth { depth, min_spacing, conclusive })
}

/// Exact overlap data for `φ_{13}φ_{23}^k(I)` and `φ_2φ_{23}^kφ_2(I)` in the
/// system `A = 4`, `𝒟 = {0, 1, 6}`, `I = (0, 2)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OverlapExample {
    pub endpoint_difference: Rational,
    pub overlap_length: Rational,
    pub interval_length: Rational,
    pub first: Interval,
    pub second: Interval,
}

pub fn example_system() -> Ifs {
    DigitSystem::from_integers(4, &[0, 1, 6]).and_then(|d| d.to_ifs()).expect("valid digit system")
}

pub fn example_overlap(k: usize) -> OverlapExample {
    let ifs = example_system();
    let pair = Word::from_one_based(&[2, 3]).repeat(k);
    let w1 = Word::from_one_based(&[1, 3]).concat(&pair);
    let w2 = Word::from_one_based(&[2]).concat(&pair).concat(&Word::from_one_based(&[2]));
    let interior = ifs.hull_interior();
    let first = ifs.word_map(&w1).image(&interior);
    let second = ifs.word_map(&w2).image(&interior);
    let overlap = IntervalSet::single(first.clone()).intersect(&IntervalSet::single(second.clone()));
    OverlapExample {
        endpoint_difference: &first.lo - &second.lo,
        overlap_length: overlap.measure(),
        interval_length: first.length(),
        first,
        second,
    }
}

/// `(1/4)^{2k+2}`, the closed form of the difference and of the overlap.
pub fn example_overlap_closed_form(k: usize) -> Rational {
    pow_int(&rat(1, 4), 2 * k as i64 + 2)
}

/// `q` with all digit sums on `(1/q)ℤ`, the lcm of the digit denominators,
/// when `A` is an integer.
pub fn lattice_denominator(ds: &DigitSystem) -> Option<u64> {
    if !ds.base.is_integer() {
        return None;
    }
    ds.digits.iter().fold(BigInt::one(), |l, d| l.lcm(d.denom())).to_u64()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builds_systems() {
        let ifs = DigitSystem::from_integers(4, &[0, 1, 6]).unwrap().to_ifs().unwrap();
        assert_eq!(ifs.hull(), (&int(0), &int(2)));
        let cantor = DigitSystem::from_integers(3, &[0, 2]).unwrap().to_ifs().unwrap();
        assert_eq!(cantor.hull(), (&int(0), &int(1)));
        assert!(DigitSystem::from_integers(1, &[0, 1]).is_err());
        assert!(DigitSystem::from_integers(3, &[1, 1]).is_err());
    }

    #[test]
    fn recognizes_digit_form() {
        let ifs = example_system();
        let ds = DigitSystem::from_ifs(&ifs).unwrap();
        assert_eq!(ds, DigitSystem::from_integers(4, &[0, 1, 6]).unwrap());
        let mixed = Ifs::from_pairs(&[(rat(1, 2), int(0)), (rat(1, 3), rat(2, 3))]).unwrap();
        assert!(DigitSystem::from_ifs(&mixed).is_none());
    }

    #[test]
    fn residues() {
        assert!(osc_mod_check(&DigitSystem::from_integers(4, &[0, 1, 6]).unwrap()).unwrap());
        assert!(!osc_mod_check(&DigitSystem::from_integers(4, &[0, 1, 5]).unwrap()).unwrap());
        assert!(osc_mod_check(&DigitSystem::from_integers(2, &[0, 1]).unwrap()).unwrap());
        let frac = DigitSystem::new(int(3), vec![int(0), rat(1, 2)]).unwrap();
        assert_eq!(osc_mod_check(&frac), Err(Error::NonIntegerDigits));
    }

    #[test]
    fn helau() {
        let ok = osc_helau_check(&DigitSystem::from_integers(4, &[0, 1, 6]).unwrap(), 6).unwrap();
        assert_eq!(ok, HeLauOutcome::TrueToDepth { depth: 6, min_spacing: int(1), conclusive: true });
        let bad = osc_helau_check(&DigitSystem::from_integers(4, &[0, 1, 5]).unwrap(), 2).unwrap();
        match bad {
            HeLauOutcome::Collision { level, value, first, second } => {
                assert_eq!(level, 2);
                assert_ne!(first, second);
                // both words sum to the same value
                let ds = [0i64, 1, 5];
                let sum = |w: &Word| w.letters().iter().rev().fold(0i64, |acc, &j| 4 * acc + ds[j as usize]);
                assert_eq!(int(sum(&first)), value);
                assert_eq!(int(sum(&second)), value);
            }
            other => panic!("expected a collision, got {other:?}"),
        }
        assert!(osc_helau_check(&DigitSystem::from_integers(3, &[0, 2]).unwrap(), 8).unwrap().holds());
    }

    #[test]
    fn overlap_example_matches_closed_forms() {
        let e = example_overlap(0);
        assert_eq!((e.endpoint_difference.clone(), e.overlap_length.clone(), e.interval_length.clone()), (rat(1, 16), rat(1, 16), rat(1, 8)));
        let e = example_overlap(1);
        assert_eq!((e.endpoint_difference, e.overlap_length, e.interval_length), (rat(1, 256), rat(1, 256), rat(1, 128)));
        for k in 0..6 {
            let e = example_overlap(k);
            let c = example_overlap_closed_form(k);
            assert_eq!(e.endpoint_difference, c);
            assert_eq!(e.overlap_length, c);
            assert_eq!(e.interval_length, c * int(2));
        }
    }

    #[test]
    fn fixed_points() {
        let ifs = example_system();
        assert_eq!(ifs.apply_word_point(&Word::from_one_based(&[1]), &int(0)).unwrap(), int(0));
        assert_eq!(ifs.apply_word_point(&Word::from_one_based(&[3]), &int(2)).unwrap(), int(2));
        assert_eq!(ifs.apply_word_point(&Word::from_one_based(&[2, 3]), &rat(2, 3)).unwrap(), rat(2, 3));
    }

    #[test]
    fn lattice_denominators() {
        assert_eq!(lattice_denominator(&DigitSystem::new(int(3), vec![int(0), rat(1, 2)]).unwrap()), Some(2));
        assert_eq!(lattice_denominator(&DigitSystem::new(rat(5, 2), vec![int(0), int(1)]).unwrap()), None);
    }
}
