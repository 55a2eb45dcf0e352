//! Gaps of the attractor and exact parallel volumes.
//!
//! Cover pieces `φ_w(Ī)` have both endpoints in `F`, so every bounded
//! component of `Ī \ cover(θ)` is exactly a gap of `F`, and every gap longer
//! than `θ` shows up that way. This makes gap enumeration and `λ(F_ε)`
//! exact rational computations.

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::ifs::{Ifs, MemberCertificate};
use crate::numerics::rational::int;
use crate::numerics::{Enclosure, Interval, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gap {
    pub interval: Interval,
    pub length: Rational,
    /// resolution of the cover in which the gap was read off
    pub resolution: Rational,
    pub left_cert: MemberCertificate,
    pub right_cert: MemberCertificate,
}

/// Gaps sorted by decreasing length (ties by position).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GapList {
    pub gaps: Vec<Gap>,
}

impl GapList {
    pub fn lengths(&self) -> Vec<Rational> {
        self.gaps.iter().map(|g| g.length.clone()).collect()
    }

    pub fn len(&self) -> usize {
        self.gaps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gaps.is_empty()
    }
}

/// All gaps of `F` strictly longer than `theta`, with membership
/// certificates for both endpoints.
pub fn gaps_above(ifs: &Ifs, theta: &Rational) -> Result<GapList> {
    if !theta.is_positive() {
        return Err(Error::NonPositive("theta"));
    }
    let gaps = gaps_at_least(ifs, theta, theta, true)?;
    Ok(GapList { gaps })
}

/// Gaps longer than (or, with `strict == false`, at least) `threshold`,
/// read from the cover at resolution `delta <= threshold`.
pub(crate) fn gaps_at_least(ifs: &Ifs, threshold: &Rational, delta: &Rational, strict: bool) -> Result<Vec<Gap>> {
    let pieces = ifs.cover_pieces(delta)?;
    let mut gaps = Vec::new();
    let mut iter = pieces.iter();
    let Some(first) = iter.next() else {
        return Ok(gaps);
    };
    let mut reach = first.hi.clone();
    let mut reach_piece = first;
    for p in iter {
        if p.lo > reach {
            let length = &p.lo - &reach;
            if (strict && &length > threshold) || (!strict && &length >= threshold) {
                gaps.push(Gap {
                    interval: Interval::open(reach.clone(), p.lo.clone()),
                    length,
                    resolution: delta.clone(),
                    left_cert: reach_piece.cert_hi(ifs),
                    right_cert: p.cert_lo(ifs),
                });
            }
        }
        if p.hi > reach {
            reach = p.hi.clone();
            reach_piece = p;
        }
    }
    gaps.sort_by(|a, b| b.length.cmp(&a.length).then_with(|| a.interval.lo.cmp(&b.interval.lo)));
    Ok(gaps)
}

/// `λ(F_ε) = λ(Ī) + 2ε − Σ_{d_j > 2ε} (d_j − 2ε)` over the gaps of `F`.
pub fn parallel_volume(ifs: &Ifs, eps: &Rational) -> Result<Rational> {
    if !eps.is_positive() {
        return Err(Error::NonPositive("eps"));
    }
    let two_eps = eps * int(2);
    let gaps = gaps_above(ifs, &two_eps)?;
    let closed: Rational = gaps
        .gaps
        .iter()
        .fold(Rational::zero(), |acc, g| acc + (&g.length - &two_eps));
    Ok(ifs.hull_length() + &two_eps - closed)
}

/// Samples of the rescaled volume `ε^{D-1} λ(F_ε)`.
pub fn rescaled_volume_samples(
    ifs: &Ifs,
    eps_list: &[Rational],
    dimension: &Enclosure,
    bits: u32,
) -> Result<Vec<(Rational, Enclosure)>> {
    let exponent = dimension.add_rational(&-int(1));
    eps_list
        .iter()
        .map(|eps| {
            let vol = parallel_volume(ifs, eps)?;
            let factor = Enclosure::point(eps.clone()).pow(&exponent, bits)?;
            Ok((eps.clone(), factor.scale(&vol)))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rational::rat;

    fn cantor() -> Ifs {
        Ifs::from_pairs(&[(rat(1, 3), int(0)), (rat(1, 3), rat(2, 3))]).unwrap()
    }

    fn example() -> Ifs {
        Ifs::from_pairs(&[(rat(1, 4), int(0)), (rat(1, 4), rat(1, 4)), (rat(1, 4), rat(3, 2))]).unwrap()
    }

    #[test]
    fn cantor_gaps() {
        let g = gaps_above(&cantor(), &rat(1, 9)).unwrap();
        assert_eq!(g.len(), 1);
        assert_eq!(g.gaps[0].interval, Interval::open(rat(1, 3), rat(2, 3)));
        let g = gaps_above(&cantor(), &rat(1, 27)).unwrap();
        let ivs: Vec<Interval> = g.gaps.iter().map(|g| g.interval.clone()).collect();
        assert_eq!(
            ivs,
            vec![
                Interval::open(rat(1, 3), rat(2, 3)),
                Interval::open(rat(1, 9), rat(2, 9)),
                Interval::open(rat(7, 9), rat(8, 9)),
            ]
        );
        assert!(gaps_above(&cantor(), &int(0)).is_err());
    }

    #[test]
    fn example_gap() {
        let g = gaps_above(&example(), &rat(1, 2)).unwrap();
        assert_eq!(g.len(), 1);
        assert_eq!(g.gaps[0].interval, Interval::open(rat(3, 4), rat(3, 2)));
        assert_eq!(g.gaps[0].length, rat(3, 4));
    }

    #[test]
    fn gap_endpoints_are_certified() {
        let e = example();
        for gap in gaps_above(&e, &rat(1, 100)).unwrap().gaps {
            assert!(gap.left_cert.verify(&e, &gap.interval.lo));
            assert!(gap.right_cert.verify(&e, &gap.interval.hi));
        }
    }

    #[test]
    fn cantor_volumes() {
        assert_eq!(parallel_volume(&cantor(), &rat(1, 18)).unwrap(), rat(8, 9));
        assert_eq!(parallel_volume(&cantor(), &rat(1, 6)).unwrap(), rat(4, 3));
        assert_eq!(parallel_volume(&cantor(), &int(1)).unwrap(), int(3));
        assert!(parallel_volume(&cantor(), &int(0)).is_err());
    }

    #[test]
    fn unit_interval_rescaled_volume() {
        let ifs = Ifs::from_pairs(&[(rat(1, 2), int(0)), (rat(1, 2), rat(1, 2))]).unwrap();
        let eps = vec![rat(1, 10), rat(1, 1000)];
        let s = rescaled_volume_samples(&ifs, &eps, &Enclosure::from_int(1), 64).unwrap();
        assert!(s[0].1.contains(&rat(6, 5)));
        assert!(s[1].1.contains(&rat(1002, 1000)));
    }
}
