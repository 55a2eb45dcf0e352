//! Iterated function systems of similarities on ℝ.
//!
//! Letters of a [`Word`] are stored zero-based; everything user-facing
//! (display, JSON) is one-based.

mod affine;
pub mod dimension;
pub mod lattice;

use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

pub use affine::Affine;
pub use dimension::{moran_dimension, DimensionEnclosure};
pub use lattice::{lattice_classify, LatticeClass};

use crate::error::{Error, Result};
use crate::numerics::rational::format_rational;
use crate::numerics::{Interval, IntervalSet, Rational};

/// The similarity `x -> sign * ratio * x + translation`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Similarity {
    pub reflect: bool,
    pub ratio: Rational,
    pub translation: Rational,
}

impl Similarity {
    pub fn new(ratio: Rational, translation: Rational) -> Result<Self> {
        Self::with_sign(1, ratio, translation)
    }

    pub fn with_sign(sign: i32, ratio: Rational, translation: Rational) -> Result<Self> {
        if sign != 1 && sign != -1 {
            return Err(Error::invalid("sign", format!("must be 1 or -1, got {sign}")));
        }
        if !(ratio.is_positive() && ratio < Rational::one()) {
            return Err(Error::invalid(
                "ratio",
                format!("{} is not a contraction ratio in (0,1)", format_rational(&ratio)),
            ));
        }
        Ok(Similarity { reflect: sign == -1, ratio, translation })
    }

    pub fn sign(&self) -> i32 {
        if self.reflect {
            -1
        } else {
            1
        }
    }

    pub fn affine(&self) -> Affine {
        let scale = if self.reflect { -self.ratio.clone() } else { self.ratio.clone() };
        Affine::new(scale, self.translation.clone())
    }

    pub fn apply(&self, x: &Rational) -> Rational {
        self.affine().apply(x)
    }
}

/// A finite word over the alphabet of an IFS (zero-based letters).
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Word(pub Vec<u32>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    /// Builds a word from one-based letters, as written in the literature.
    pub fn from_one_based(letters: &[u32]) -> Self {
        Word(letters.iter().map(|l| l - 1).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[u32] {
        &self.0
    }

    pub fn one_based(&self) -> Vec<u32> {
        self.0.iter().map(|l| l + 1).collect()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn push(&self, letter: u32) -> Word {
        let mut v = self.0.clone();
        v.push(letter);
        Word(v)
    }

    pub fn repeat(&self, times: usize) -> Word {
        Word(self.0.repeat(times))
    }

    /// All words of length `n` over `alphabet` letters in lexicographic order.
    pub fn all_of_length(alphabet: usize, n: usize) -> Vec<Word> {
        let mut out = vec![Word::empty()];
        for _ in 0..n {
            out = out
                .iter()
                .flat_map(|w| (0..alphabet as u32).map(move |l| w.push(l)))
                .collect();
        }
        out
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "∅");
        }
        let parts: Vec<String> = self.one_based().iter().map(u32::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HullEnd {
    Left,
    Right,
}

/// Certificate that a rational point lies in the attractor:
/// `point = φ_prefix(fix(φ_cycle))` with `cycle` nonempty.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MemberCertificate {
    pub prefix: Word,
    pub cycle: Word,
}

impl MemberCertificate {
    pub fn point(&self, ifs: &Ifs) -> Rational {
        let fixed = ifs.word_map(&self.cycle).fixed_point();
        ifs.word_map(&self.prefix).apply(&fixed)
    }

    pub fn verify(&self, ifs: &Ifs, x: &Rational) -> bool {
        !self.cycle.is_empty() && &self.point(ifs) == x
    }

    pub fn prepend(&self, w: &Word) -> MemberCertificate {
        MemberCertificate { prefix: w.concat(&self.prefix), cycle: self.cycle.clone() }
    }
}

/// One piece `φ_w(Ī)` of a resolution cover.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverPiece {
    pub word: Word,
    pub lo: Rational,
    pub hi: Rational,
    /// hull endpoint mapped onto `lo` (the other one is mapped onto `hi`)
    pub lo_from: HullEnd,
}

impl CoverPiece {
    pub fn cert_lo(&self, ifs: &Ifs) -> MemberCertificate {
        ifs.hull_certificate(self.lo_from).prepend(&self.word)
    }

    pub fn cert_hi(&self, ifs: &Ifs) -> MemberCertificate {
        let end = match self.lo_from {
            HullEnd::Left => HullEnd::Right,
            HullEnd::Right => HullEnd::Left,
        };
        ifs.hull_certificate(end).prepend(&self.word)
    }
}

/// A finite system of at least two contracting similarities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ifs {
    maps: Vec<Similarity>,
    hull: (Rational, Rational),
    hull_certs: (MemberCertificate, MemberCertificate),
}

impl Ifs {
    pub fn new(maps: Vec<Similarity>) -> Result<Self> {
        if maps.len() < 2 {
            return Err(Error::invalid("maps", "an IFS needs at least two maps"));
        }
        let (hull, hull_certs) = compute_hull(&maps);
        if hull.0 >= hull.1 {
            return Err(Error::invalid("maps", "all maps share one fixed point; the attractor is a single point"));
        }
        Ok(Ifs { maps, hull, hull_certs })
    }

    /// Convenience constructor for orientation-preserving systems from
    /// `(ratio, translation)` pairs.
    pub fn from_pairs(pairs: &[(Rational, Rational)]) -> Result<Self> {
        let maps = pairs
            .iter()
            .map(|(r, t)| Similarity::new(r.clone(), t.clone()))
            .collect::<Result<Vec<_>>>()?;
        Ifs::new(maps)
    }

    pub fn maps(&self) -> &[Similarity] {
        &self.maps
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    pub fn ratios(&self) -> Vec<Rational> {
        self.maps.iter().map(|m| m.ratio.clone()).collect()
    }

    pub fn ratio_sum(&self) -> Rational {
        self.maps.iter().fold(Rational::zero(), |acc, m| acc + &m.ratio)
    }

    pub fn max_ratio(&self) -> Rational {
        self.maps.iter().map(|m| m.ratio.clone()).max().unwrap()
    }

    /// The closed convex hull `[a, b]` of the attractor.
    pub fn hull(&self) -> (&Rational, &Rational) {
        (&self.hull.0, &self.hull.1)
    }

    pub fn hull_interval(&self) -> Interval {
        Interval::closed(self.hull.0.clone(), self.hull.1.clone())
    }

    /// The open hull interior `I`.
    pub fn hull_interior(&self) -> Interval {
        Interval::open(self.hull.0.clone(), self.hull.1.clone())
    }

    pub fn hull_length(&self) -> Rational {
        &self.hull.1 - &self.hull.0
    }

    pub fn hull_certificate(&self, end: HullEnd) -> MemberCertificate {
        match end {
            HullEnd::Left => self.hull_certs.0.clone(),
            HullEnd::Right => self.hull_certs.1.clone(),
        }
    }

    pub fn hull_endpoint(&self, end: HullEnd) -> &Rational {
        match end {
            HullEnd::Left => &self.hull.0,
            HullEnd::Right => &self.hull.1,
        }
    }

    /// `φ_w = φ_{w_1} ∘ … ∘ φ_{w_n}` as an affine map.
    pub fn word_map(&self, w: &Word) -> Affine {
        w.letters()
            .iter()
            .fold(Affine::identity(), |acc, &l| acc.compose(&self.maps[l as usize].affine()))
    }

    pub fn word_ratio(&self, w: &Word) -> Rational {
        w.letters().iter().fold(Rational::one(), |acc, &l| acc * &self.maps[l as usize].ratio)
    }

    pub fn check_word(&self, w: &Word) -> Result<()> {
        match w.letters().iter().find(|&&l| l as usize >= self.maps.len()) {
            Some(l) => Err(Error::invalid("word", format!("letter {} outside alphabet 1..{}", l + 1, self.maps.len()))),
            None => Ok(()),
        }
    }

    /// Exact image `φ_w(S)`.
    pub fn apply_word(&self, w: &Word, s: &IntervalSet) -> Result<IntervalSet> {
        self.check_word(w)?;
        Ok(self.word_map(w).image_set(s))
    }

    pub fn apply_word_point(&self, w: &Word, x: &Rational) -> Result<Rational> {
        self.check_word(w)?;
        Ok(self.word_map(w).apply(x))
    }

    /// `Φ S = ⋃ φ_i S`.
    pub fn apply_all(&self, s: &IntervalSet) -> IntervalSet {
        IntervalSet::from_intervals(
            self.maps
                .iter()
                .flat_map(|m| m.affine().image_set(s).into_intervals()),
        )
    }

    /// Pieces `φ_w(Ī)` of a prefix-free word set covering the attractor,
    /// each of length at most `delta`, expanding a word only while its
    /// image is longer than `delta`.
    pub fn cover_pieces(&self, delta: &Rational) -> Result<Vec<CoverPiece>> {
        if !delta.is_positive() {
            return Err(Error::NonPositive("delta"));
        }
        let len = self.hull_length();
        let mut out = Vec::new();
        let mut stack = vec![(Word::empty(), Affine::identity())];
        while let Some((w, map)) = stack.pop() {
            if map.scale.abs() * &len <= *delta {
                let a = map.apply(&self.hull.0);
                let b = map.apply(&self.hull.1);
                let (lo, hi, lo_from) = if a <= b { (a, b, HullEnd::Left) } else { (b, a, HullEnd::Right) };
                out.push(CoverPiece { word: w, lo, hi, lo_from });
                continue;
            }
            for l in (0..self.maps.len() as u32).rev() {
                let next = map.compose(&self.maps[l as usize].affine());
                stack.push((w.push(l), next));
            }
        }
        out.sort_by(|p, q| p.lo.cmp(&q.lo).then_with(|| p.hi.cmp(&q.hi)));
        Ok(out)
    }

    /// Normalized union of [`Ifs::cover_pieces`].
    pub fn cover(&self, delta: &Rational) -> Result<IntervalSet> {
        Ok(IntervalSet::from_intervals(
            self.cover_pieces(delta)?
                .into_iter()
                .map(|p| Interval::closed(p.lo, p.hi)),
        ))
    }

    /// Searches a word `w` with `|w| <= max_len` such that `x = φ_w(a)` or
    /// `x = φ_w(b)` for a hull endpoint, giving a membership certificate.
    pub fn certify_member(&self, x: &Rational, max_len: usize) -> Option<MemberCertificate> {
        let hull = self.hull_interval();
        let mut stack = vec![(Word::empty(), Affine::identity())];
        while let Some((w, map)) = stack.pop() {
            for end in [HullEnd::Left, HullEnd::Right] {
                if &map.apply(self.hull_endpoint(end)) == x {
                    return Some(self.hull_certificate(end).prepend(&w));
                }
            }
            if w.len() >= max_len {
                continue;
            }
            for l in (0..self.maps.len() as u32).rev() {
                let next = map.compose(&self.maps[l as usize].affine());
                if next.image(&hull).contains(x) {
                    stack.push((w.push(l), next));
                }
            }
        }
        None
    }
}

impl fmt::Display for Ifs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .maps
            .iter()
            .map(|m| {
                format!(
                    "{}{}·x + {}",
                    if m.reflect { "-" } else { "" },
                    format_rational(&m.ratio),
                    format_rational(&m.translation)
                )
            })
            .collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// Hull `[a, b]` of the attractor by exact case analysis: `a` is attained
/// as `φ_i(a)` (orientation preserving `i`) or `φ_i(b)` (reflection), and
/// symmetrically for `b`. Each choice is a 2×2 linear system; the hull is
/// the unique candidate that reproduces itself under the min/max equations.
fn compute_hull(maps: &[Similarity]) -> ((Rational, Rational), (MemberCertificate, MemberCertificate)) {
    let affs: Vec<Affine> = maps.iter().map(Similarity::affine).collect();
    let one = Rational::one();
    for (i, fi) in affs.iter().enumerate() {
        for (j, fj) in affs.iter().enumerate() {
            // a = s_i * (a or b) + t_i ; b = s_j * (b or a) + t_j
            let (a, b) = match (maps[i].reflect, maps[j].reflect) {
                (false, false) => (fi.fixed_point(), fj.fixed_point()),
                (false, true) => {
                    let a = fi.fixed_point();
                    (a.clone(), fj.apply(&a))
                }
                (true, false) => {
                    let b = fj.fixed_point();
                    (fi.apply(&b), b)
                }
                (true, true) => {
                    // a = s_i b + t_i, b = s_j a + t_j  =>  a = s_i s_j a + s_i t_j + t_i
                    let det = &one - &fi.scale * &fj.scale;
                    let a = (&fi.scale * &fj.offset + &fi.offset) / &det;
                    let b = fj.apply(&a);
                    (a, b)
                }
            };
            if a > b {
                continue;
            }
            let images: Vec<Rational> = affs.iter().flat_map(|f| [f.apply(&a), f.apply(&b)]).collect();
            let min = images.iter().min().unwrap();
            let max = images.iter().max().unwrap();
            if *min != a || *max != b {
                continue;
            }
            let wi = Word(vec![i as u32]);
            let wj = Word(vec![j as u32]);
            let certs = match (maps[i].reflect, maps[j].reflect) {
                (false, false) => (
                    MemberCertificate { prefix: Word::empty(), cycle: wi },
                    MemberCertificate { prefix: Word::empty(), cycle: wj },
                ),
                (false, true) => (
                    MemberCertificate { prefix: Word::empty(), cycle: wi.clone() },
                    MemberCertificate { prefix: wj, cycle: wi },
                ),
                (true, false) => (
                    MemberCertificate { prefix: wi, cycle: wj.clone() },
                    MemberCertificate { prefix: Word::empty(), cycle: wj },
                ),
                (true, true) => (
                    MemberCertificate { prefix: Word::empty(), cycle: wi.concat(&wj) },
                    MemberCertificate { prefix: Word::empty(), cycle: wj.concat(&wi) },
                ),
            };
            return ((a, b), certs);
        }
    }
    unreachable!("the hull fixed-point equations always have a solution among the candidates")
}
