//! Feasible open sets and the generator data `Γ`, `G`, `g` they induce.
//!
//! Two shapes are supported: finite unions of open intervals (typically the
//! convex-hull iterates `Φ^m I`) and sets
//! `U_Λ = ⋃_{ω ∈ Σ*} φ_ω(B_Λ)` with `B_Λ = ⋃_{u ∈ Λ} φ_u(I)`.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::gaps::gaps_at_least;
use crate::ifs::{Ifs, MemberCertificate, Word};
use crate::numerics::rational::int;
use crate::numerics::{Enclosure, Interval, IntervalSet, Rational};

/// Maximal word length tried when certifying boundary points of `O`.
const BOUNDARY_CERT_LEN: usize = 48;

/// Recursion cap for exact membership tests in `U_Λ`.
const MEMBERSHIP_DEPTH: usize = 256;

/// `φ_i(O) ∩ φ_j(O)` for a pair `i < j` (zero-based) where it is nonempty.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OverlapWitness {
    pub i: u32,
    pub j: u32,
    pub intersection: IntervalSet,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FeasibilityReport {
    pub feasible: bool,
    /// maps `i` with `φ_i(O) ⊄ O`
    pub containment_failures: Vec<u32>,
    pub overlaps: Vec<OverlapWitness>,
}

/// Certificate that `U_Λ` is feasible: at `depth` the outer superset
/// `A_depth` already has pairwise disjoint images.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ULambdaCertificate {
    pub m: usize,
    pub kappa: Word,
    pub k: usize,
    pub lambda: Vec<Word>,
    pub depth: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OpenSetKind {
    FiniteUnion(IntervalSet),
    ULambda { m: usize, lambda: Vec<Word>, depth: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OpenSetRep {
    pub kind: OpenSetKind,
    /// `O ∩ F ≠ ∅`
    pub strong: bool,
    /// `∂O ⊆ F`
    pub compatible: bool,
    pub feasible: bool,
    /// witness `x ∈ O ∩ F`, when strong
    pub strong_witness: Option<MemberCertificate>,
}

impl OpenSetRep {
    /// Checks feasibility, strongness and compatibility of a finite union of
    /// open intervals.
    pub fn finite_union(ifs: &Ifs, set: IntervalSet) -> Result<Self> {
        let report = check_feasible(ifs, &set)?;
        let compatible = set
            .endpoints()
            .iter()
            .all(|x| ifs.certify_member(x, BOUNDARY_CERT_LEN).is_some());
        let strong_witness = strong_witness(ifs, &set)?;
        Ok(OpenSetRep {
            kind: OpenSetKind::FiniteUnion(set),
            strong: strong_witness.is_some(),
            compatible,
            feasible: report.feasible,
            strong_witness,
        })
    }

    /// `U_Λ` from a search certificate. Strongness holds because `I ∩ F`
    /// is nonempty and compatibility because `∂U_Λ` lies in the closure of
    /// images of `∂I ⊆ F`.
    pub fn u_lambda(ifs: &Ifs, cert: &ULambdaCertificate) -> Result<Self> {
        for w in &cert.lambda {
            ifs.check_word(w)?;
        }
        let feasible = verify_u_lambda(ifs, &cert.lambda, cert.depth);
        let b = base_set(ifs, &cert.lambda);
        let strong_witness = strong_witness(ifs, &b)?;
        Ok(OpenSetRep {
            kind: OpenSetKind::ULambda { m: cert.m, lambda: cert.lambda.clone(), depth: cert.depth },
            strong: strong_witness.is_some(),
            compatible: true,
            feasible,
            strong_witness,
        })
    }

    /// Strong and compatible feasible sets satisfy the projection condition.
    pub fn projection_condition(&self) -> bool {
        self.feasible && self.strong && self.compatible
    }
}

/// A cover piece inside `set` has both endpoints in `F ∩ set`.
fn strong_witness(ifs: &Ifs, set: &IntervalSet) -> Result<Option<MemberCertificate>> {
    let Some(longest) = set.max_component_length() else {
        return Ok(None);
    };
    let mut delta = longest / int(2);
    for _ in 0..8 {
        for piece in ifs.cover_pieces(&delta)? {
            if IntervalSet::closed(piece.lo.clone(), piece.hi.clone()).is_subset(set) {
                return Ok(Some(piece.cert_lo(ifs)));
            }
        }
        delta /= int(4);
    }
    Ok(None)
}

/// `Φ^m I` as a normalized union of open intervals.
pub fn convex_iterate(ifs: &Ifs, m: usize) -> IntervalSet {
    let mut set = IntervalSet::single(ifs.hull_interior());
    for _ in 0..m {
        set = ifs.apply_all(&set);
    }
    set
}

fn require_open(set: &IntervalSet) -> Result<()> {
    if set.intervals().iter().any(|iv| iv.lo_closed || iv.hi_closed) {
        return Err(Error::invalid("open set", "components must be open intervals"));
    }
    Ok(())
}

/// Exact check of `φ_i(O) ⊆ O` and `φ_i(O) ∩ φ_j(O) = ∅` for `i ≠ j`.
pub fn check_feasible(ifs: &Ifs, set: &IntervalSet) -> Result<FeasibilityReport> {
    require_open(set)?;
    if set.is_empty() {
        return Err(Error::invalid("open set", "must be nonempty"));
    }
    let images: Vec<IntervalSet> = ifs.maps().iter().map(|m| m.affine().image_set(set)).collect();
    let containment_failures = images
        .iter()
        .enumerate()
        .filter(|(_, img)| !img.is_subset(set))
        .map(|(i, _)| i as u32)
        .collect::<Vec<_>>();
    let overlaps = pairwise_overlaps(&images);
    Ok(FeasibilityReport {
        feasible: containment_failures.is_empty() && overlaps.is_empty(),
        containment_failures,
        overlaps,
    })
}

fn pairwise_overlaps(images: &[IntervalSet]) -> Vec<OverlapWitness> {
    let mut out = Vec::new();
    for i in 0..images.len() {
        for j in i + 1..images.len() {
            let intersection = images[i].intersect(&images[j]);
            if !intersection.is_empty() {
                out.push(OverlapWitness { i: i as u32, j: j as u32, intersection });
            }
        }
    }
    out
}

/// Smallest `m <= max_m` with `Φ^m I` feasible. Containment always holds,
/// so only disjointness is tested.
pub fn find_feasible_convex_iterate(ifs: &Ifs, max_m: usize) -> Option<usize> {
    let mut set = IntervalSet::single(ifs.hull_interior());
    for m in 0..=max_m {
        if pairwise_overlaps(&images_of(ifs, &set)).is_empty() {
            return Some(m);
        }
        set = ifs.apply_all(&set);
    }
    None
}

fn images_of(ifs: &Ifs, set: &IntervalSet) -> Vec<IntervalSet> {
    ifs.maps().iter().map(|m| m.affine().image_set(set)).collect()
}

/// `B_Λ = ⋃_{u ∈ Λ} φ_u(I)`.
pub fn base_set(ifs: &Ifs, lambda: &[Word]) -> IntervalSet {
    let interior = ifs.hull_interior();
    IntervalSet::from_intervals(lambda.iter().map(|u| ifs.word_map(u).image(&interior)))
}

/// Outer supersets `A_0 = B ∪ ΦI`, `A_n = B ∪ Φ(A_{n-1})` of `U_Λ`.
fn outer_sets<'a>(ifs: &'a Ifs, b: &IntervalSet, depth: usize) -> impl Iterator<Item = IntervalSet> + 'a {
    let first = b.union(&ifs.apply_all(&IntervalSet::single(ifs.hull_interior())));
    let b = b.clone();
    std::iter::successors(Some(first), move |prev| Some(b.union(&ifs.apply_all(prev)))).take(depth + 1)
}

/// True when `φ_i(A_depth) ∩ φ_j(A_depth) = ∅` for all `i ≠ j`.
pub fn verify_u_lambda(ifs: &Ifs, lambda: &[Word], depth: usize) -> bool {
    if lambda.is_empty() || lambda.iter().any(|w| ifs.check_word(w).is_err()) {
        return false;
    }
    let b = base_set(ifs, lambda);
    outer_sets(ifs, &b, depth)
        .last()
        .is_some_and(|a| pairwise_overlaps(&images_of(ifs, &a)).is_empty())
}

/// Searches `Λ = κΣ^k` with `|κ| + k = m <= max_m`, `κ` by length then
/// lexicographically, and certifies the first candidate whose outer
/// superset has disjoint images at some depth `<= max_depth`.
///
/// Since `A_n ⊇ Φ^{n+1} I`, no candidate can pass at depth `n` unless
/// `Φ^{n+1} I` is itself feasible; this is checked first.
pub fn construct_u_lambda(ifs: &Ifs, max_m: usize, max_depth: usize) -> Option<ULambdaCertificate> {
    let first_usable = find_feasible_convex_iterate(ifs, max_depth + 1)?;
    let min_depth = first_usable.saturating_sub(1);
    let n = ifs.len();
    for m in 0..=max_m {
        for kappa_len in 0..=m {
            let k = m - kappa_len;
            let tails = Word::all_of_length(n, k);
            for kappa in Word::all_of_length(n, kappa_len) {
                let lambda: Vec<Word> = tails.iter().map(|t| kappa.concat(t)).collect();
                if let Some(depth) = certify_candidate(ifs, &lambda, min_depth, max_depth) {
                    return Some(ULambdaCertificate { m, kappa, k, lambda, depth });
                }
            }
        }
    }
    None
}

fn certify_candidate(ifs: &Ifs, lambda: &[Word], min_depth: usize, max_depth: usize) -> Option<usize> {
    let b = base_set(ifs, lambda);
    // inner approximations U_n ⊆ U_Λ must keep disjoint images
    let mut inner = b.clone();
    for (depth, outer) in outer_sets(ifs, &b, max_depth).enumerate() {
        if !pairwise_overlaps(&images_of(ifs, &inner)).is_empty() {
            return None;
        }
        if depth >= min_depth && pairwise_overlaps(&images_of(ifs, &outer)).is_empty() {
            return Some(depth);
        }
        inner = b.union(&ifs.apply_all(&inner));
    }
    None
}

/// Exact membership of a point outside `F` in `U_Λ` (`None` if the
/// recursion cap is hit, which only happens for points of `F`).
fn in_u(ifs: &Ifs, b: &IntervalSet, x: &Rational, budget: usize) -> Option<bool> {
    if b.contains(x) {
        return Some(true);
    }
    in_phi_u(ifs, b, x, budget)
}

/// Membership in `ΦU_Λ`: some `φ_i^{-1}(x)` lies in `U_Λ`.
fn in_phi_u(ifs: &Ifs, b: &IntervalSet, x: &Rational, budget: usize) -> Option<bool> {
    if budget == 0 {
        return None;
    }
    let interior = ifs.hull_interior();
    let mut unknown = false;
    for m in ifs.maps() {
        let y = m.affine().inverse().apply(x);
        if !interior.contains(&y) {
            continue;
        }
        match in_u(ifs, b, &y, budget - 1) {
            Some(true) => return Some(true),
            Some(false) => {}
            None => unknown = true,
        }
    }
    if unknown {
        None
    } else {
        Some(false)
    }
}

/// `Γ`, the components `G_j` of `G = O \ cl(ΦO)` and `g = max diam(G_j)/2`.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorData {
    /// `O \ ΦO` when it is a finite union; otherwise the union of the
    /// discovered components
    pub gamma: IntervalSet,
    pub components: Vec<Interval>,
    /// `diam(G_j)`, descending
    pub lengths: Vec<Rational>,
    pub g: Rational,
    pub lambda_gamma: Enclosure,
    /// the component list is known to be complete
    pub complete: bool,
    /// every undiscovered component is at most this long
    pub resolution: Option<Rational>,
}

impl GeneratorData {
    /// Generator data from an explicit list of gap lengths, for synthetic
    /// checks of the criterion machinery.
    pub fn from_lengths(lengths: &[Rational]) -> Result<Self> {
        let mut lengths = lengths.to_vec();
        if lengths.iter().any(|d| !d.is_positive()) {
            return Err(Error::invalid("lengths", "gap lengths must be positive"));
        }
        lengths.sort_by(|a, b| b.cmp(a));
        let g = lengths.first().cloned().ok_or(Error::NullGenerator)? / int(2);
        let total: Rational = lengths.iter().fold(Rational::zero(), |a, d| a + d);
        let mut lo = Rational::zero();
        let components = lengths
            .iter()
            .map(|d| {
                let iv = Interval::open(lo.clone(), &lo + d);
                lo = &lo + d + int(1);
                iv
            })
            .collect::<Vec<_>>();
        Ok(GeneratorData {
            gamma: IntervalSet::from_intervals(components.clone()),
            components,
            lengths,
            g,
            lambda_gamma: Enclosure::point(total),
            complete: true,
            resolution: None,
        })
    }
}

/// Generator data of a certified feasible open set. `resolution` bounds
/// the smallest component searched for `U_Λ`; it is ignored for finite
/// unions, where everything is exact.
pub fn generator_data(ifs: &Ifs, open: &OpenSetRep, resolution: &Rational) -> Result<GeneratorData> {
    if !open.feasible {
        return Err(Error::Uncertified);
    }
    let data = match &open.kind {
        OpenSetKind::FiniteUnion(set) => finite_union_data(ifs, set)?,
        OpenSetKind::ULambda { lambda, depth, .. } => u_lambda_data(ifs, lambda, *depth, resolution)?,
    };
    if data.g.is_zero() {
        return Err(Error::NullGenerator);
    }
    Ok(data)
}

fn finite_union_data(ifs: &Ifs, set: &IntervalSet) -> Result<GeneratorData> {
    let phi = ifs.apply_all(set);
    let gamma = set.subtract(&phi);
    let core = set.subtract(&phi.closure());
    let components: Vec<Interval> = core.intervals().to_vec();
    let mut lengths: Vec<Rational> = components.iter().map(Interval::length).collect();
    lengths.sort_by(|a, b| b.cmp(a));
    let g = lengths.first().map(|d| d / int(2)).unwrap_or_else(Rational::zero);
    if let Some(min) = lengths.last() {
        // every component must be a gap of F
        let gaps = gaps_at_least(ifs, min, min, false)?;
        let all_gaps = components
            .iter()
            .all(|c| gaps.iter().any(|gap| gap.interval.lo == c.lo && gap.interval.hi == c.hi));
        if !all_gaps {
            return Err(Error::invalid("open set", "a component of O \\ cl(ΦO) is not a gap of the attractor"));
        }
    }
    Ok(GeneratorData {
        lambda_gamma: Enclosure::point(gamma.measure()),
        gamma,
        components,
        lengths,
        g,
        complete: true,
        resolution: None,
    })
}

fn u_lambda_data(ifs: &Ifs, lambda: &[Word], depth: usize, resolution: &Rational) -> Result<GeneratorData> {
    if !resolution.is_positive() {
        return Err(Error::NonPositive("resolution"));
    }
    let b = base_set(ifs, lambda);
    let mut components = Vec::new();
    for gap in gaps_at_least(ifs, resolution, resolution, false)? {
        let mid = gap.interval.midpoint();
        let inside = in_u(ifs, &b, &mid, MEMBERSHIP_DEPTH).ok_or(Error::Uncertified)?;
        if inside && !in_phi_u(ifs, &b, &mid, MEMBERSHIP_DEPTH).ok_or(Error::Uncertified)? {
            components.push(gap.interval);
        }
    }
    components.sort_by(|a, c| a.lo.cmp(&c.lo));
    let mut lengths: Vec<Rational> = components.iter().map(Interval::length).collect();
    lengths.sort_by(|a, c| c.cmp(a));
    let discovered: Rational = lengths.iter().fold(Rational::zero(), |a, d| a + d);
    let complete = u_lambda_complete(ifs, lambda, &b, resolution)?;
    let lambda_gamma = if complete {
        Enclosure::point(discovered)
    } else {
        // λ(Γ) = λ(U)(1 - Σr) and U ⊆ A_depth
        let outer = outer_sets(ifs, &b, depth).last().expect("depth + 1 sets");
        let upper = outer.measure() * (Rational::one() - ifs.ratio_sum());
        Enclosure::new(discovered.clone(), upper.max(discovered))
    };
    let g = lengths.first().map(|d| d / int(2)).unwrap_or_else(Rational::zero);
    Ok(GeneratorData {
        gamma: IntervalSet::from_intervals(components.clone()),
        components,
        lengths,
        g,
        lambda_gamma,
        complete,
        resolution: if complete { None } else { Some(resolution.clone()) },
    })
}

/// Every undiscovered component of `G` would sit inside a cover piece
/// `φ_w(Ī)` meeting `B_Λ`. Such a piece lies in `cl(ΦU_Λ)`, and so hosts
/// none, when `w = i·w'` with some `u ∈ Λ` a factor of `w'`.
fn u_lambda_complete(ifs: &Ifs, lambda: &[Word], b: &IntervalSet, resolution: &Rational) -> Result<bool> {
    for piece in ifs.cover_pieces(resolution)? {
        let open_piece = IntervalSet::open(piece.lo.clone(), piece.hi.clone());
        if !open_piece.meets(b) {
            continue;
        }
        let letters = piece.word.letters();
        if letters.is_empty() {
            return Ok(false);
        }
        let rest = &letters[1..];
        let covered = lambda.iter().any(|u| {
            let u = u.letters();
            u.is_empty() || rest.windows(u.len()).any(|w| w == u)
        });
        if !covered {
            return Ok(false);
        }
    }
    Ok(true)
}
