//! The criterion function `p` on `(rg, g]` in closed piecewise-power form.
//!
//! For a gap of length `d` and `ε` with threshold index `L` (the least `ℓ`
//! with `2r^ℓε <= d`), the series `Σ_ℓ r^{ℓ(D-1)} min(2r^ℓε, d)` splits into
//! `d·Σ_{ℓ<L} r^{ℓ(D-1)}` and `2ε·r^{LD}/(1 - r^D)`. Summing over gaps gives
//! `p(ε) = A·ε^{D-1} + B·ε^D` on every interval where all `L` are constant.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::ifs::dimension::DimensionEnclosure;
use crate::ifs::lattice::LatticeClass;
use crate::numerics::rational::int;
use crate::numerics::{Enclosure, Rational};
use crate::openset::GeneratorData;

/// `p(ε) = a·ε^{D-1} + b·ε^D` for `lo < ε <= hi`.
#[derive(Clone, Debug, PartialEq)]
pub struct Piece {
    pub lo: Rational,
    pub hi: Rational,
    pub a: Enclosure,
    pub b: Enclosure,
    /// threshold index `L_j` for each gap, in gap order
    pub thresholds: Vec<u32>,
}

/// A point `d_j / (2r^ℓ)` where `L_j` jumps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Breakpoint {
    pub at: Rational,
    pub gap: usize,
    pub level: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PiecewisePower {
    /// open left end `rg`
    pub lo: Rational,
    /// closed right end `g`
    pub hi: Rational,
    pub dimension: Enclosure,
    pub pieces: Vec<Piece>,
    pub breakpoints: Vec<Breakpoint>,
    /// additive bound on the part of `p` not represented by the pieces
    pub tail: Rational,
    pub bits: u32,
}

impl PiecewisePower {
    /// Assembles a piecewise function from explicit pieces; used for
    /// synthetic inputs.
    pub fn from_pieces(dimension: Enclosure, pieces: Vec<Piece>, bits: u32) -> Result<Self> {
        let (Some(first), Some(last)) = (pieces.first(), pieces.last()) else {
            return Err(Error::invalid("pieces", "at least one piece is required"));
        };
        let contiguous = pieces.windows(2).all(|w| w[0].hi == w[1].lo) && pieces.iter().all(|p| p.lo < p.hi);
        if !contiguous {
            return Err(Error::invalid("pieces", "pieces must partition an interval"));
        }
        if pieces.iter().any(|p| p.a.lo().is_negative() || p.b.lo().is_negative()) {
            return Err(Error::invalid("pieces", "coefficients must be nonnegative"));
        }
        Ok(PiecewisePower {
            lo: first.lo.clone(),
            hi: last.hi.clone(),
            dimension,
            pieces,
            breakpoints: Vec::new(),
            tail: Rational::zero(),
            bits,
        })
    }

    pub fn piece_at(&self, eps: &Rational) -> Option<&Piece> {
        self.pieces.iter().find(|p| &p.lo < eps && eps <= &p.hi)
    }

    /// Enclosure of `p(eps)` for `rg < eps <= g`.
    pub fn eval(&self, eps: &Rational) -> Result<Enclosure> {
        let piece = self
            .piece_at(eps)
            .ok_or_else(|| Error::invalid("epsilon", format!("outside ({}, {}]", self.lo, self.hi)))?;
        let v = self.eval_piece(piece, eps)?;
        Ok(self.with_tail(v))
    }

    /// Value of the piece's formula at `eps` (also at its open left end,
    /// where it gives the one-sided limit).
    pub fn eval_piece(&self, piece: &Piece, eps: &Rational) -> Result<Enclosure> {
        let (lower, upper) = self.powers(eps)?;
        Ok((&piece.a * &lower + &piece.b * &upper).round(self.bits + 8))
    }

    /// `(ε^{D-1}, ε^D)`.
    fn powers(&self, eps: &Rational) -> Result<(Enclosure, Enclosure)> {
        let lower = Enclosure::point(eps.clone()).pow(&self.dimension.add_rational(&-int(1)), self.bits)?;
        let upper = lower.scale(eps);
        Ok((lower, upper))
    }

    fn with_tail(&self, v: Enclosure) -> Enclosure {
        if self.tail.is_zero() {
            v
        } else {
            Enclosure::new(v.lo().clone(), v.hi() + &self.tail)
        }
    }

    /// One-sided limit `lim_{ε↓rg} p(ε)`.
    pub fn left_limit(&self) -> Result<Enclosure> {
        let v = self.eval_piece(&self.pieces[0], &self.lo)?;
        Ok(self.with_tail(v))
    }
}

/// Constants derived from `r` and `D`.
struct Scales {
    /// `r^{D-1}`
    x: Enclosure,
    /// `r^D`
    y: Enclosure,
    bits: u32,
}

impl Scales {
    fn new(base: &Rational, dim: &Enclosure, bits: u32) -> Result<Self> {
        let ln_r = Enclosure::point(base.clone()).ln(bits + 16)?;
        let x = (&dim.add_rational(&-int(1)) * &ln_r).round(bits + 16).exp(bits + 8);
        let y = (dim * &ln_r).round(bits + 16).exp(bits + 8);
        Ok(Scales { x, y, bits })
    }

    /// `Σ_{ℓ<L} x^ℓ`
    fn geometric(&self, l: u32) -> Enclosure {
        let mut acc = Enclosure::zero();
        let mut power = Enclosure::one();
        for _ in 0..l {
            acc = &acc + &power;
            power = (&power * &self.x).round(self.bits + 16);
        }
        acc
    }
}

/// Least `ℓ` with `2 r^ℓ eps <= d`.
fn threshold(base: &Rational, eps: &Rational, d: &Rational) -> u32 {
    let mut t = eps * int(2);
    let mut l = 0;
    while &t > d {
        t *= base;
        l += 1;
    }
    l
}

fn require_inputs<'a>(gen: &GeneratorData, dim: &DimensionEnclosure, lat: &'a LatticeClass) -> Result<&'a Rational> {
    let base = lat.base().ok_or(Error::Nonlattice)?;
    if !dim.below_one() {
        return Err(Error::DimensionNotBelowOne);
    }
    if !gen.g.is_positive() {
        return Err(Error::NullGenerator);
    }
    Ok(base)
}

/// Exact piecewise form of `p` from a complete component list.
pub fn p_function(gen: &GeneratorData, dim: &DimensionEnclosure, lat: &LatticeClass) -> Result<PiecewisePower> {
    let base = require_inputs(gen, dim, lat)?;
    if !gen.complete {
        return Err(Error::IncompleteComponents);
    }
    build(gen, &dim.value, base, dim.bits())
}

/// `p` from a possibly truncated component list, with an additive bound
/// for the undiscovered components. Errors when that bound exceeds
/// `accuracy`.
///
/// Undiscovered components have length at most the resolution, but neither
/// their number nor a positive lower bound on their lengths is known, and
/// the per-component contribution grows like `diam^D·ε^{1-D}`. Without such
/// a bound the tail cannot be controlled, so a truncated list is rejected.
pub fn p_truncated(
    gen: &GeneratorData,
    dim: &DimensionEnclosure,
    lat: &LatticeClass,
    accuracy: &Rational,
) -> Result<PiecewisePower> {
    let base = require_inputs(gen, dim, lat)?;
    if !gen.complete {
        return Err(Error::TailBoundExceeded {
            bound: "unbounded (infinite component list)".into(),
            requested: accuracy.to_string(),
        });
    }
    build(gen, &dim.value, base, dim.bits())
}

fn build(gen: &GeneratorData, dim: &Enclosure, base: &Rational, bits: u32) -> Result<PiecewisePower> {
    let g = gen.g.clone();
    let rg = base * &g;
    let mut breakpoints = Vec::new();
    for (j, d) in gen.lengths.iter().enumerate() {
        let mut t = d / int(2);
        let mut level = 0;
        while t <= rg {
            t /= base;
            level += 1;
        }
        if t < g {
            breakpoints.push(Breakpoint { at: t, gap: j, level });
        }
    }
    breakpoints.sort_by(|a, b| a.at.cmp(&b.at).then(a.gap.cmp(&b.gap)));

    let mut cuts = vec![rg.clone()];
    for bp in &breakpoints {
        if cuts.last() != Some(&bp.at) {
            cuts.push(bp.at.clone());
        }
    }
    cuts.push(g.clone());

    let scales = Scales::new(base, dim, bits)?;
    let x_minus_one = scales.x.add_rational(&-Rational::one());
    let one_minus_y = -&scales.y.add_rational(&-Rational::one());
    let gamma_term = gen.lambda_gamma.div(&x_minus_one)?;
    let mut pieces = Vec::with_capacity(cuts.len() - 1);
    for w in cuts.windows(2) {
        let (lo, hi) = (&w[0], &w[1]);
        let thresholds: Vec<u32> = gen.lengths.iter().map(|d| threshold(base, hi, d)).collect();
        let mut a = gamma_term.clone();
        let mut b_sum = Enclosure::zero();
        for (d, &l) in gen.lengths.iter().zip(&thresholds) {
            a = &a + &scales.geometric(l).scale(d);
            b_sum = &b_sum + &scales.y.powi(l);
        }
        let b = b_sum.scale(&int(2)).div(&one_minus_y)?;
        pieces.push(Piece {
            lo: lo.clone(),
            hi: hi.clone(),
            a: a.round(bits + 16),
            b: b.round(bits + 16),
            thresholds,
        });
    }
    Ok(PiecewisePower {
        lo: rg,
        hi: g,
        dimension: dim.clone(),
        pieces,
        breakpoints,
        tail: Rational::zero(),
        bits,
    })
}

/// Global extrema of `p` over `(rg, g]` (supremum and infimum, attained or
/// approached at the open end).
#[derive(Clone, Debug, PartialEq)]
pub struct Extrema {
    pub min: Enclosure,
    pub max: Enclosure,
    /// location of the minimum (an enclosure when it is a critical point)
    pub argmin: Enclosure,
    pub argmax: Rational,
}

/// Closed-form extrema: on each piece `f' = ε^{D-2}(A(D-1) + BDε)`, so `f`
/// falls until `ε* = A(1-D)/(BD)` and rises after it; the maximum sits at an
/// end of a piece and the minimum at `ε*` or an end.
pub fn p_extrema(pp: &PiecewisePower) -> Result<Extrema> {
    let bits = pp.bits;
    let d = &pp.dimension;
    let one_minus_d = -&d.add_rational(&-Rational::one());
    let mut best_min: Option<(Enclosure, Enclosure)> = None;
    let mut best_max: Option<(Enclosure, Rational)> = None;

    let mut consider_min = |v: Enclosure, at: Enclosure| {
        best_min = Some(match best_min.take() {
            None => (v, at),
            Some((m, a)) => {
                if v.hi() < m.lo() {
                    (v, at)
                } else if m.hi() < v.lo() {
                    (m, a)
                } else {
                    // not separated: keep a sound enclosure of the minimum
                    let at = if v.mid() < m.mid() { at } else { a };
                    (v.min(&m), at)
                }
            }
        });
    };

    for piece in &pp.pieces {
        let at_lo = pp.eval_piece(piece, &piece.lo)?;
        let at_hi = pp.eval_piece(piece, &piece.hi)?;
        for (v, at) in [(&at_lo, &piece.lo), (&at_hi, &piece.hi)] {
            best_max = Some(match best_max.take() {
                None => (v.clone(), at.clone()),
                Some((m, a)) => {
                    if v.hi() < m.lo() {
                        (m, a)
                    } else if m.hi() < v.lo() {
                        (v.clone(), at.clone())
                    } else {
                        // not separated: prefer the larger, attained point
                        (m.max(v), at.clone())
                    }
                }
            });
        }
        consider_min(at_lo.clone(), Enclosure::point(piece.lo.clone()));
        consider_min(at_hi.clone(), Enclosure::point(piece.hi.clone()));

        let interior = piece.b.lo().is_positive() && one_minus_d.lo().is_positive() && piece.a.lo().is_positive();
        if !interior {
            continue;
        }
        let critical = (&piece.a * &one_minus_d).div(&(&piece.b * d))?.round(bits + 8);
        if critical.hi() <= &piece.lo || critical.lo() >= &piece.hi {
            continue;
        }
        // clamp to the piece; f is bounded below on [e1, e2] by
        // A·e2^{D-1} + B·e1^D and above by its value at any point
        let e1 = crate::numerics::rational::max_rat(critical.lo(), &piece.lo).clone();
        let e2 = crate::numerics::rational::min_rat(critical.hi(), &piece.hi).clone();
        let p1 = Enclosure::point(e1.clone());
        let p2 = Enclosure::point(e2.clone());
        let low = &piece.a * &p2.pow(&d.add_rational(&-int(1)), bits)? + &piece.b * &p1.pow(d, bits)?;
        let mid = (&e1 + &e2) / int(2);
        let probe = if mid > piece.lo { mid } else { e2.clone() };
        let high = pp.eval_piece(piece, &probe)?;
        let value = Enclosure::new(low.lo().clone(), high.hi().clone());
        consider_min(value, Enclosure::new(e1, e2));
    }
    let (min, argmin) = best_min.expect("at least one piece");
    let (max, argmax) = best_max.expect("at least one piece");
    let tail = &pp.tail;
    let widen = |e: Enclosure| if tail.is_zero() { e } else { Enclosure::new(e.lo().clone(), e.hi() + tail) };
    Ok(Extrema { min: widen(min), max: widen(max), argmin, argmax })
}

/// `max p − min p` with outward rounding, clamped at zero from below.
pub fn amplitude(pp: &PiecewisePower) -> Result<Enclosure> {
    let ex = p_extrema(pp)?;
    Ok(amplitude_of(&ex))
}

pub fn amplitude_of(ex: &Extrema) -> Enclosure {
    let lo = ex.max.lo() - ex.min.hi();
    let hi = ex.max.hi() - ex.min.lo();
    let zero = Rational::zero();
    Enclosure::new(if lo.is_negative() { zero } else { lo }, hi)
}
