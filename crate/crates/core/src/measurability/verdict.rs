//! Measurability verdict: lattice systems with `D < 1` are not Minkowski
//! measurable, nonlattice ones are, and `D = 1` gives a measurable set.

use num_traits::{One, Signed};

use super::pfunction::{amplitude_of, p_extrema, p_function, Extrema};
use crate::digit::{osc_mod_check, DigitSystem};
use crate::error::Result;
use crate::gaps::rescaled_volume_samples;
use crate::ifs::dimension::{default_width, moran_dimension, DimensionEnclosure};
use crate::ifs::lattice::{lattice_classify, LatticeClass};
use crate::ifs::Ifs;
use crate::numerics::rational::two_pow;
use crate::numerics::{Enclosure, IntervalSet, Rational};
use crate::openset::{
    construct_u_lambda, convex_iterate, find_feasible_convex_iterate, generator_data, OpenSetRep, ULambdaCertificate,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    NotMeasurableLattice,
    MeasurableNonlattice,
    MeasurableTrivial,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OscEvidence {
    ConvexIterate(usize),
    ULambda(ULambdaCertificate),
    /// integral digit system with digits distinct mod `A`
    DigitResidues,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OscStatus {
    Certified(OscEvidence),
    Assumed,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerdictOptions {
    pub dimension_width: Rational,
    pub max_convex_m: usize,
    pub max_lambda_m: usize,
    pub max_verify_depth: usize,
    /// smallest component length searched for `U_Λ` generator data
    pub resolution: Rational,
    /// stop the `D = 1` content iteration once successive values differ by less
    pub content_tolerance: Rational,
    pub content_max_iterations: usize,
    /// exponents `k` of the sample grid `ε = |I|·2^{-k}` for the nonlattice estimate
    pub estimate_levels: std::ops::RangeInclusive<i64>,
}

impl Default for VerdictOptions {
    fn default() -> Self {
        VerdictOptions {
            dimension_width: default_width(),
            max_convex_m: 6,
            max_lambda_m: 3,
            max_verify_depth: 6,
            resolution: Rational::new(1.into(), 10_000.into()),
            content_tolerance: Rational::new(1.into(), 1_000_000_000.into()),
            content_max_iterations: 40,
            estimate_levels: 6..=14,
        }
    }
}

/// Limit of cover measures for `D = 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContentLimit {
    pub value: Rational,
    pub iterations: usize,
    pub converged: bool,
}

/// Mean of `ε^{D-1} λ(F_ε)` over a geometric grid. Not a certified value.
#[derive(Clone, Debug, PartialEq)]
pub struct EmpiricalEstimate {
    pub mean: f64,
    pub samples: Vec<(Rational, Enclosure)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Verdict {
    pub status: Status,
    pub dimension: DimensionEnclosure,
    pub lattice: LatticeClass,
    pub osc: OscStatus,
    pub open_set: Option<OpenSetRep>,
    pub extrema: Option<Extrema>,
    pub amplitude: Option<Enclosure>,
    /// why the amplitude witness is missing, when it is
    pub amplitude_note: Option<String>,
    pub content: Option<ContentLimit>,
    pub empirical_content: Option<EmpiricalEstimate>,
    pub reason: Option<String>,
}

impl Verdict {
    fn new(status: Status, dimension: DimensionEnclosure, lattice: LatticeClass, osc: OscStatus) -> Self {
        Verdict {
            status,
            dimension,
            lattice,
            osc,
            open_set: None,
            extrema: None,
            amplitude: None,
            amplitude_note: None,
            content: None,
            empirical_content: None,
            reason: None,
        }
    }
}

/// Searches a certified feasible open set: convex iterates first, then
/// `U_Λ` families.
pub fn find_open_set(ifs: &Ifs, opts: &VerdictOptions) -> Result<Option<(OpenSetRep, OscEvidence)>> {
    if let Some(m) = find_feasible_convex_iterate(ifs, opts.max_convex_m) {
        let rep = OpenSetRep::finite_union(ifs, convex_iterate(ifs, m))?;
        return Ok(Some((rep, OscEvidence::ConvexIterate(m))));
    }
    if let Some(cert) = construct_u_lambda(ifs, opts.max_lambda_m, opts.max_verify_depth) {
        let rep = OpenSetRep::u_lambda(ifs, &cert)?;
        return Ok(Some((rep, OscEvidence::ULambda(cert))));
    }
    Ok(None)
}

fn digit_osc(ifs: &Ifs) -> bool {
    DigitSystem::from_ifs(ifs).is_some_and(|ds| osc_mod_check(&ds).unwrap_or(false))
}

pub fn verdict(ifs: &Ifs, opts: &VerdictOptions) -> Result<Verdict> {
    let dimension = moran_dimension(ifs, &opts.dimension_width);
    let lattice = lattice_classify(ifs)?;
    let sum = ifs.ratio_sum();

    if sum > Rational::one() {
        let mut v = Verdict::new(Status::Inconclusive, dimension, lattice, OscStatus::Assumed);
        v.reason = Some("ratio sum exceeds 1, so the open set condition cannot hold".into());
        return Ok(v);
    }

    let found = find_open_set(ifs, opts)?;
    let osc = match &found {
        Some((_, evidence)) => OscStatus::Certified(evidence.clone()),
        None if digit_osc(ifs) => OscStatus::Certified(OscEvidence::DigitResidues),
        None => OscStatus::Assumed,
    };

    if dimension.is_exactly_one() {
        let mut v = Verdict::new(Status::MeasurableTrivial, dimension, lattice, osc);
        v.content = Some(content_limit(ifs, opts)?);
        v.open_set = found.map(|(rep, _)| rep);
        return Ok(v);
    }

    match lattice.clone() {
        LatticeClass::Nonlattice => {
            let mut v = Verdict::new(Status::MeasurableNonlattice, dimension, lattice, osc);
            v.empirical_content = Some(empirical_estimate(ifs, &v.dimension, opts)?);
            v.open_set = found.map(|(rep, _)| rep);
            Ok(v)
        }
        LatticeClass::Unknown => {
            let mut v = Verdict::new(Status::Inconclusive, dimension, lattice, osc);
            v.reason = Some("lattice class unknown".into());
            Ok(v)
        }
        LatticeClass::Lattice { .. } => lattice_verdict(ifs, dimension, lattice, osc, found, opts),
    }
}

fn lattice_verdict(
    ifs: &Ifs,
    dimension: DimensionEnclosure,
    lattice: LatticeClass,
    osc: OscStatus,
    found: Option<(OpenSetRep, OscEvidence)>,
    opts: &VerdictOptions,
) -> Result<Verdict> {
    let mut v = Verdict::new(Status::NotMeasurableLattice, dimension, lattice, osc);
    let Some((rep, _)) = found else {
        v.amplitude_note = Some("no feasible open set found within the search caps".into());
        return Ok(v);
    };
    let gen = generator_data(ifs, &rep, &opts.resolution)?;
    v.open_set = Some(rep);
    if !gen.complete {
        v.amplitude_note = Some("generator component list is infinite; p cannot be bounded".into());
        return Ok(v);
    }
    let pp = p_function(&gen, &v.dimension, &v.lattice)?;
    let ex = p_extrema(&pp)?;
    let amp = amplitude_of(&ex);
    if !amp.lo().is_positive() {
        v.status = Status::Inconclusive;
        v.reason = Some("amplitude lower bound is not positive at this precision".into());
    }
    v.extrema = Some(ex);
    v.amplitude = Some(amp);
    Ok(v)
}

/// `lim_n λ(cover(|I|·2^{-n}))`, a nonincreasing sequence.
pub fn content_limit(ifs: &Ifs, opts: &VerdictOptions) -> Result<ContentLimit> {
    let len = ifs.hull_length();
    let mut prev = ifs.cover(&len)?.measure();
    for n in 1..=opts.content_max_iterations {
        let delta = &len * two_pow(-(n as i64));
        let value = ifs.cover(&delta)?.measure();
        if (&prev - &value).abs() < opts.content_tolerance {
            return Ok(ContentLimit { value, iterations: n, converged: true });
        }
        prev = value;
    }
    Ok(ContentLimit { value: prev, iterations: opts.content_max_iterations, converged: false })
}

fn empirical_estimate(ifs: &Ifs, dim: &DimensionEnclosure, opts: &VerdictOptions) -> Result<EmpiricalEstimate> {
    let len = ifs.hull_length();
    let eps: Vec<Rational> = opts.estimate_levels.clone().map(|k| &len * two_pow(-k)).collect();
    let samples = rescaled_volume_samples(ifs, &eps, &dim.value, 64)?;
    let mean = samples.iter().map(|(_, e)| e.mid_f64()).sum::<f64>() / samples.len().max(1) as f64;
    Ok(EmpiricalEstimate { mean, samples })
}

/// Generator data, criterion function and amplitude for an explicit open
/// set, bypassing the search.
pub fn amplitude_for(ifs: &Ifs, open: &IntervalSet, opts: &VerdictOptions) -> Result<Enclosure> {
    let rep = OpenSetRep::finite_union(ifs, open.clone())?;
    let gen = generator_data(ifs, &rep, &opts.resolution)?;
    let dim = moran_dimension(ifs, &opts.dimension_width);
    let pp = p_function(&gen, &dim, &lattice_classify(ifs)?)?;
    Ok(amplitude_of(&p_extrema(&pp)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rational::{int, rat};

    fn quick() -> VerdictOptions {
        VerdictOptions { dimension_width: rat(1, 1 << 40), ..VerdictOptions::default() }
    }

    #[test]
    fn cantor_is_not_measurable() {
        let ifs = Ifs::from_pairs(&[(rat(1, 3), int(0)), (rat(1, 3), rat(2, 3))]).unwrap();
        let v = verdict(&ifs, &quick()).unwrap();
        assert_eq!(v.status, Status::NotMeasurableLattice);
        assert_eq!(v.lattice.base(), Some(&rat(1, 3)));
        assert_eq!(v.osc, OscStatus::Certified(OscEvidence::ConvexIterate(0)));
        let amp = v.amplitude.unwrap();
        assert!(amp.lo().is_positive());
        assert!((amp.mid_f64() - 0.0880648).abs() < 1e-7);
    }

    #[test]
    fn unit_interval_is_trivial() {
        let ifs = Ifs::from_pairs(&[(rat(1, 2), int(0)), (rat(1, 2), rat(1, 2))]).unwrap();
        let v = verdict(&ifs, &quick()).unwrap();
        assert_eq!(v.status, Status::MeasurableTrivial);
        let c = v.content.unwrap();
        assert_eq!(c.value, int(1));
        assert!(c.converged);
    }

    #[test]
    fn nonlattice_is_measurable() {
        let ifs = Ifs::from_pairs(&[(rat(1, 2), int(0)), (rat(1, 3), rat(2, 3))]).unwrap();
        let v = verdict(&ifs, &quick()).unwrap();
        assert_eq!(v.status, Status::MeasurableNonlattice);
        let est = v.empirical_content.unwrap();
        assert!(est.mean > 0.0);
        assert!(v.amplitude.is_none());
    }

    #[test]
    fn example_has_no_amplitude_witness() {
        let ifs = crate::digit::example_system();
        let opts = VerdictOptions { max_convex_m: 3, max_lambda_m: 1, max_verify_depth: 2, ..quick() };
        let v = verdict(&ifs, &opts).unwrap();
        assert_eq!(v.status, Status::NotMeasurableLattice);
        assert_eq!(v.osc, OscStatus::Certified(OscEvidence::DigitResidues));
        assert!(v.amplitude.is_none());
        assert!(v.amplitude_note.is_some());
    }

    #[test]
    fn overlapping_ratios_are_inconclusive() {
        let ifs = Ifs::from_pairs(&[(rat(2, 3), int(0)), (rat(2, 3), rat(1, 3))]).unwrap();
        assert_eq!(verdict(&ifs, &quick()).unwrap().status, Status::Inconclusive);
    }

    #[test]
    fn explicit_open_set_amplitude() {
        let ifs = Ifs::from_pairs(&[(rat(1, 3), int(0)), (rat(1, 3), rat(1, 3))]).unwrap();
        let amp = amplitude_for(&ifs, &IntervalSet::open(int(0), rat(1, 2)), &quick()).unwrap();
        assert!(amp.lo().is_positive());
    }
}
