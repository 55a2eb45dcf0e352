//! The criterion function against an independent summation of its defining
//! series, plus continuity, covariance and positivity checks.

use num_traits::Signed;

use selfsim::ifs::{lattice_classify, moran_dimension};
use selfsim::measurability::verdict::find_open_set;
use selfsim::measurability::{amplitude_of, p_extrema, p_function, verdict, PiecewisePower, Status, VerdictOptions};
use selfsim::numerics::rational::{int, pow_int, rat, to_f64};
use selfsim::openset::{convex_iterate, find_feasible_convex_iterate, generator_data, OpenSetRep};
use selfsim::{Enclosure, Ifs, Interval, IntervalSet, Rational, Similarity};

fn system(maps: &[(i32, Rational, Rational)]) -> Ifs {
    Ifs::new(maps.iter().map(|(s, r, t)| Similarity::with_sign(*s, r.clone(), t.clone()).unwrap()).collect()).unwrap()
}

fn samples() -> Vec<(&'static str, Ifs)> {
    vec![
        ("cantor", system(&[(1, rat(1, 3), int(0)), (1, rat(1, 3), rat(2, 3))])),
        ("thirds", system(&[(1, rat(1, 3), int(0)), (1, rat(1, 3), rat(1, 3))])),
        ("quarters", system(&[(1, rat(1, 4), int(0)), (1, rat(1, 4), rat(3, 4))])),
        ("mixed", system(&[(1, rat(1, 3), int(0)), (1, rat(1, 9), rat(1, 2)), (1, rat(1, 3), rat(2, 3))])),
        ("flipped", system(&[(1, rat(1, 2), int(0)), (-1, rat(1, 4), int(1))])),
        ("uneven", system(&[(1, rat(1, 4), int(0)), (1, rat(1, 2), rat(1, 2))])),
    ]
}

fn opts() -> VerdictOptions {
    VerdictOptions { dimension_width: rat(1, 1 << 50), ..VerdictOptions::default() }
}

struct Instance {
    ifs: Ifs,
    open: IntervalSet,
    pp: PiecewisePower,
}

fn instance(ifs: Ifs) -> Instance {
    let m = find_feasible_convex_iterate(&ifs, 3).expect("feasible convex iterate");
    let open = convex_iterate(&ifs, m);
    let rep = OpenSetRep::finite_union(&ifs, open.clone()).unwrap();
    let gen = generator_data(&ifs, &rep, &rat(1, 1000)).unwrap();
    let dim = moran_dimension(&ifs, &opts().dimension_width);
    let pp = p_function(&gen, &dim, &lattice_classify(&ifs).unwrap()).unwrap();
    Instance { ifs, open, pp }
}

/// `O \ cl(ΦO)` built directly from set operations.
fn gamma(ifs: &Ifs, open: &IntervalSet) -> IntervalSet {
    let image = ifs.apply_all(open);
    let closed = IntervalSet::from_intervals(image.intervals().iter().map(Interval::closure));
    open.subtract(&closed)
}

/// Root of `Σ r_i^s = 1` in doubles.
fn dimension_f64(ifs: &Ifs) -> f64 {
    let ratios: Vec<f64> = ifs.ratios().iter().map(to_f64).collect();
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if ratios.iter().map(|r| r.powf(mid)).sum::<f64>() > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `ε^{D-1}[λ(Γ)/(r^{D-1}-1) + Σ_{ℓ<terms} r^{ℓ(D-1)} Σ_j min(2r^ℓε, d_j)]`.
fn series(eps: f64, d: f64, r: f64, lambda_gamma: f64, lengths: &[f64], terms: usize) -> f64 {
    let mut sum = lambda_gamma / (r.powf(d - 1.0) - 1.0);
    for l in 0..terms {
        let t = r.powi(l as i32) * eps;
        let inner: f64 = lengths.iter().map(|&len| (2.0 * t).min(len)).sum();
        sum += r.powf(l as f64 * (d - 1.0)) * inner;
    }
    eps.powf(d - 1.0) * sum
}

#[test]
fn closed_form_matches_the_series() {
    for (name, ifs) in samples() {
        let inst = instance(ifs);
        let g = gamma(&inst.ifs, &inst.open);
        let lengths: Vec<f64> = g.intervals().iter().map(|c| to_f64(&c.length())).collect();
        let d = dimension_f64(&inst.ifs);
        let r = to_f64(lattice_classify(&inst.ifs).unwrap().base().unwrap());
        let lg = to_f64(&g.measure());
        let (lo, hi) = (inst.pp.lo.clone(), inst.pp.hi.clone());
        let n = 1000;
        for k in 1..=n {
            let eps = &lo + (&hi - &lo) * rat(k, n);
            let v = inst.pp.eval(&eps).unwrap();
            let want = series(to_f64(&eps), d, r, lg, &lengths, 200);
            let slack = 1e-9 + to_f64(&v.width());
            assert!((v.mid_f64() - want).abs() <= slack, "{name} at {eps}: {} vs {want}", v.mid_f64());
        }
    }
}

/// The series uses `λ(F_t ∩ G_j) = min(2t, d_j)`; check that against the
/// exact parallel set for the first few levels.
#[test]
fn gap_terms_match_exact_parallel_sets() {
    for (name, ifs) in samples() {
        let inst = instance(ifs);
        let g = gamma(&inst.ifs, &inst.open);
        let base = lattice_classify(&inst.ifs).unwrap().base().unwrap().clone();
        let (lo, hi) = (inst.pp.lo.clone(), inst.pp.hi.clone());
        for k in [1, 3, 5, 7, 8] {
            let eps = &lo + (&hi - &lo) * rat(k, 8);
            for l in 0..4 {
                let t = &eps * pow_int(&base, l);
                let f_t = inst.ifs.cover(&(&t * int(2))).unwrap().inflate(&t).unwrap();
                let direct = f_t.intersect(&g).measure();
                let formula: Rational = g
                    .intervals()
                    .iter()
                    .map(|c| if &t * int(2) <= c.length() { &t * int(2) } else { c.length() })
                    .sum();
                assert_eq!(direct, formula, "{name} at t = {t}");
            }
        }
    }
}

#[test]
fn wraps_around_continuously() {
    for (name, ifs) in samples() {
        let inst = instance(ifs);
        let at_g = inst.pp.eval(&inst.pp.hi).unwrap();
        let below = inst.pp.left_limit().unwrap();
        let slack = (at_g.width() + below.width()) * int(2);
        let gap = (at_g.mid() - below.mid()).abs();
        assert!(gap <= slack, "{name}: {gap} > {slack}");
    }
}

#[test]
fn cantor_wrap_is_the_algebraic_identity() {
    // 18^{1-D}·(8/9) = 6^{1-D}·(4/3) because 3^{1-D} = 3/2
    let inst = instance(samples().remove(0).1);
    assert_eq!(inst.pp.pieces.len(), 1);
    let piece = &inst.pp.pieces[0];
    let left = inst.pp.eval_piece(piece, &rat(1, 18)).unwrap();
    let right = inst.pp.eval(&rat(1, 6)).unwrap();
    assert!(left.overlaps(&right));
    let d = 2f64.ln() / 3f64.ln();
    assert!(right.near_f64(6f64.powf(1.0 - d) * 4.0 / 3.0, 1e-14));
}

/// Conjugating by `x ↦ cx + d` scales lengths by `c` and `p(cε)` by `c^D`.
#[test]
fn amplitude_scales_under_conjugation() {
    for (name, ifs) in samples() {
        let base_amp = amplitude_of(&p_extrema(&instance(ifs.clone()).pp).unwrap());
        for (c, d) in [(rat(2, 1), rat(1, 3)), (rat(3, 7), rat(-5, 2)), (rat(10, 1), int(0))] {
            let conj = Ifs::new(
                ifs.maps()
                    .iter()
                    .map(|m| {
                        let t = &c * &m.translation + &d - &m.affine().scale * &d;
                        Similarity::with_sign(m.sign(), m.ratio.clone(), t).unwrap()
                    })
                    .collect(),
            )
            .unwrap();
            let scaled = instance(conj.clone());
            let amp = amplitude_of(&p_extrema(&scaled.pp).unwrap());
            let factor = Enclosure::point(c.clone()).pow(&scaled.pp.dimension, 96).unwrap();
            let expected = &base_amp * &factor;
            assert!(amp.overlaps(&expected), "{name} c = {c}: {amp:?} vs {expected:?}");
            assert_eq!(verdict(&conj, &opts()).unwrap().status, verdict(&ifs, &opts()).unwrap().status);
        }
    }
}

#[test]
fn certified_lattice_amplitudes_are_positive() {
    for (name, ifs) in samples() {
        let v = verdict(&ifs, &opts()).unwrap();
        assert_eq!(v.status, Status::NotMeasurableLattice, "{name}");
        let amp = v.amplitude.expect("amplitude");
        assert!(amp.lo().is_positive(), "{name}");
        assert!(find_open_set(&ifs, &opts()).unwrap().is_some());
    }
}

#[test]
fn extrema_are_attained_values() {
    for (name, ifs) in samples() {
        let inst = instance(ifs);
        let ex = p_extrema(&inst.pp).unwrap();
        let at_max = inst.pp.eval(&ex.argmax).unwrap();
        assert!(at_max.overlaps(&ex.max), "{name}");
        let (lo, hi) = (inst.pp.lo.clone(), inst.pp.hi.clone());
        for k in 1..=64 {
            let v = inst.pp.eval(&(&lo + (&hi - &lo) * rat(k, 64))).unwrap();
            assert!(v.hi() >= ex.min.lo() && v.lo() <= ex.max.hi(), "{name}");
        }
    }
}
