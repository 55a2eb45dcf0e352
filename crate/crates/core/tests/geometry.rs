//! Properties of attractors, covers, gaps, parallel volumes and feasible
//! open sets over randomly generated systems.

use num_traits::{One, Zero};
use proptest::prelude::*;

use selfsim::gaps::{gaps_above, parallel_volume};
use selfsim::ifs::dimension::{moran_dimension, moran_sum};
use selfsim::ifs::{lattice_classify, HullEnd, LatticeClass};
use selfsim::measurability::pluriphase_check;
use selfsim::numerics::rational::{int, pow_int, rat};
use selfsim::openset::{check_feasible, convex_iterate, find_feasible_convex_iterate, generator_data, OpenSetRep};
use selfsim::{Enclosure, Ifs, IntervalSet, Rational, Similarity};

/// Two or three maps with ratio sum below 1, small denominators and
/// optional reflections.
fn system() -> impl Strategy<Value = Ifs> {
    let map = ((1i64..=2, 2i64..=6), 0i64..=12, any::<bool>());
    prop::collection::vec(map, 2..=3).prop_filter_map("needs a contraction system with a nondegenerate hull", |maps| {
        let sims: Vec<Similarity> = maps
            .iter()
            .filter(|((p, q), _, _)| p < q)
            .map(|&((p, q), t, flip)| Similarity::with_sign(if flip { -1 } else { 1 }, rat(p, q), rat(t, 12)).unwrap())
            .collect();
        if sims.len() != maps.len() {
            return None;
        }
        let ifs = Ifs::new(sims).ok()?;
        (ifs.ratio_sum() < Rational::one() && ifs.hull_length() > Rational::zero()).then_some(ifs)
    })
}

fn radius(ifs: &Ifs, k: i64) -> Rational {
    ifs.hull_length() * rat(k, 64)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn hull_is_invariant_and_certified(ifs in system()) {
        let (lo, hi) = ifs.hull();
        prop_assert!(ifs.hull_certificate(HullEnd::Left).verify(&ifs, lo));
        prop_assert!(ifs.hull_certificate(HullEnd::Right).verify(&ifs, hi));
        let hull = IntervalSet::closed(lo.clone(), hi.clone());
        let image = ifs.apply_all(&hull);
        prop_assert!(image.is_subset(&hull));
        prop_assert_eq!(image.span(), hull.span());
    }

    #[test]
    fn covers_nest_and_have_certified_ends(ifs in system(), k in 1i64..=16) {
        let coarse = radius(&ifs, 2 * k);
        let fine = radius(&ifs, k);
        let outer = ifs.cover(&coarse).unwrap();
        let inner = ifs.cover(&fine).unwrap();
        prop_assert!(inner.is_subset(&outer));
        for piece in ifs.cover_pieces(&fine).unwrap() {
            prop_assert!(&piece.hi - &piece.lo <= fine);
            prop_assert!(piece.cert_lo(&ifs).verify(&ifs, &piece.lo));
            prop_assert!(piece.cert_hi(&ifs).verify(&ifs, &piece.hi));
        }
    }

    #[test]
    fn moran_enclosure_brackets_the_root(ifs in system()) {
        let d = moran_dimension(&ifs, &rat(1, 1 << 40));
        prop_assert!(d.verify(&ifs));
        prop_assert!(d.value.width() <= rat(1, 1 << 40));
        let bits = 96;
        prop_assert!(moran_sum(&ifs, &Enclosure::point(d.lo().clone()), bits).hi() >= &Rational::one());
        prop_assert!(moran_sum(&ifs, &Enclosure::point(d.hi().clone()), bits).lo() <= &Rational::one());
        prop_assert!(d.below_one());
        // refining never widens
        let finer = d.refine(&ifs, &rat(1, 1 << 60));
        prop_assert!(d.value.contains_enclosure(&finer.value));
    }

    #[test]
    fn lattice_bases_are_exact(ifs in system()) {
        match lattice_classify(&ifs).unwrap() {
            LatticeClass::Lattice { base, exponents } => {
                prop_assert!(base > Rational::zero() && base < Rational::one());
                for (r, k) in ifs.ratios().iter().zip(&exponents) {
                    prop_assert_eq!(&pow_int(&base, *k as i64), r);
                }
                let g = exponents.iter().fold(0u64, |a, &b| num_integer::gcd(a, b));
                prop_assert_eq!(g, 1);
            }
            LatticeClass::Nonlattice => {
                let ratios = ifs.ratios();
                prop_assert!(ratios.windows(2).any(|w| w[0] != w[1]));
            }
            LatticeClass::Unknown => prop_assert!(false, "rational ratios always classify"),
        }
    }

    #[test]
    fn exact_cover_identity(ifs in system(), k in 1i64..=24) {
        let eps = radius(&ifs, k);
        let direct = ifs.cover(&(&eps * int(2))).unwrap().inflate(&eps).unwrap().measure();
        prop_assert_eq!(parallel_volume(&ifs, &eps).unwrap(), direct);
    }

    #[test]
    fn volume_is_monotone(ifs in system(), k in 1i64..=24) {
        let a = parallel_volume(&ifs, &radius(&ifs, k)).unwrap();
        let b = parallel_volume(&ifs, &radius(&ifs, k + 1)).unwrap();
        prop_assert!(a < b);
        prop_assert!(a >= radius(&ifs, k) * int(2));
    }

    #[test]
    fn gap_lists_are_stable(ifs in system(), k in 1i64..=16) {
        let coarse = gaps_above(&ifs, &radius(&ifs, 2 * k)).unwrap();
        let fine = gaps_above(&ifs, &radius(&ifs, k)).unwrap();
        for g in &coarse.gaps {
            prop_assert!(fine.gaps.iter().any(|h| h.interval == g.interval && h.length == g.length));
            prop_assert!(g.left_cert.verify(&ifs, &g.interval.lo));
            prop_assert!(g.right_cert.verify(&ifs, &g.interval.hi));
        }
        // gaps avoid the attractor
        let cover = ifs.cover(&radius(&ifs, k)).unwrap();
        for g in &fine.gaps {
            prop_assert!(!IntervalSet::single(g.interval.clone()).meets(&cover));
        }
    }

    #[test]
    fn cover_measure_decreases(ifs in system()) {
        let len = ifs.hull_length();
        let mut prev = ifs.cover(&len).unwrap().measure();
        for n in 1..=10 {
            let m = ifs.cover(&(&len / int(1 << n))).unwrap().measure();
            prop_assert!(m <= prev);
            prev = m;
        }
        prop_assert!(prev < len);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// λ(Γ) = λ(O)(1 − Σr), strong + compatible, G-components are gaps,
    /// and the two equivalent conditions on λ(F_ε ∩ Γ) hold together.
    #[test]
    fn feasible_convex_iterates(ifs in system()) {
        let Some(m) = find_feasible_convex_iterate(&ifs, 3) else {
            return Ok(());
        };
        let set = convex_iterate(&ifs, m);
        let rep = OpenSetRep::finite_union(&ifs, set.clone()).unwrap();
        prop_assert!(rep.feasible && rep.strong && rep.compatible && rep.projection_condition());
        // the image of a feasible set is feasible again
        prop_assert!(check_feasible(&ifs, &ifs.apply_all(&set)).unwrap().feasible);

        let gen = generator_data(&ifs, &rep, &rat(1, 1000)).unwrap();
        prop_assert!(gen.complete);
        let expected = set.measure() * (Rational::one() - ifs.ratio_sum());
        prop_assert!(gen.lambda_gamma.is_point() && gen.lambda_gamma.contains(&expected));
        let cover = ifs.cover(&(gen.lengths.last().unwrap() / int(4))).unwrap();
        for c in &gen.components {
            prop_assert!(ifs.certify_member(&c.lo, 64).is_some());
            prop_assert!(ifs.certify_member(&c.hi, 64).is_some());
            prop_assert!(!IntervalSet::single(c.clone()).meets(&cover));
        }

        let report = pluriphase_check(&gen).unwrap();
        prop_assert_eq!(report.total_breakpoints(), gen.lengths.len());
        for (b, d) in report.breakpoints.iter().zip(report.breakpoints.iter().skip(1)) {
            prop_assert!(b < d);
        }
        prop_assert!(report.slopes.windows(2).all(|w| w[0] >= w[1]));
        prop_assert_eq!(report.slopes.last().unwrap(), &Rational::zero());
        // piecewise linear with kinks exactly at d_j/2: compare with the
        // geometric value measure(F_ε ∩ G) read from an exact cover
        for bp in &report.breakpoints {
            for eps in [bp * rat(1, 2), bp.clone(), bp * rat(3, 2)] {
                let g = IntervalSet::from_intervals(gen.components.iter().cloned());
                let f_eps = ifs.cover(&(&eps * int(2))).unwrap().inflate(&eps).unwrap();
                prop_assert_eq!(report.eval(&eps), f_eps.intersect(&g).measure());
            }
        }
    }
}
