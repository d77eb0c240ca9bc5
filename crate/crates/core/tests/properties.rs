//! Property tests on random exact piecewise-linear models.

use bvkit::certificate::lemma22_certificate;
use bvkit::evaluable::uniform_grid;
use bvkit::measure::image_measure;
use bvkit::reconstruction::{
    ac_modulus, bv_density, default_window, density_grid, reconstruction_error,
};
use bvkit::variation::{
    coarsened_partition, jordan_decomposition, partition_sum, total_variation,
    uniform_approx_with_partition,
};
use bvkit::{FunctionModel, Interval, IntervalSet, Partition, PieceKind, Real};
use proptest::prelude::*;

fn q(n: i64, d: i64) -> Real {
    Real::ratio(n, d)
}

/// Nodes on a 1/16 lattice in x with values on a 1/4 lattice.
fn pl_model() -> impl Strategy<Value = FunctionModel> {
    prop::collection::vec((1i64..6, -8i64..=8), 1..7).prop_map(|steps| {
        let mut x = 0;
        let mut nodes = vec![(Real::zero(), Real::zero())];
        for (dx, y) in steps {
            x += dx;
            nodes.push((q(x, 16), q(y, 4)));
        }
        FunctionModel::piecewise_linear(&nodes).unwrap()
    })
}

fn interval_set() -> impl Strategy<Value = IntervalSet> {
    prop::collection::vec((0i64..64, 1i64..8), 0..6).prop_map(|ivs| {
        IntervalSet::from_intervals(
            ivs.into_iter()
                .map(|(lo, w)| Interval::closed(q(lo, 64), q(lo + w, 64)))
                .collect(),
        )
    })
}

fn slope_bound(m: &FunctionModel) -> Real {
    m.pieces()
        .iter()
        .map(|p| match &p.kind {
            PieceKind::Linear { slope, .. } => slope.abs(),
            _ => Real::zero(),
        })
        .max()
        .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn variation_is_additive(m in pl_model(), t in 1i64..16) {
        let (a, b) = m.domain();
        let c = &a + &(&(&b - &a) * &q(t, 16));
        let whole = total_variation(&m, &b, 0.0).unwrap().lower;
        let left = total_variation(&m, &c, 0.0).unwrap().lower;
        let right = total_variation(&m.restrict(&c, &b).unwrap(), &b, 0.0).unwrap().lower;
        prop_assert_eq!(whole, left + right);
    }

    #[test]
    fn variation_bounds_every_partition_sum(m in pl_model(), cuts in prop::collection::btree_set(1i64..64, 0..8)) {
        let (a, b) = m.domain();
        let mut pts = vec![a.clone()];
        pts.extend(cuts.iter().map(|&k| &a + &(&(&b - &a) * &q(k, 64))));
        pts.push(b.clone());
        let v = total_variation(&m, &b, 0.0).unwrap();
        prop_assert!(partition_sum(&m, &Partition::new(pts).unwrap()).unwrap() <= v.lower);
        prop_assert_eq!(partition_sum(&m, &v.achieving_partition).unwrap(), v.lower);
    }

    #[test]
    fn variation_is_reflection_invariant(m in pl_model()) {
        let r = m.reflect();
        prop_assert_eq!(
            total_variation(&m, m.b(), 0.0).unwrap().lower,
            total_variation(&r, r.b(), 0.0).unwrap().lower
        );
    }

    #[test]
    fn jordan_parts_recombine(m in pl_model()) {
        let d = jordan_decomposition(&m, 0.0).unwrap();
        let (a, b) = m.domain();
        let mut prev = (Real::zero(), Real::zero());
        for x in uniform_grid(&a, &b, 96) {
            let (p, n) = d.eval(&x).unwrap();
            prop_assert_eq!(&p - &n, m.evaluate(&x).unwrap());
            prop_assert!(p >= prev.0 && n >= prev.1);
            prev = (p, n);
        }
    }

    #[test]
    fn approximant_brackets_p(m in pl_model(), k in 1u32..8) {
        let eps = q(1, 1 << k);
        let p = coarsened_partition(&m, &eps).unwrap();
        let u = uniform_approx_with_partition(&m, &eps, p).unwrap();
        prop_assert!(u.deficit < eps);
        prop_assert!(u.sup_gap < eps && u.sup_gap >= Real::zero());
    }

    #[test]
    fn image_measure_is_subadditive_and_lipschitz(m in pl_model(), e1 in interval_set(), e2 in interval_set()) {
        let (a, b) = m.domain();
        let scale = |e: &IntervalSet| e.scale_unit_into(&a, &b);
        let (e1, e2) = (scale(&e1), scale(&e2));
        let u = image_measure(&m, &e1.union(&e2)).unwrap();
        let s = image_measure(&m, &e1).unwrap() + image_measure(&m, &e2).unwrap();
        prop_assert!(u <= s);
        prop_assert!(image_measure(&m, &e1).unwrap() <= slope_bound(&m) * e1.measure().clone());
    }

    #[test]
    fn modulus_is_monotone_and_bounded(m in pl_model()) {
        let ds: Vec<Real> = (1..=12).map(|j| q(1, j)).collect();
        let r = ac_modulus(&m, &ds, &q(1, 2)).unwrap();
        let v = total_variation(&m, m.b(), 0.0).unwrap().lower;
        let lip = slope_bound(&m);
        for w in r.samples.windows(2) {
            prop_assert!(w[0].delta < w[1].delta && w[0].omega <= w[1].omega);
        }
        for s in &r.samples {
            prop_assert!(s.omega <= v);
            prop_assert!(s.omega <= &lip * &s.delta);
            let len = Real::sum(s.collection.iter().map(|i| i.length()).collect::<Vec<_>>().iter());
            prop_assert!(len <= s.delta);
        }
    }

    #[test]
    fn dyadic_models_are_recovered_exactly(m in pl_model()) {
        // knots are multiples of 1/16, so a grid of spacing 1/256 sees every kink
        let grid = density_grid(&m, (m.b().to_f64() * 256.0).round() as usize);
        let h = default_window(&grid).unwrap();
        let d = bv_density(&m, &grid, &h, 0.0).unwrap();
        prop_assert_eq!(reconstruction_error(&m, &d).unwrap().sup_error, Real::zero());
    }

    #[test]
    fn cover_certificate_closes(m in pl_model(), k in 1i64..4) {
        let eps = q(1, 10i64.pow(k as u32));
        let (a, b) = m.domain();
        let lip = m.lipschitz_estimate().unwrap().max(1.0).ceil() as i64;
        let w = &eps / &Real::int(16 * lip);
        let mid = a.midpoint(&b);
        let n = IntervalSet::from_intervals(vec![
            Interval::closed(a.clone(), &a + &w),
            Interval::closed(mid.clone(), &mid + &w),
        ]);
        let t = lemma22_certificate(&m, &n, &eps).unwrap();
        prop_assert!(t.holds);
        prop_assert!(t.max_p_cover < &eps * &Real::int(5));
        prop_assert!(t.max_n_cover < &eps * &Real::int(9));
    }
}

proptest! {
    #[test]
    fn inclusion_exclusion(a in interval_set(), b in interval_set()) {
        let lhs = a.union(&b).measure().clone() + a.intersection(&b).measure().clone();
        prop_assert_eq!(lhs, a.measure().clone() + b.measure().clone());
        prop_assert_eq!(
            a.difference(&b).measure().clone() + a.intersection(&b).measure().clone(),
            a.measure().clone()
        );
        prop_assert!(a.intersection(&b).is_subset(&a));
    }

    #[test]
    fn reflection_is_an_involution(a in interval_set()) {
        let s = Real::one();
        prop_assert_eq!(a.reflected(&s).reflected(&s), a.clone());
        prop_assert_eq!(a.reflected(&s).measure().clone(), a.measure().clone());
    }

    #[test]
    fn complement_partitions_the_interval(a in interval_set()) {
        let (lo, hi) = (Real::zero(), q(2, 1));
        let c = a.complement_within(&lo, &hi);
        prop_assert_eq!(c.measure().clone() + a.intersect_interval(&Interval::closed(lo, hi.clone())).measure().clone(), hi);
    }

    #[test]
    fn exact_arithmetic_round_trips(n1 in -1000i64..1000, d1 in 1i64..1000, n2 in -1000i64..1000, d2 in 1i64..1000) {
        let (x, y) = (q(n1, d1), q(n2, d2));
        prop_assert_eq!(&(&x + &y) - &y, x.clone());
        if !y.is_zero() {
            prop_assert_eq!(&(&x * &y) / &y, x.clone());
        }
        prop_assert_eq!(x < y, (n1 as f64 / d1 as f64) < (n2 as f64 / d2 as f64) && x != y);
    }
}
