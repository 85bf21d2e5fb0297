use proptest::prelude::*;

use vilenkin::group::{complement_partition, digits_to_index, index_to_digits, Interval};
use vilenkin::hardy::{hardy_quasinorm, lp_quasinorm, make_random_atom, weak_lp_quasinorm};
use vilenkin::kernels::{convolve, convolve_spectral, dirichlet, dirichlet_factored, t_kernel};
use vilenkin::lab::{domination_factor, maximal_op, WeightMode};
use vilenkin::signal::fmt_sig;
use vilenkin::summability::{make_weights, t_mean, MeanKind, WeightKind};
use vilenkin::transform::{inverse_transform, transform_fast, transform_naive};
use vilenkin::{Complex64, GroupSpec, Signal};

fn spec_strategy() -> impl Strategy<Value = GroupSpec> {
    prop::collection::vec(2usize..=5, 1..=4).prop_map(|m| GroupSpec::new(m).unwrap())
}

fn signal_strategy() -> impl Strategy<Value = Signal> {
    spec_strategy().prop_flat_map(|spec| {
        let len = spec.order();
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), len)
            .prop_map(move |v| Signal::from_fn(&spec, |i| Complex64::new(v[i].0, v[i].1)))
    })
}

fn family_strategy() -> impl Strategy<Value = WeightKind> {
    prop_oneof![
        Just(WeightKind::Fejer),
        Just(WeightKind::Riesz),
        (0.1f64..1.0).prop_map(|alpha| WeightKind::U { alpha }),
        (0.1f64..1.0).prop_map(|alpha| WeightKind::V { alpha }),
        Just(WeightKind::B { alpha: 1.0, beta: 1 }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn digits_round_trip(spec in spec_strategy(), raw in any::<usize>()) {
        let n = raw % spec.order();
        let d = index_to_digits(&spec, n).unwrap();
        prop_assert_eq!(digits_to_index(&spec, &d).unwrap(), n);
        for (k, &dk) in d.iter().enumerate() {
            prop_assert!(dk < spec.radix(k));
        }
    }

    #[test]
    fn group_axioms(spec in spec_strategy(), a in any::<usize>(), b in any::<usize>(), c in any::<usize>()) {
        let (x, y, z) = (a % spec.order(), b % spec.order(), c % spec.order());
        prop_assert_eq!(spec.add_indices(x, y), spec.add_indices(y, x));
        prop_assert_eq!(
            spec.add_indices(spec.add_indices(x, y), z),
            spec.add_indices(x, spec.add_indices(y, z))
        );
        prop_assert_eq!(spec.add_indices(x, 0), x);
        prop_assert_eq!(spec.add_indices(x, spec.neg_index(x)), 0);
        prop_assert_eq!(spec.sub_indices(spec.add_indices(x, y), y), x);
    }

    #[test]
    fn complement_cells_partition(spec in spec_strategy()) {
        let mut hits = vec![0usize; spec.order()];
        for cell in complement_partition(&spec) {
            for x in cell.members(&spec) {
                hits[x] += 1;
            }
        }
        prop_assert_eq!(hits[0], 0);
        prop_assert!(hits[1..].iter().all(|&h| h == 1));
    }

    #[test]
    fn interval_measure(spec in spec_strategy(), raw in any::<usize>(), lvl in 0usize..5) {
        let level = lvl.min(spec.levels());
        let x = raw % spec.order();
        let i = Interval::containing(&spec, level, x).unwrap();
        prop_assert!(i.contains(&spec, x));
        prop_assert_eq!(i.members(&spec).len(), spec.order() / spec.big_m(level));
        prop_assert!((i.measure(&spec) - 1.0 / spec.big_m(level) as f64).abs() < 1e-15);
    }

    #[test]
    fn fast_matches_naive(f in signal_strategy()) {
        let fast = transform_fast(&f);
        let naive = transform_naive(&f);
        prop_assert!(fast.max_abs_diff(&naive) < 1e-12);
    }

    #[test]
    fn inverse_round_trip(f in signal_strategy()) {
        let back = inverse_transform(&transform_fast(&f));
        prop_assert!(back.max_abs_diff(&f) < 1e-12);
    }

    #[test]
    fn parseval(f in signal_strategy()) {
        let energy: f64 = f.as_slice().iter().map(|z| z.norm_sqr()).sum::<f64>() / f.len() as f64;
        let spectral: f64 = transform_fast(&f).as_slice().iter().map(|z| z.norm_sqr()).sum();
        prop_assert!((energy - spectral).abs() <= 1e-12 * energy.max(1.0));
    }

    #[test]
    fn dirichlet_routes_agree(spec in spec_strategy(), raw in any::<usize>()) {
        let n = raw % spec.order();
        let a = dirichlet(&spec, n).unwrap();
        let b = dirichlet_factored(&spec, n).unwrap();
        prop_assert!(a.max_abs_diff(&b) < 1e-10);
    }

    #[test]
    fn convolution_routes_agree(f in signal_strategy(), raw in any::<usize>()) {
        let spec = f.spec().clone();
        let g = dirichlet(&spec, 1 + raw % spec.order()).unwrap();
        let direct = convolve(&f, &g).unwrap();
        let spectral = convolve_spectral(&f, &g).unwrap();
        prop_assert!(direct.max_abs_diff(&spectral) < 1e-12);
    }

    #[test]
    fn t_mean_is_kernel_convolution(f in signal_strategy(), kind in family_strategy(), raw in any::<usize>()) {
        let spec = f.spec().clone();
        let w = make_weights(kind, spec.order() + 1).unwrap();
        let first = w.first_defined().unwrap();
        prop_assume!(first <= spec.order());
        let n = first + raw % (spec.order() + 1 - first);
        let direct = convolve(&f, &t_kernel(&spec, &w, n).unwrap()).unwrap();
        let mean = t_mean(&f, &w, n).unwrap();
        prop_assert!(direct.max_abs_diff(&mean) < 1e-10);
    }

    #[test]
    fn weak_below_strong(f in signal_strategy(), p in 0.2f64..2.0) {
        let weak = weak_lp_quasinorm(&f, p).unwrap();
        let strong = lp_quasinorm(&f, p).unwrap();
        prop_assert!(weak <= strong * (1.0 + 1e-12));
    }

    #[test]
    fn atoms_have_unit_hardy_ball(seed in any::<u64>(), lvl in 0usize..6, p in 0.25f64..1.0) {
        let spec = GroupSpec::walsh(6).unwrap();
        let atom = make_random_atom(&spec, p, lvl.min(5), seed).unwrap();
        let h = hardy_quasinorm(atom.values(), p).unwrap();
        prop_assert!(h <= 1.0 + 1e-9, "{}", h);
    }

    #[test]
    fn non_increasing_means_dominated_by_fejer(f in signal_strategy(), kind in prop_oneof![
        Just(WeightKind::Fejer),
        Just(WeightKind::Riesz),
        (0.1f64..1.0).prop_map(|alpha| WeightKind::U { alpha }),
    ]) {
        let hi = 2 * f.len();
        let w = make_weights(kind, hi + 1).unwrap();
        let fejer = make_weights(WeightKind::Fejer, hi + 1).unwrap();
        let c = domination_factor(&w, hi).unwrap();
        let t = maximal_op(&f, &w, MeanKind::T, 1.0, WeightMode::Unweighted, 1, hi).unwrap();
        let s = maximal_op(&f, &fejer, MeanKind::Norlund, 1.0, WeightMode::Unweighted, 1, hi).unwrap();
        for (a, b) in t.iter().zip(&s) {
            prop_assert!(*a <= c * b + 1e-10);
        }
    }

    #[test]
    fn twelve_significant_digits(x in -1e9f64..1e9) {
        let back: f64 = fmt_sig(x).parse().unwrap();
        prop_assert!((back - x).abs() <= 1e-11 * x.abs().max(1e-300));
    }
}
