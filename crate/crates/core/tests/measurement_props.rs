use proptest::prelude::*;
use rpm_core::anchor::{norm_estimate, spectral_init, DEFAULT_POWER_ITERS, DEFAULT_TRUNCATION_FACTOR};
use rpm_core::linalg::{dist2, dot};
use rpm_core::measurements::{
    clean_measurements, gen_sensing, gen_signal, CorruptionModel, CorruptionSpec, MeasurementSet,
};
use rpm_core::rpm::verify_feasibility_of_truth;
use rpm_core::seed::seeded;

fn model_strategy() -> impl Strategy<Value = CorruptionModel> {
    prop_oneof![
        Just(CorruptionModel::ShrinkToZero),
        Just(CorruptionModel::InflatePositive),
        Just(CorruptionModel::MixedRandom),
        Just(CorruptionModel::WorstSupport),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn corruption_identities(
        seed in any::<u64>(),
        n in 1usize..6,
        m in 1usize..80,
        delta in 0.0f64..0.99,
        scale in 0.1f64..5.0,
        model in model_strategy(),
    ) {
        let mut rng = seeded(seed);
        let x0 = gen_signal(n, 1.7, &mut rng).unwrap();
        let a = gen_sensing(m, n, &mut rng).unwrap();
        let spec = CorruptionSpec { fraction: delta, model, magnitude_scale: scale };
        let ms = MeasurementSet::generate(a, &x0, &spec, &mut rng).unwrap();

        prop_assert_eq!(ms.support.len(), spec.support_size(m));
        prop_assert!(ms.support.windows(2).all(|w| w[0] < w[1]));
        for i in 0..m {
            prop_assert!(ms.b[i] >= 0.0);
            if ms.support.binary_search(&i).is_err() {
                prop_assert_eq!(ms.eta[i], 0.0);
                prop_assert_eq!(ms.b[i], ms.b_clean[i]);
            }
            let back = ms.b[i] - ms.eta[i];
            if ms.eta[i] <= 0.0 {
                prop_assert_eq!(back, ms.b_clean[i]);
            } else {
                // positive corruption can round by one ulp of b
                prop_assert!((back - ms.b_clean[i]).abs() <= f64::EPSILON * ms.b[i]);
            }
        }
        match model {
            CorruptionModel::ShrinkToZero | CorruptionModel::WorstSupport => {
                prop_assert!(ms.eta.iter().all(|&e| e <= 0.0));
            }
            CorruptionModel::InflatePositive => prop_assert!(ms.eta.iter().all(|&e| e >= 0.0)),
            CorruptionModel::MixedRandom => {}
        }
        prop_assert!(verify_feasibility_of_truth(&ms.sensing, &ms.b, &x0, &ms.eta).unwrap());
    }

    #[test]
    fn clean_measurements_absolutely_homogeneous(seed in any::<u64>(), t in -5.0f64..5.0) {
        let mut rng = seeded(seed);
        let x0 = gen_signal(4, 1.0, &mut rng).unwrap();
        let a = gen_sensing(12, 4, &mut rng).unwrap();
        let base = clean_measurements(&a, &x0).unwrap();
        let scaled = clean_measurements(&a, &x0.scaled(t)).unwrap();
        for (s, b) in scaled.iter().zip(&base) {
            prop_assert!((s - t.abs() * b).abs() <= 1e-12 * (1.0 + s.abs()));
        }
    }

    #[test]
    fn generation_reproducible(seed in any::<u64>(), model in model_strategy()) {
        let make = || {
            let mut rng = seeded(seed);
            let x0 = gen_signal(3, 1.0, &mut rng).unwrap();
            let a = gen_sensing(20, 3, &mut rng).unwrap();
            MeasurementSet::generate(a, &x0, &CorruptionSpec::new(0.2, model), &mut rng).unwrap()
        };
        prop_assert_eq!(make(), make());
    }

    #[test]
    fn spectral_direction_invariant_to_scaling_b(seed in any::<u64>(), t in 0.1f64..10.0) {
        let mut rng = seeded(seed);
        let x0 = gen_signal(5, 1.0, &mut rng).unwrap();
        let a = gen_sensing(200, 5, &mut rng).unwrap();
        let b = clean_measurements(&a, &x0).unwrap();
        let tb: Vec<f64> = b.iter().map(|v| v * t).collect();
        let p = spectral_init(&a, &b, DEFAULT_TRUNCATION_FACTOR, DEFAULT_POWER_ITERS, &mut seeded(9)).unwrap();
        let q = spectral_init(&a, &tb, DEFAULT_TRUNCATION_FACTOR, DEFAULT_POWER_ITERS, &mut seeded(9)).unwrap();
        let cos = dot(p.as_slice(), q.as_slice()) / (p.norm() * q.norm());
        prop_assert!(cos.abs() > 1.0 - 1e-6);
        prop_assert!((q.norm() - t * p.norm()).abs() <= 1e-9 * q.norm());
    }
}

#[test]
fn norm_estimate_within_ten_percent_after_twenty_percent_outliers() {
    let mut rng = seeded(5);
    let x0 = gen_signal(6, 2.0, &mut rng).unwrap();
    let a = gen_sensing(5000, 6, &mut rng).unwrap();
    let mut b = clean_measurements(&a, &x0).unwrap();
    let before = norm_estimate(&b).unwrap();
    for (k, v) in b.iter_mut().take(1000).enumerate() {
        *v = if k % 2 == 0 { 1e6 } else { 0.0 };
    }
    let after = norm_estimate(&b).unwrap();
    assert!((after - before).abs() < 0.1 * before, "{before} -> {after}");
}

#[test]
fn spectral_anchor_meets_hypothesis_in_ninety_percent_of_trials() {
    let spec = CorruptionSpec::new(0.1, CorruptionModel::ShrinkToZero);
    let mut good = 0;
    for seed in 0..50 {
        let mut rng = seeded(seed);
        let x0 = gen_signal(20, 1.0, &mut rng).unwrap();
        let a = gen_sensing(2000, 20, &mut rng).unwrap();
        let ms = MeasurementSet::generate(a, &x0, &spec, &mut rng).unwrap();
        let phi = spectral_init(&ms.sensing, &ms.b, 3.0, DEFAULT_POWER_ITERS, &mut rng).unwrap();
        let neg = phi.scaled(-1.0);
        let err = dist2(phi.as_slice(), x0.as_slice()).min(dist2(neg.as_slice(), x0.as_slice()));
        if err < 0.5 {
            good += 1;
        }
    }
    assert!(good >= 45, "{good}/50");
}
