use memassoc::vision::synthetic::SyntheticSuite;
use memassoc::vision::{
    array_state, calibrate_threshold, classify, match_counts, similarity, train_all, train_pair, training_voltages,
    ArrayState, ImageGrid, InferConfig, TrainConfig,
};
use memassoc::DeviceParams;
use proptest::prelude::*;

fn binary_grid() -> impl Strategy<Value = ImageGrid> {
    prop::collection::vec(prop::bool::ANY, 400)
        .prop_map(|v| ImageGrid::new(20, 20, v.into_iter().map(|b| f64::from(u8::from(b))).collect()).unwrap())
}

fn unit_grid() -> impl Strategy<Value = ImageGrid> {
    prop::collection::vec(0.0f64..=1.0, 400).prop_map(|v| ImageGrid::new(20, 20, v).unwrap())
}

#[test]
fn synthetic_suite_end_to_end() {
    let suite = SyntheticSuite::generate(42, 0.1);
    let p = DeviceParams::default();
    let array =
        train_all(ArrayState::standard(p), suite.train.iter().map(|(i, t)| (i, t)), &TrainConfig::default()).unwrap();
    let state = array_state(&array);
    for (s, &px) in state.values().iter().zip(suite.prototype.values()) {
        if px > 0.5 {
            assert!(*s < 0.2, "bright cell at {s}");
        }
    }
    let base = InferConfig::default();
    let score = |set: &[memassoc::vision::synthetic::LabeledImage], positive: bool| -> Vec<f64> {
        set.iter()
            .filter(|l| l.positive == positive)
            .map(|l| classify(&array, &l.image, &base).unwrap().similarity)
            .collect()
    };
    let theta = calibrate_threshold(&score(&suite.calibration, true), &score(&suite.calibration, false)).unwrap();
    let cfg = InferConfig { similarity_threshold: theta, ..base };
    let correct =
        suite.test.iter().filter(|l| classify(&array, &l.image, &cfg).unwrap().positive == l.positive).count();
    assert_eq!(correct, 10);
}

#[test]
fn repeated_training_converges_monotonically() {
    let suite = SyntheticSuite::generate(7, 0.1);
    let (input, teacher) = &suite.train[0];
    let cfg = TrainConfig::default();
    let (counts, full) = match_counts(input, teacher, &cfg).unwrap();
    let high: Vec<usize> = (0..400).filter(|&i| counts[i] * 2 > full).collect();
    assert!(!high.is_empty());
    let p = DeviceParams::default();
    let mut array = ArrayState::standard(p);
    let mut last: Vec<f64> = high.iter().map(|&i| array.resistance(i / 20, i % 20)).collect();
    for _ in 0..20 {
        array = train_pair(&array, input, teacher, &cfg).unwrap();
        let now: Vec<f64> = high.iter().map(|&i| array.resistance(i / 20, i % 20)).collect();
        assert!(now.iter().zip(&last).all(|(a, b)| a <= b));
        last = now;
    }
    assert!(last.iter().all(|&r| r == p.r_on));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn counts_and_voltages_in_range(a in unit_grid(), b in unit_grid()) {
        let cfg = TrainConfig::default();
        let (counts, full) = match_counts(&a, &b, &cfg).unwrap();
        prop_assert_eq!(full, 400);
        prop_assert!(counts.iter().all(|&c| c <= 400));
        for v in training_voltages(&a, &b, &cfg).unwrap() {
            prop_assert!(v >= cfg.v_min && v <= cfg.v_max);
        }
    }

    #[test]
    fn larger_counts_end_lower(input in binary_grid(), teacher in binary_grid()) {
        let cfg = TrainConfig::default();
        let (counts, _) = match_counts(&input, &teacher, &cfg).unwrap();
        let volts = training_voltages(&input, &teacher, &cfg).unwrap();
        let array = train_pair(&ArrayState::standard(DeviceParams::default()), &input, &teacher, &cfg).unwrap();
        for i in 0..400 {
            for j in 0..400 {
                if counts[i] > counts[j] {
                    prop_assert!(volts[i] > volts[j]);
                    prop_assert!(array.resistance(i / 20, i % 20) <= array.resistance(j / 20, j % 20));
                }
            }
        }
    }

    #[test]
    fn similarity_is_metric_like(a in binary_grid(), b in binary_grid()) {
        let s = similarity(&a, &b).unwrap();
        prop_assert!((0.0..=1.0).contains(&s));
        prop_assert_eq!(s, similarity(&b.inverted(), &a.inverted()).unwrap());
        // a state equal to the inverted image scores zero, and only then
        prop_assert_eq!(s == 0.0, a == b.inverted());
    }

    #[test]
    fn classification_is_deterministic(state in unit_grid(), img in unit_grid()) {
        let array = ArrayState::from_normalized(DeviceParams::default(), &state);
        let cfg = InferConfig::default();
        prop_assert_eq!(classify(&array, &img, &cfg).unwrap(), classify(&array, &img, &cfg).unwrap());
    }
}
