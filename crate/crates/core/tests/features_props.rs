use ctgfeat_core::catalog::{catalog_default, COEFF_VAR_2, DN_OUTLIERTEST2_STD};
use ctgfeat_core::eigen::min_eigenvalue;
use ctgfeat_core::features::{
    f_coeff_var_2, f_mean_abs_dev_median, f_outliertest_std, f_simplefit_exp1_rmse, trev_num,
};
use ctgfeat_core::matrix::special_columns;
use ctgfeat_core::select::{fit_threshold_classifier, misclassification_rate};
use ctgfeat_core::symbolic::transition_matrix;
use ctgfeat_core::{
    build_feature_matrix, filter_special_features, FeatureDescriptor, FeatureValue, LabeledDataset,
    Outcome, SpecialKind, Split, TimeSeries,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn series(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let mut x = 0.0;
    (0..n)
        .map(|_| {
            x = 0.8 * x + rng.random_range(-1.0..1.0);
            130.0 + 5.0 * x
        })
        .collect()
}

#[test]
fn hand_computable_values() {
    assert!((f_coeff_var_2(&[1.0, 3.0]).unwrap() - 0.5).abs() <= 1e-12);
    assert!((f_mean_abs_dev_median(&[1.0, 2.0, 3.0]).unwrap() - 2.0 / 3.0).abs() <= 1e-12);
    assert!((trev_num(&[1.0, 2.0, 4.0], 1).unwrap() - 4.5).abs() <= 1e-12);
    let t = transition_matrix(&[0, 1, 0, 1, 0], 2);
    assert_eq!(t.as_slice(), &[0.0, 1.0, 1.0, 0.0]);
    assert!((min_eigenvalue(&t).unwrap() + 1.0).abs() <= 1e-12);
}

#[test]
fn trev_numerator_is_odd_under_reversal() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for _ in 0..20 {
        let xs = series(&mut rng, 300);
        let rev: Vec<f64> = xs.iter().rev().copied().collect();
        for tau in 1..5 {
            let a = trev_num(&xs, tau).unwrap();
            let b = trev_num(&rev, tau).unwrap();
            assert!((a + b).abs() <= 1e-9 * a.abs().max(1.0));
        }
    }
}

#[test]
fn outlier_ratio_drops_with_planted_spikes() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let clean = series(&mut rng, 2000);
    let mut spiky = clean.clone();
    for i in (0..2000).step_by(40) {
        spiky[i] += 60.0;
    }
    let a = f_outliertest_std(&clean, 2).unwrap();
    let b = f_outliertest_std(&spiky, 2).unwrap();
    assert!(b < a, "{b} !< {a}");
}

#[test]
fn exponential_sample_fits_better_than_uniform() {
    let mut rng = ChaCha8Rng::seed_from_u64(46);
    let exp: Vec<f64> = (0..10_000).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let uni: Vec<f64> = (0..10_000).map(|_| rng.random::<f64>()).collect();
    let a = f_simplefit_exp1_rmse(&exp, 30).unwrap();
    let b = f_simplefit_exp1_rmse(&uni, 30).unwrap();
    assert!(a < b, "{a} !< {b}");
}

#[test]
fn invariance_suite() {
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    for _ in 0..50 {
        let xs = series(&mut rng, 400);
        let scale = rng.random_range(0.1..10.0);
        let shift = rng.random_range(-50.0..50.0);

        let scaled: Vec<f64> = xs.iter().map(|x| scale * x).collect();
        let a = f_coeff_var_2(&xs).unwrap();
        assert!((f_coeff_var_2(&scaled).unwrap() - a).abs() <= 1e-12 * a.max(1.0));

        let shifted: Vec<f64> = xs.iter().map(|x| x + shift).collect();
        let m = f_mean_abs_dev_median(&xs).unwrap();
        assert!((f_mean_abs_dev_median(&shifted).unwrap() - m).abs() <= 1e-12 * m.max(1.0));
        let ms = f_mean_abs_dev_median(&scaled).unwrap();
        assert!((ms - scale * m).abs() <= 1e-12 * ms.max(1.0));

        let r = f_simplefit_exp1_rmse(&xs, 30).unwrap();
        let rs = f_simplefit_exp1_rmse(&shifted, 30).unwrap();
        assert!((r - rs).abs() <= 1e-12, "{r} vs {rs}");

        let labels: Vec<bool> = (0..xs.len()).map(|i| i % 3 == 0).collect();
        let rate = |v: &[f64]| {
            let c = fit_threshold_classifier(v, &labels).unwrap();
            misclassification_rate(&c, v, &labels)
        };
        let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
        let affine: Vec<f64> = xs.iter().map(|x| sign * scale * x + shift).collect();
        assert!((rate(&xs) - rate(&affine)).abs() <= 1e-12);
    }
}

fn dataset(n: usize, seed: u64) -> LabeledDataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let series = (0..n)
        .map(|i| TimeSeries::from_values(format!("s{i:02}"), series(&mut rng, 600)).unwrap())
        .collect();
    let outcomes = (0..n)
        .map(|i| Outcome {
            cord_ph: Some(7.0 + 0.01 * i as f64),
            compromise: false,
            split: Split::Train,
        })
        .collect();
    LabeledDataset::new(series, outcomes).unwrap()
}

fn fails_on_s03(xs: &[f64], _seed: u64) -> FeatureValue {
    // Identifies the target series by its first sample.
    let target = dataset(6, 44).series()[3].values()[0];
    if xs[0] == target {
        FeatureValue::Special(SpecialKind::NotFinite)
    } else {
        FeatureValue::Value(xs[0])
    }
}

#[test]
fn special_value_drops_exactly_that_column() {
    let data = dataset(6, 44);
    let mut catalog = catalog_default();
    catalog.push(FeatureDescriptor::custom("forced_failure", fails_on_s03));
    let m = build_feature_matrix(&data, &catalog, 7).unwrap();
    assert_eq!(special_columns(&m), vec!["forced_failure".to_string()]);
    let f = filter_special_features(&m);
    assert_eq!(f.n_cols(), catalog.len() - 1);
    assert!(f.column_index("forced_failure").is_none());
    assert!(!f.has_special());
    for c in 0..f.n_cols() {
        let name = &f.columns()[c].name;
        let orig = m.column_index(name).unwrap();
        assert!(m.column(orig).eq(f.column(c)));
    }
}

#[test]
fn matrix_is_seed_deterministic_and_row_order_free() {
    let data = dataset(5, 45);
    let catalog = catalog_default();
    let a = build_feature_matrix(&data, &catalog, 99).unwrap();
    let b = build_feature_matrix(&data, &catalog, 99).unwrap();
    assert_eq!(a, b);

    let reordered = LabeledDataset::new(
        data.series().iter().rev().cloned().collect(),
        data.outcomes().iter().rev().cloned().collect(),
    )
    .unwrap();
    let r = build_feature_matrix(&reordered, &catalog, 99).unwrap();
    for id in a.row_ids() {
        assert_eq!(a.row(a.row_index(id).unwrap()), r.row(r.row_index(id).unwrap()));
    }
    assert!(a.column_index(COEFF_VAR_2).is_some());
    assert!(a.column_index(DN_OUTLIERTEST2_STD).is_some());
}
