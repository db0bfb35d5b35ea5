use std::collections::HashSet;

use claimscope::autoencoder::{
    calibrate_threshold, classify_by_error, percentile_sweep, ErrorTable,
};
use claimscope::dimensionality::fit_pca;
use claimscope::features::{AnalysisUnit, FeatureMatrix};
use claimscope::pipeline::split;
use claimscope::synth::{generate, SynthConfig};
use ndarray::Array2;
use proptest::prelude::*;

fn matrix(values: Array2<f64>) -> FeatureMatrix {
    let (n, d) = values.dim();
    FeatureMatrix::new(
        values,
        (0..d).map(|j| format!("f{j}")).collect(),
        vec![false; n],
        (0..n).map(|i| i.to_string()).collect(),
        AnalysisUnit::Claim,
    )
    .unwrap()
}

fn data() -> impl Strategy<Value = Array2<f64>> {
    (1usize..=6, 8usize..40, any::<bool>()).prop_flat_map(|(d, n, duplicate)| {
        prop::collection::vec(-100.0f64..100.0, n * d).prop_map(move |v| {
            let mut x = Array2::from_shape_vec((n, d), v).unwrap();
            if duplicate && d > 1 {
                // A copied column forces a zero eigenvalue.
                let first = x.column(0).to_owned();
                x.column_mut(d - 1).assign(&first);
            }
            x
        })
    })
}

proptest! {
    #[test]
    fn pca_invariants(x in data()) {
        let d = x.ncols();
        let p = fit_pca(&matrix(x), d).unwrap();
        let cct = p.components.dot(&p.components.t());
        for i in 0..d {
            for j in 0..d {
                if p.rank_deficient[i] || p.rank_deficient[j] {
                    continue;
                }
                let expect = if i == j { 1.0 } else { 0.0 };
                prop_assert!((cct[[i, j]] - expect).abs() < 1e-9);
            }
        }
        for w in p.explained_variance.windows(2) {
            prop_assert!(w[0] >= w[1]);
        }
        prop_assert!(p.explained_variance.iter().all(|&v| v >= 0.0));
        prop_assert!(p.explained_variance_ratio.iter().sum::<f64>() <= 1.0 + 1e-9);
        // Continuous draws are never constant, so the standardized trace is d.
        prop_assert!((p.explained_variance.iter().sum::<f64>() - d as f64).abs() < 1e-9);
    }

    #[test]
    fn error_table_totals(
        pairs in prop::collection::vec(prop::collection::vec((-10.0f64..10.0, -10.0f64..10.0), 3), 1..30)
    ) {
        let n = pairs.len();
        let input = Array2::from_shape_fn((n, 3), |(i, j)| pairs[i][j].0);
        let output = Array2::from_shape_fn((n, 3), |(i, j)| pairs[i][j].1);
        let t = ErrorTable::from_reconstruction(vec!["a".into(), "b".into(), "c".into()], &input, &output, vec![false; n]);
        for i in 0..n {
            let expect = pairs[i].iter().map(|(a, b)| (b - a) * (b - a)).sum::<f64>() / 3.0;
            prop_assert!((t.total_error[i] - expect).abs() < 1e-12);
            prop_assert!(t.total_error[i] >= 0.0);
            for j in 0..3 {
                prop_assert_eq!(t.attribute_errors[[i, j]], (pairs[i][j].1 - pairs[i][j].0).abs());
            }
        }
    }

    #[test]
    fn calibration_covers_the_percentile(
        errors in prop::collection::vec(0.0f64..5.0, 1..200),
        p in 0.5f64..100.0,
    ) {
        let n = errors.len();
        let t = ErrorTable {
            attribute_names: vec![],
            attribute_errors: Array2::zeros((n, 0)),
            total_error: errors.clone(),
            target: vec![false; n],
        };
        let threshold = calibrate_threshold(&t, p).unwrap();
        let flagged = classify_by_error(&t, threshold).iter().filter(|&&f| f).count();
        let at_or_below = n - flagged;
        prop_assert!(at_or_below as f64 >= p / 100.0 * n as f64 - 1e-9);
        let strictly_below = errors.iter().filter(|&&e| e < threshold).count();
        prop_assert!((strictly_below as f64) < p / 100.0 * n as f64 + 1e-9);
    }

    #[test]
    fn percentile_sweep_is_monotone(
        rows in prop::collection::vec((0.0f64..1.0, any::<bool>()), 2..100),
        percentiles in prop::collection::vec(0.0f64..=100.0, 1..20),
    ) {
        let scores: Vec<f64> = rows.iter().map(|r| r.0).collect();
        let labels: Vec<bool> = rows.iter().map(|r| r.1).collect();
        let table = percentile_sweep(&scores, &labels, &percentiles).unwrap();
        for w in table.windows(2) {
            prop_assert!(w[1].recall <= w[0].recall);
            prop_assert!(w[1].specificity >= w[0].specificity);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn split_partitions_providers(seed in any::<u64>(), fraction in 0.1f64..0.9) {
        let ds = generate(&SynthConfig {
            n_providers: 80,
            n_beneficiaries: 200,
            n_claims: 400,
            fraud_provider_fraction: 0.2,
            seed: seed % 1000,
            ..Default::default()
        })
        .unwrap()
        .to_dataset()
        .unwrap();
        let (train, test, summary) = split(&ds, fraction, seed).unwrap();
        let a: HashSet<&str> = train.rows.iter().map(|r| r.claim.provider_id.as_str()).collect();
        let b: HashSet<&str> = test.rows.iter().map(|r| r.claim.provider_id.as_str()).collect();
        let all: HashSet<&str> = ds.rows.iter().map(|r| r.claim.provider_id.as_str()).collect();
        prop_assert!(a.is_disjoint(&b));
        prop_assert_eq!(a.len() + b.len(), all.len());
        prop_assert_eq!(train.len() + test.len(), ds.len());
        let fraud_total = summary.test_fraud_providers + summary.train_fraud_providers;
        prop_assert!((summary.test_fraud_providers as f64 - fraction * fraud_total as f64).abs() <= 1.0);
    }
}
