use claimscope::autoencoder::{reconstruction_errors, train_autoencoder, NetworkConfig};
use claimscope::features::{
    age_band_fraud_rates, build_features, fraud_proportion, sparse_encode_codes, AnalysisUnit,
    CodeField, FeatureOptions,
};
use claimscope::synth::{generate, SynthConfig};

fn corpus(seed: u64) -> claimscope::ingest::MergedDataset {
    generate(&SynthConfig {
        seed,
        ..Default::default()
    })
    .unwrap()
    .to_dataset()
    .unwrap()
}

#[test]
fn diagnosis_matrix_is_sparse() {
    let m = sparse_encode_codes(&corpus(11), CodeField::Diagnosis).unwrap();
    assert!(m.density() < 0.2, "density {}", m.density());
}

#[test]
fn claim_level_fraud_share_tracks_provider_fraction() {
    for seed in [11, 12, 13] {
        let (_, yes) = fraud_proportion(&corpus(seed)).unwrap();
        assert!((yes - 9.35).abs() <= 2.0, "seed {seed}: {yes}");
    }
}

#[test]
fn fraud_skews_elderly() {
    let rates =
        age_band_fraud_rates(&corpus(11), &[0, 30, 70], &FeatureOptions::default()).unwrap();
    let band = |lower: u32| rates.iter().find(|r| r.lower == lower).unwrap();
    assert!(band(70).fraud_rate > band(30).fraud_rate, "{rates:?}");
}

#[test]
fn fraud_rows_reconstruct_worse() {
    for seed in 1..=5 {
        let features = build_features(
            &corpus(seed),
            AnalysisUnit::Claim,
            &FeatureOptions::default(),
        )
        .unwrap();
        let mut config = NetworkConfig::for_features(features.n_cols());
        config.seed = seed;
        config.epochs = 20;
        let model = train_autoencoder(&features.non_fraud(), &config).unwrap();
        let curve = &model.training_loss_curve;
        assert!(
            curve.last() < curve.first(),
            "seed {seed}: loss did not fall"
        );
        let table = reconstruction_errors(&model, &features).unwrap();
        let mean = |fraud: bool| {
            let v: Vec<f64> = table
                .total_error
                .iter()
                .zip(&table.target)
                .filter(|(_, &t)| t == fraud)
                .map(|(&e, _)| e)
                .collect();
            v.iter().sum::<f64>() / v.len() as f64
        };
        assert!(
            mean(true) > mean(false),
            "seed {seed}: {} vs {}",
            mean(true),
            mean(false)
        );
    }
}
