mod common;

use common::rng;
use qvcnn_core::encoding::{Encoding, Label, RgbImage};
use qvcnn_core::layers::{ModelConfig, ModelKind};
use qvcnn_core::train::{evaluate, train_model, EpochMetrics, Example, TrainConfig};
use rand::Rng;

const SIZE: usize = 24;

/// Noisy reddish (healthy) or bluish (lymphoblast) patches.
fn patches(n: usize, seed: u64) -> Vec<(RgbImage, Label)> {
    let mut r = rng(seed);
    (0..n)
        .map(|i| {
            let label = if i % 2 == 0 {
                Label::Healthy
            } else {
                Label::Lymphoblast
            };
            let base = match label {
                Label::Healthy => [0.8, 0.25, 0.3],
                Label::Lymphoblast => [0.3, 0.25, 0.8],
            };
            let px = (0..SIZE * SIZE)
                .map(|_| base.map(|c: f64| (c + r.random_range(-0.15..0.15)).clamp(0.0, 1.0)))
                .collect();
            (RgbImage::new(SIZE, SIZE, px).unwrap(), label)
        })
        .collect()
}

fn encode(data: &[(RgbImage, Label)], e: Encoding) -> Vec<Example<f32>> {
    data.iter()
        .map(|(img, label)| Example {
            features: e.encode(img),
            label: *label,
        })
        .collect()
}

fn opts(epochs: usize, seed: u64) -> TrainConfig {
    TrainConfig {
        epochs,
        batch_size: 4,
        seed,
        ..TrainConfig::default()
    }
}

fn moving_average(m: &[EpochMetrics], w: usize) -> Vec<f64> {
    m.windows(w)
        .map(|s| s.iter().map(|e| e.loss).sum::<f64>() / w as f64)
        .collect()
}

#[test]
fn overfits_twenty_patches() {
    let data = patches(20, 5);
    for (kind, enc) in [
        (ModelKind::Quaternion, Encoding::RgbQuaternion),
        (ModelKind::Real, Encoding::RgbConcat),
    ] {
        let config = ModelConfig::classifier(kind, enc, SIZE).unwrap();
        let examples = encode(&data, enc);
        let out = train_model(&config, &examples, &opts(30, 1)).unwrap();
        assert_eq!(evaluate(&out.model, &examples).unwrap(), 1.0, "{kind:?}");
        let ma = moving_average(&out.metrics, 10);
        for w in ma.windows(2) {
            assert!(
                w[1] <= w[0],
                "{kind:?}: moving average rose {} -> {}",
                w[0],
                w[1]
            );
        }
    }
}

#[test]
fn zero_epochs_returns_initial_model() {
    let data = encode(&patches(4, 6), Encoding::RgbConcat);
    let config = ModelConfig::classifier(ModelKind::Real, Encoding::RgbConcat, SIZE).unwrap();
    let a = train_model(&config, &data, &opts(0, 3)).unwrap();
    assert!(a.metrics.is_empty());
    assert_eq!(a.optimizer.t, 0);
    let b = train_model(&config, &data, &opts(0, 3)).unwrap();
    assert_eq!(a.model, b.model);
}

#[test]
fn same_seed_same_run() {
    let data = encode(&patches(8, 7), Encoding::HsvQuaternion);
    let config =
        ModelConfig::classifier(ModelKind::Quaternion, Encoding::HsvQuaternion, SIZE).unwrap();
    let a = train_model(&config, &data, &opts(3, 11)).unwrap();
    let b = train_model(&config, &data, &opts(3, 11)).unwrap();
    assert_eq!(a.metrics, b.metrics);
    assert_eq!(a.model, b.model);
    let c = train_model(&config, &data, &opts(3, 12)).unwrap();
    assert_ne!(a.model, c.model);
}

#[test]
fn rejects_degenerate_datasets() {
    let config = ModelConfig::classifier(ModelKind::Real, Encoding::RgbConcat, SIZE).unwrap();
    assert!(train_model::<f32>(&config, &[], &opts(1, 0)).is_err());
    let one_class: Vec<_> = encode(&patches(4, 8), Encoding::RgbConcat)
        .into_iter()
        .filter(|e| e.label == Label::Healthy)
        .collect();
    assert!(train_model(&config, &one_class, &opts(1, 0)).is_err());
    assert!(evaluate::<f32>(&qvcnn_core::layers::Model::zeros(&config).unwrap(), &[]).is_err());
}

#[test]
fn wrong_feature_kind_is_rejected() {
    let config = ModelConfig::classifier(ModelKind::Real, Encoding::RgbConcat, SIZE).unwrap();
    let data = encode(&patches(4, 9), Encoding::RgbQuaternion);
    assert!(train_model(&config, &data, &opts(1, 0)).is_err());
}
