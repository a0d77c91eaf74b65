mod common;

use common::rng;
use qvcnn_core::encoding::Label;
use qvcnn_core::layers::Model;
use qvcnn_core::train::gradcheck::{run_suite, tiny_config};
use qvcnn_core::train::{bce_with_logits, grad_check, init_model, AdamConfig, AdamState};
use qvcnn_core::{Features, QTensor, Shape3, Tensor};
use rand::Rng;

#[test]
fn every_layer_kind_passes_finite_differences() {
    for seed in [1, 2, 3] {
        for entry in run_suite(seed, 3, 1e-6).unwrap() {
            assert!(entry.report.checked > 0, "{}: nothing checked", entry.name);
            assert!(
                entry.report.max_rel_error < 1e-4,
                "{} (seed {seed}): max relative error {:e}",
                entry.name,
                entry.report.max_rel_error
            );
        }
    }
}

#[test]
fn tiny_models_sample_at_least_200_parameters() {
    let mut r = rng(9);
    for quaternion in [false, true] {
        let config = tiny_config(quaternion, [4, 4], 12).unwrap();
        let model: Model<f64> = init_model(&config, &mut r).unwrap();
        assert!(model.parameter_count() >= 200);
        let channels = if quaternion { 4 } else { 3 };
        let s = Shape3::new(channels, 12, 12);
        let data: Vec<f64> = (0..s.len()).map(|_| r.random_range(-1.0..1.0)).collect();
        let t = Tensor::from_vec(s, data).unwrap();
        let input = if quaternion {
            Features::Quaternion(QTensor::from_real(t).unwrap())
        } else {
            Features::Real(t)
        };
        let report = grad_check(&model, &input, Label::Lymphoblast, 1e-6, 200, &mut r).unwrap();
        assert_eq!(report.checked + report.skipped, 200);
        assert!(report.max_rel_error < 1e-4, "{report:?}");
    }
}

fn naive_bce(x: f64, y: f64) -> f64 {
    let s = 1.0 / (1.0 + (-x).exp());
    -(y * s.ln() + (1.0 - y) * (1.0 - s).ln())
}

#[test]
fn bce_matches_naive_form() {
    let mut r = rng(31);
    for _ in 0..1000 {
        let x: f64 = r.random_range(-15.0..15.0);
        for (label, y) in [(Label::Healthy, 0.0), (Label::Lymphoblast, 1.0)] {
            let lv = bce_with_logits(x, label);
            assert!((lv.loss - naive_bce(x, y)).abs() <= 1e-9);
            let s = 1.0 / (1.0 + (-x).exp());
            assert!((lv.grad - (s - y)).abs() <= 1e-12);
        }
    }
}

#[test]
fn adam_first_step_direction_is_scale_invariant() {
    let mut r = rng(32);
    let g: Vec<f64> = (0..50).map(|_| r.random_range(-1.0..1.0)).collect();
    for factor in [1e-3, 0.5, 7.0, 1e4] {
        let scaled: Vec<f64> = g.iter().map(|v| v * factor).collect();
        let mut p1 = vec![0.0; 50];
        let mut p2 = vec![0.0; 50];
        AdamState::new(AdamConfig::default(), [50])
            .step(vec![&mut p1[..]], vec![&g[..]])
            .unwrap();
        AdamState::new(AdamConfig::default(), [50])
            .step(vec![&mut p2[..]], vec![&scaled[..]])
            .unwrap();
        for (a, b) in p1.iter().zip(&p2) {
            assert_eq!(a.signum(), b.signum());
        }
    }
}
