use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::adam::{AdamConfig, AdamState};
use super::init::init_model;
use super::loss::bce_with_logits;
use crate::encoding::Label;
use crate::error::{Error, Result};
use crate::layers::{Model, ModelConfig};
use crate::scalar::Scalar;
use crate::tensor::Features;

/// An encoded network input with its label.
#[derive(Clone, Debug, PartialEq)]
pub struct Example<T> {
    pub features: Features<T>,
    pub label: Label,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
    pub adam: AdamConfig,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 100,
            batch_size: 16,
            seed: 0,
            adam: AdamConfig::default(),
        }
    }
}

/// Loss and accuracy accumulated over one pass through the training set,
/// measured on each batch before its update.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EpochMetrics {
    pub epoch: usize,
    pub loss: f64,
    pub train_accuracy: f64,
}

#[derive(Clone, Debug)]
pub struct TrainOutcome<T> {
    pub model: Model<T>,
    pub optimizer: AdamState<T>,
    pub metrics: Vec<EpochMetrics>,
}

/// Class 1 iff the logit is positive.
pub fn predict<T: Scalar>(model: &Model<T>, features: &Features<T>) -> Result<Label> {
    let logit = model.forward(features)?;
    Ok(if logit > T::zero() {
        Label::Lymphoblast
    } else {
        Label::Healthy
    })
}

/// Fraction of examples whose prediction matches the label.
pub fn evaluate<T: Scalar>(model: &Model<T>, examples: &[Example<T>]) -> Result<f64> {
    if examples.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut correct = 0usize;
    for ex in examples {
        if predict(model, &ex.features)? == ex.label {
            correct += 1;
        }
    }
    Ok(correct as f64 / examples.len() as f64)
}

pub fn train_model<T: Scalar>(
    config: &ModelConfig,
    data: &[Example<T>],
    opts: &TrainConfig,
) -> Result<TrainOutcome<T>> {
    train_model_with(config, data, opts, |_| {})
}

/// Mini-batch Adam on mean binary cross-entropy. The seed drives both the
/// Glorot initialization and the per-epoch shuffles, so a run is fully
/// determined by `(config, data, opts)`.
pub fn train_model_with<T: Scalar>(
    config: &ModelConfig,
    data: &[Example<T>],
    opts: &TrainConfig,
    mut on_epoch: impl FnMut(&EpochMetrics),
) -> Result<TrainOutcome<T>> {
    if data.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let positives = data.iter().filter(|e| e.label.is_positive()).count();
    if positives == 0 || positives == data.len() {
        return Err(Error::SingleClass);
    }
    if opts.batch_size == 0 {
        return Err(Error::InvalidConfig("batch size must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut model: Model<T> = init_model(config, &mut rng)?;
    let mut optimizer = AdamState::for_model(opts.adam, &model);
    let mut metrics = Vec::with_capacity(opts.epochs);
    let mut order: Vec<usize> = (0..data.len()).collect();

    for epoch in 1..=opts.epochs {
        order.shuffle(&mut rng);
        let mut loss_sum = 0.0f64;
        let mut correct = 0usize;
        for batch in order.chunks(opts.batch_size) {
            let scale = T::one() / T::of(batch.len() as f64);
            let mut grads = Model::zeros(config)?;
            for &i in batch {
                let ex = &data[i];
                let trace = model.forward_traced(&ex.features)?;
                let lv = bce_with_logits(trace.logit, ex.label);
                loss_sum += lv.loss.as_f64();
                if (trace.logit > T::zero()) == ex.label.is_positive() {
                    correct += 1;
                }
                let (g, _) = model.backward(&trace, lv.grad * scale)?;
                for (acc, gi) in grads.parameters_mut().into_iter().zip(g.parameters()) {
                    for (a, &b) in acc.iter_mut().zip(gi) {
                        *a = *a + b;
                    }
                }
            }
            optimizer.step(model.parameters_mut(), grads.parameters())?;
        }
        let m = EpochMetrics {
            epoch,
            loss: loss_sum / data.len() as f64,
            train_accuracy: correct as f64 / data.len() as f64,
        };
        on_epoch(&m);
        metrics.push(m);
    }
    Ok(TrainOutcome {
        model,
        optimizer,
        metrics,
    })
}
