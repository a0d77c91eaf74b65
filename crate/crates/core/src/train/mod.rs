//! Reverse-mode gradients for every layer, loss, Adam, Glorot
//! initialization, a finite-difference gradient checker, and the training
//! loop.

mod adam;
mod backward;
pub mod gradcheck;
mod init;
mod loss;
mod trainer;

pub use adam::{adam_step, AdamConfig, AdamState};
pub use backward::{
    conv2d_backward, dense_backward, flatten_backward, maxpool2d_backward, qconv2d_backward,
    relu_backward,
};
pub use gradcheck::{grad_check, GradCheckReport};
pub use init::{glorot_limit, glorot_uniform, init_model};
pub use loss::{bce_with_logits, LossValue};
pub use trainer::{
    evaluate, predict, train_model, train_model_with, EpochMetrics, Example, TrainConfig,
    TrainOutcome,
};
