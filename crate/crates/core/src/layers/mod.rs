//! Forward passes of every layer in the real-valued and quaternion-valued
//! classifiers, model configuration, and parameter accounting.

mod activation;
mod conv;
mod dense;
mod flatten;
pub(crate) mod kernels;
mod model;
mod pool;
mod qconv;

pub use activation::{relu, relu_quaternion};
pub use conv::{conv2d_forward, ConvParams};
pub use dense::{dense_forward, DenseParams};
pub use flatten::{flatten_to_real, unflatten_quaternion};
pub use model::{
    count_parameters, Activation, FeatureShape, InputSpec, Layer, LayerCount, LayerSpec, Model,
    ModelConfig, ModelKind, ParameterLedger, Trace,
};
pub use pool::{maxpool2d, maxpool2d_quaternion, maxpool2d_with_indices, pooled_len};
pub use qconv::{qconv2d_forward, QConvParams};
