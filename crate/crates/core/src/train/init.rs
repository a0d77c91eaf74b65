use alloc::vec::Vec;

use rand::Rng;

use crate::error::Result;
use crate::layers::{Layer, Model, ModelConfig};
use crate::scalar::Scalar;

/// `sqrt(6 / (fan_in + fan_out))`.
pub fn glorot_limit(fan_in: usize, fan_out: usize) -> f64 {
    num_traits::Float::sqrt(6.0 / (fan_in + fan_out) as f64)
}

/// `len` samples uniform in `[−L, L)` with `L = glorot_limit(fan_in, fan_out)`.
pub fn glorot_uniform<T: Scalar, R: Rng + ?Sized>(
    fan_in: usize,
    fan_out: usize,
    len: usize,
    rng: &mut R,
) -> Vec<T> {
    assert!(fan_in >= 1 && fan_out >= 1, "fans must be positive");
    let limit = glorot_limit(fan_in, fan_out);
    (0..len)
        .map(|_| {
            let u: f64 = rng.random();
            T::of((2.0 * u - 1.0) * limit)
        })
        .collect()
}

/// Glorot-uniform weights and zero biases for every layer.
///
/// Convolutions use `fan_in = C·k²`, `fan_out = F·k²`. Quaternion layers count
/// fans in quaternion channels and draw the four banks `W0..W3`
/// independently. The dense layer uses `fan_in = D`, `fan_out = 1`.
pub fn init_model<T: Scalar, R: Rng + ?Sized>(
    config: &ModelConfig,
    rng: &mut R,
) -> Result<Model<T>> {
    let mut model = Model::zeros(config)?;
    for layer in model.layers_mut() {
        match layer {
            Layer::Conv(p) => {
                let kk = p.kernel() * p.kernel();
                let w = glorot_uniform(p.channels() * kk, p.filters() * kk, p.weight().len(), rng);
                p.weight_mut().copy_from_slice(&w);
            }
            Layer::QConv(p) => {
                let kk = p.kernel() * p.kernel();
                let (fan_in, fan_out) = (p.channels() * kk, p.filters() * kk);
                for r in 0..4 {
                    let w = glorot_uniform(fan_in, fan_out, p.bank(r).len(), rng);
                    p.bank_mut(r).copy_from_slice(&w);
                }
            }
            Layer::Dense(p) => {
                let w = glorot_uniform(p.inputs(), 1, p.inputs(), rng);
                p.weight_mut().copy_from_slice(&w);
            }
            _ => {}
        }
    }
    Ok(model)
}
