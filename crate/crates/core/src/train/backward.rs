//! Vector-Jacobian products of every forward layer.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::layers::kernels::{correlate_input_grad_acc, correlate_kernel_grad_acc};
use crate::layers::{Activation, ConvParams, DenseParams, Layer, Model, QConvParams, Trace};
use crate::quat::HAMILTON_TABLE;
use crate::scalar::Scalar;
use crate::tensor::{QTensor, Shape3, Tensor};

/// Returns `(∂L/∂x, ∂L/∂params)` for a valid cross-correlation.
pub fn conv2d_backward<T: Scalar>(
    x: &Tensor<T>,
    params: &ConvParams<T>,
    gout: &Tensor<T>,
) -> Result<(Tensor<T>, ConvParams<T>)> {
    let in_shape = x.shape();
    gout.expect_shape("conv2d upstream gradient", params.output_shape(in_shape)?)?;
    let (filters, channels, k) = (params.filters(), params.channels(), params.kernel());
    let kk = k * k;
    let mut gx = Tensor::zeros(in_shape);
    let mut gp = ConvParams::zeros(filters, channels, k);
    for f in 0..filters {
        let g = gout.channel(f);
        gp.bias[f] = g.iter().copied().sum();
        for c in 0..channels {
            correlate_input_grad_acc(
                gx.channel_mut(c),
                in_shape.width,
                g,
                params.tap_kernel(f, c),
                k,
                T::one(),
            );
            let gk = &mut gp.weight[(f * channels + c) * kk..][..kk];
            correlate_kernel_grad_acc(gk, x.channel(c), in_shape.width, g, k, T::one());
        }
    }
    Ok((gx, gp))
}

/// Reverse pass of the quaternion convolution. Each forward term
/// `out_r += sign · (W_a * x_s)` contributes `sign · W_aᵀ * g_r` to `∂L/∂x_s`
/// and `sign · (x_s ⋆ g_r)` to `∂L/∂W_a`.
pub fn qconv2d_backward<T: Scalar>(
    x: &QTensor<T>,
    params: &QConvParams<T>,
    gout: &QTensor<T>,
) -> Result<(QTensor<T>, QConvParams<T>)> {
    let in_shape = x.shape();
    let out_shape = params.output_shape(in_shape)?;
    if gout.shape() != out_shape {
        return Err(Error::ShapeMismatch {
            what: "qconv2d upstream gradient",
            expected: out_shape,
            found: gout.shape(),
        });
    }
    let (filters, channels, k) = (params.filters(), params.channels(), params.kernel());
    let kk = k * k;
    let mut gx = QTensor::zeros(in_shape);
    let mut gp = QConvParams::zeros(filters, channels, k);
    for f in 0..filters {
        for r in 0..4 {
            let b: T = gout.channel(r, f).iter().copied().sum();
            gp.bias_components_mut()[r * filters + f] = b;
        }
        for (a, row) in HAMILTON_TABLE.iter().enumerate() {
            for (s, &(r, sign)) in row.iter().enumerate() {
                let sign = T::of(sign as f64);
                let g = gout.channel(r, f);
                for c in 0..channels {
                    correlate_input_grad_acc(
                        gx.channel_mut(s, c),
                        in_shape.width,
                        g,
                        params.tap_kernel(a, f, c),
                        k,
                        sign,
                    );
                    let gk = &mut gp.bank_mut(a)[(f * channels + c) * kk..][..kk];
                    correlate_kernel_grad_acc(gk, x.channel(s, c), in_shape.width, g, k, sign);
                }
            }
        }
    }
    Ok((gx, gp))
}

/// Routes each upstream gradient to the input element that won its window.
pub fn maxpool2d_backward<T: Scalar>(
    input_shape: Shape3,
    routes: &[u32],
    gout: &Tensor<T>,
) -> Result<Tensor<T>> {
    if routes.len() != gout.data().len() {
        return Err(Error::LengthMismatch {
            what: "maxpool2d upstream gradient",
            expected: routes.len(),
            found: gout.data().len(),
        });
    }
    let mut gx = Tensor::zeros(input_shape);
    let data = gx.data_mut();
    for (&i, &g) in routes.iter().zip(gout.data()) {
        data[i as usize] = data[i as usize] + g;
    }
    Ok(gx)
}

/// Passes the upstream gradient where the forward input was positive.
pub fn relu_backward<T: Scalar>(x: &Tensor<T>, gout: &Tensor<T>) -> Result<Tensor<T>> {
    gout.expect_shape("relu upstream gradient", x.shape())?;
    let data = x
        .data()
        .iter()
        .zip(gout.data())
        .map(|(&v, &g)| if v > T::zero() { g } else { T::zero() })
        .collect();
    Tensor::from_vec(x.shape(), data)
}

pub fn flatten_backward<T: Scalar>(input_shape: Shape3, gout: &[T]) -> Result<Tensor<T>> {
    Tensor::from_vec(input_shape, gout.to_vec())
}

/// `∂L/∂v = g·w`, `∂L/∂w = g·v`, `∂L/∂b = g`.
pub fn dense_backward<T: Scalar>(
    v: &[T],
    params: &DenseParams<T>,
    gout: T,
) -> Result<(Vec<T>, DenseParams<T>)> {
    if v.len() != params.inputs() {
        return Err(Error::LengthMismatch {
            what: "dense input",
            expected: params.inputs(),
            found: v.len(),
        });
    }
    let gv = params.weight().iter().map(|&w| w * gout).collect();
    let gw = v.iter().map(|&x| x * gout).collect();
    Ok((gv, DenseParams::new(gw, gout)))
}

impl<T: Scalar> Model<T> {
    /// Replays `trace` backwards from `∂L/∂logit`. Returns the parameter
    /// gradients (as a model of the same configuration) and the gradient with
    /// respect to the input, in its real view.
    pub fn backward(&self, trace: &Trace<T>, dlogit: T) -> Result<(Model<T>, Tensor<T>)> {
        let layers = self.layers();
        if trace.inputs.len() != layers.len() {
            return Err(Error::LengthMismatch {
                what: "trace",
                expected: layers.len(),
                found: trace.inputs.len(),
            });
        }
        let mut grads = Model::zeros(self.config())?;
        let mut upstream: Activation<T> = Activation::Flat(Vec::new());
        for (i, layer) in layers.iter().enumerate().rev() {
            let input = &trace.inputs[i];
            let g = core::mem::replace(&mut upstream, Activation::Flat(Vec::new()));
            upstream = match (layer, input, g) {
                (Layer::Dense(p), Activation::Flat(v), _) => {
                    let (gv, gp) = dense_backward(v, p, dlogit)?;
                    grads.layers_mut()[i] = Layer::Dense(gp);
                    Activation::Flat(gv)
                }
                (Layer::Flatten, Activation::Map(x), Activation::Flat(g)) => {
                    Activation::Map(flatten_backward(x.shape(), &g)?)
                }
                (Layer::Relu, Activation::Map(x), Activation::Map(g)) => {
                    Activation::Map(relu_backward(x, &g)?)
                }
                (Layer::MaxPool(_), Activation::Map(x), Activation::Map(g)) => {
                    let routes = trace.pool_routes[i]
                        .as_deref()
                        .ok_or(Error::InvalidConfig("trace lacks pooling routes".into()))?;
                    Activation::Map(maxpool2d_backward(x.shape(), routes, &g)?)
                }
                (Layer::Conv(p), Activation::Map(x), Activation::Map(g)) => {
                    let (gx, gp) = conv2d_backward(x, p, &g)?;
                    grads.layers_mut()[i] = Layer::Conv(gp);
                    Activation::Map(gx)
                }
                (Layer::QConv(p), Activation::Map(x), Activation::Map(g)) => {
                    let xq = QTensor::from_real(x.clone())?;
                    let gq = QTensor::from_real(g)?;
                    let (gx, gp) = qconv2d_backward(&xq, p, &gq)?;
                    grads.layers_mut()[i] = Layer::QConv(gp);
                    Activation::Map(gx.into_real())
                }
                _ => {
                    return Err(Error::InvalidConfig(
                        "trace does not match model layers".into(),
                    ))
                }
            };
        }
        match upstream {
            Activation::Map(gx) => Ok((grads, gx)),
            Activation::Flat(_) => Err(Error::InvalidConfig(
                "model input must be a feature map".into(),
            )),
        }
    }
}
