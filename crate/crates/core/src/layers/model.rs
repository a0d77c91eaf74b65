use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use super::activation::relu;
use super::conv::{conv2d_forward, ConvParams};
use super::dense::{dense_forward, DenseParams};
use super::pool::{maxpool2d_with_indices, pooled_shape};
use super::qconv::{qconv2d_forward, QConvParams};
use crate::encoding::Encoding;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tensor::{Features, QTensor, Shape3, Tensor};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ModelKind {
    Real,
    Quaternion,
}

impl ModelKind {
    /// Filter counts of the three convolution blocks.
    pub const fn filters(self) -> [usize; 3] {
        match self {
            ModelKind::Real => [32, 64, 128],
            ModelKind::Quaternion => [8, 16, 32],
        }
    }

    pub const fn id(self) -> &'static str {
        match self {
            ModelKind::Real => "rvcnn",
            ModelKind::Quaternion => "qvcnn",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct InputSpec {
    pub encoding: Encoding,
    pub height: usize,
    pub width: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LayerSpec {
    Conv {
        filters: usize,
        kernel: usize,
    },
    QConv {
        filters: usize,
        kernel: usize,
    },
    Relu,
    MaxPool {
        window: usize,
    },
    Flatten,
    /// Single output neuron without activation.
    Dense,
}

impl fmt::Display for LayerSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LayerSpec::Conv { filters, kernel } => write!(f, "conv({filters},{kernel})"),
            LayerSpec::QConv { filters, kernel } => write!(f, "qconv({filters},{kernel})"),
            LayerSpec::Relu => f.write_str("relu"),
            LayerSpec::MaxPool { window } => write!(f, "maxpool({window})"),
            LayerSpec::Flatten => f.write_str("flatten"),
            LayerSpec::Dense => f.write_str("dense(1)"),
        }
    }
}

/// Shape of the value flowing between two layers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FeatureShape {
    Real(Shape3),
    /// Shape counted in quaternion channels.
    Quaternion(Shape3),
    Flat(usize),
    Logit,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ModelConfig {
    pub input: InputSpec,
    pub layers: Vec<LayerSpec>,
}

impl ModelConfig {
    pub fn new(input: InputSpec, layers: Vec<LayerSpec>) -> Result<Self> {
        let config = Self { input, layers };
        config.shapes()?;
        Ok(config)
    }

    /// Three `conv → ReLU → 2×2 max-pool` blocks followed by flatten and a
    /// single-logit dense layer. Real models use 32/64/128 filters, quaternion
    /// models a quarter of that; all kernels are 3×3.
    pub fn classifier(kind: ModelKind, encoding: Encoding, size: usize) -> Result<Self> {
        let mut layers = Vec::new();
        for filters in kind.filters() {
            layers.push(match kind {
                ModelKind::Real => LayerSpec::Conv { filters, kernel: 3 },
                ModelKind::Quaternion => LayerSpec::QConv { filters, kernel: 3 },
            });
            layers.push(LayerSpec::Relu);
            layers.push(LayerSpec::MaxPool { window: 2 });
        }
        layers.push(LayerSpec::Flatten);
        layers.push(LayerSpec::Dense);
        Self::new(
            InputSpec {
                encoding,
                height: size,
                width: size,
            },
            layers,
        )
    }

    pub fn kind(&self) -> ModelKind {
        if self.input.encoding.is_quaternion() {
            ModelKind::Quaternion
        } else {
            ModelKind::Real
        }
    }

    pub fn input_shape(&self) -> FeatureShape {
        let s = Shape3::new(
            self.input.encoding.channels(),
            self.input.height,
            self.input.width,
        );
        if self.input.encoding.is_quaternion() {
            FeatureShape::Quaternion(s)
        } else {
            FeatureShape::Real(s)
        }
    }

    /// Input shape followed by the output shape of every layer.
    pub fn shapes(&self) -> Result<Vec<FeatureShape>> {
        let invalid = |i: usize, msg: &str| Error::InvalidConfig(format!("layer {i}: {msg}"));
        let mut shapes = Vec::with_capacity(self.layers.len() + 1);
        let mut cur = self.input_shape();
        shapes.push(cur);
        for (i, layer) in self.layers.iter().enumerate() {
            cur = match (*layer, cur) {
                (LayerSpec::Conv { filters, kernel }, FeatureShape::Real(s)) => FeatureShape::Real(
                    ConvParams::<f64>::zeros(filters, s.channels, kernel).output_shape(s)?,
                ),
                (LayerSpec::Conv { .. }, _) => {
                    return Err(invalid(i, "conv needs a real feature map"))
                }
                (LayerSpec::QConv { filters, kernel }, FeatureShape::Quaternion(s)) => {
                    FeatureShape::Quaternion(
                        QConvParams::<f64>::zeros(filters, s.channels, kernel).output_shape(s)?,
                    )
                }
                (LayerSpec::QConv { .. }, _) => {
                    return Err(invalid(i, "qconv needs a quaternion feature map"))
                }
                (LayerSpec::Relu, s @ (FeatureShape::Real(_) | FeatureShape::Quaternion(_))) => s,
                (LayerSpec::MaxPool { window }, FeatureShape::Real(s)) => {
                    FeatureShape::Real(pooled_shape(s, window)?)
                }
                (LayerSpec::MaxPool { window }, FeatureShape::Quaternion(s)) => {
                    FeatureShape::Quaternion(pooled_shape(s, window)?)
                }
                (LayerSpec::Flatten, FeatureShape::Real(s)) => FeatureShape::Flat(s.len()),
                (LayerSpec::Flatten, FeatureShape::Quaternion(s)) => {
                    FeatureShape::Flat(4 * s.len())
                }
                (LayerSpec::Dense, FeatureShape::Flat(n)) if n > 0 => FeatureShape::Logit,
                (spec, _) => return Err(invalid(i, &format!("{spec} cannot follow {cur:?}"))),
            };
            if cur == FeatureShape::Logit && i + 1 != self.layers.len() {
                return Err(invalid(i, "dense must be the last layer"));
            }
            shapes.push(cur);
        }
        if cur != FeatureShape::Logit {
            return Err(Error::InvalidConfig(
                "model must end in a dense layer".into(),
            ));
        }
        Ok(shapes)
    }

    /// Length of the flattened vector fed to the dense layer.
    pub fn dense_inputs(&self) -> Result<usize> {
        let shapes = self.shapes()?;
        Ok(match shapes[shapes.len() - 2] {
            FeatureShape::Flat(n) => n,
            _ => unreachable!("validated by shapes()"),
        })
    }
}

/// Canonical one-line description, e.g.
/// `input=rgb-quaternion:100x100;qconv(8,3);relu;maxpool(2);...;flatten;dense(1)`.
impl fmt::Display for ModelConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "input={}:{}x{}",
            self.input.encoding.id(),
            self.input.height,
            self.input.width
        )?;
        for l in &self.layers {
            write!(f, ";{l}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LayerCount {
    pub layer: usize,
    pub label: String,
    pub count: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParameterLedger {
    pub layers: Vec<LayerCount>,
    pub total: usize,
}

/// Trainable real-parameter counts of every parameterized layer.
pub fn count_parameters(config: &ModelConfig) -> Result<ParameterLedger> {
    let shapes = config.shapes()?;
    let mut layers = Vec::new();
    let mut conv_index = 0;
    for (i, spec) in config.layers.iter().enumerate() {
        let (label, count) = match (*spec, shapes[i]) {
            (LayerSpec::Conv { filters, kernel }, FeatureShape::Real(s)) => {
                conv_index += 1;
                (
                    format!("conv{conv_index}"),
                    filters * s.channels * kernel * kernel + filters,
                )
            }
            (LayerSpec::QConv { filters, kernel }, FeatureShape::Quaternion(s)) => {
                conv_index += 1;
                (
                    format!("qconv{conv_index}"),
                    4 * filters * s.channels * kernel * kernel + 4 * filters,
                )
            }
            (LayerSpec::Dense, FeatureShape::Flat(n)) => (String::from("dense"), n + 1),
            _ => continue,
        };
        layers.push(LayerCount {
            layer: i,
            label,
            count,
        });
    }
    let total = layers.iter().map(|l| l.count).sum();
    Ok(ParameterLedger { layers, total })
}

/// A layer together with its parameters.
#[derive(Clone, Debug, PartialEq)]
pub enum Layer<T> {
    Conv(ConvParams<T>),
    QConv(QConvParams<T>),
    Relu,
    MaxPool(usize),
    Flatten,
    Dense(DenseParams<T>),
}

/// Value flowing between layers. Quaternion maps travel as their `(4C, H, W)`
/// real view.
#[derive(Clone, Debug, PartialEq)]
pub enum Activation<T> {
    Map(Tensor<T>),
    Flat(Vec<T>),
}

/// Forward record sufficient for an exact reverse pass: the input of every
/// layer, the argmax routes of every pooling layer, and the final logit.
#[derive(Clone, Debug)]
pub struct Trace<T> {
    pub inputs: Vec<Activation<T>>,
    pub pool_routes: Vec<Option<Vec<u32>>>,
    pub logit: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Model<T> {
    config: ModelConfig,
    layers: Vec<Layer<T>>,
}

impl<T: Scalar> Model<T> {
    /// Model with every parameter set to zero.
    pub fn zeros(config: &ModelConfig) -> Result<Self> {
        let shapes = config.shapes()?;
        let layers = config
            .layers
            .iter()
            .zip(&shapes)
            .map(|(spec, shape)| match (*spec, *shape) {
                (LayerSpec::Conv { filters, kernel }, FeatureShape::Real(s)) => {
                    Layer::Conv(ConvParams::zeros(filters, s.channels, kernel))
                }
                (LayerSpec::QConv { filters, kernel }, FeatureShape::Quaternion(s)) => {
                    Layer::QConv(QConvParams::zeros(filters, s.channels, kernel))
                }
                (LayerSpec::Relu, _) => Layer::Relu,
                (LayerSpec::MaxPool { window }, _) => Layer::MaxPool(window),
                (LayerSpec::Flatten, _) => Layer::Flatten,
                (LayerSpec::Dense, FeatureShape::Flat(n)) => Layer::Dense(DenseParams::zeros(n)),
                _ => unreachable!("validated by shapes()"),
            })
            .collect();
        Ok(Self {
            config: config.clone(),
            layers,
        })
    }

    pub fn config(&self) -> &ModelConfig {
        &self.config
    }

    pub fn layers(&self) -> &[Layer<T>] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [Layer<T>] {
        &mut self.layers
    }

    /// All trainable parameter buffers in declaration order
    /// (per layer: weights, then biases).
    pub fn parameters(&self) -> Vec<&[T]> {
        let mut out = Vec::new();
        for layer in &self.layers {
            match layer {
                Layer::Conv(p) => {
                    out.push(p.weight());
                    out.push(p.bias());
                }
                Layer::QConv(p) => {
                    out.push(p.weight());
                    out.push(p.bias_components());
                }
                Layer::Dense(p) => {
                    out.push(p.weight());
                    out.push(core::slice::from_ref(&p.bias));
                }
                _ => {}
            }
        }
        out
    }

    pub fn parameters_mut(&mut self) -> Vec<&mut [T]> {
        let mut out = Vec::new();
        for layer in &mut self.layers {
            match layer {
                Layer::Conv(p) => {
                    out.push(&mut p.weight[..]);
                    out.push(&mut p.bias[..]);
                }
                Layer::QConv(p) => {
                    out.push(&mut p.weight[..]);
                    out.push(&mut p.bias[..]);
                }
                Layer::Dense(p) => {
                    out.push(&mut p.weight[..]);
                    out.push(core::slice::from_mut(&mut p.bias));
                }
                _ => {}
            }
        }
        out
    }

    pub fn parameter_count(&self) -> usize {
        self.parameters().iter().map(|p| p.len()).sum()
    }

    pub fn cast<U: Scalar>(&self) -> Model<U> {
        let mut out = Model::<U>::zeros(&self.config).expect("config already validated");
        for (dst, src) in out.parameters_mut().into_iter().zip(self.parameters()) {
            for (d, &s) in dst.iter_mut().zip(src) {
                *d = U::of(s.as_f64());
            }
        }
        out
    }

    fn check_input(&self, input: &Features<T>) -> Result<()> {
        let expected = self.config.input_shape();
        match (expected, input) {
            (FeatureShape::Real(s), Features::Real(t)) => t.expect_shape("model input", s),
            (FeatureShape::Quaternion(s), Features::Quaternion(q)) if q.shape() == s => Ok(()),
            (FeatureShape::Quaternion(s), Features::Quaternion(q)) => Err(Error::ShapeMismatch {
                what: "model input",
                expected: s,
                found: q.shape(),
            }),
            (FeatureShape::Real(_), _) => Err(Error::FeatureKind { expected: "real" }),
            _ => Err(Error::FeatureKind {
                expected: "quaternion",
            }),
        }
    }

    /// Logit of a single input.
    pub fn forward(&self, input: &Features<T>) -> Result<T> {
        self.run(input, false).map(|t| t.logit)
    }

    /// Forward pass keeping everything the reverse pass needs.
    pub fn forward_traced(&self, input: &Features<T>) -> Result<Trace<T>> {
        self.run(input, true)
    }

    fn run(&self, input: &Features<T>, keep: bool) -> Result<Trace<T>> {
        self.check_input(input)?;
        let mut inputs = Vec::new();
        let mut pool_routes = Vec::new();
        let mut cur = Activation::Map(input.as_real().clone());
        for layer in &self.layers {
            let mut route = None;
            let next = match (layer, &cur) {
                (Layer::Conv(p), Activation::Map(x)) => Activation::Map(conv2d_forward(x, p)?),
                (Layer::QConv(p), Activation::Map(x)) => {
                    let xq = QTensor::from_real(x.clone())?;
                    Activation::Map(qconv2d_forward(&xq, p)?.into_real())
                }
                (Layer::Relu, Activation::Map(x)) => Activation::Map(relu(x)),
                (Layer::MaxPool(window), Activation::Map(x)) => {
                    let (y, idx) = maxpool2d_with_indices(x, *window)?;
                    route = Some(idx);
                    Activation::Map(y)
                }
                (Layer::Flatten, Activation::Map(x)) => Activation::Flat(x.data().to_vec()),
                (Layer::Dense(p), Activation::Flat(v)) => {
                    let logit = dense_forward(v, p)?;
                    if keep {
                        inputs.push(cur);
                        pool_routes.push(None);
                    }
                    return Ok(Trace {
                        inputs,
                        pool_routes,
                        logit,
                    });
                }
                _ => unreachable!("layer sequence validated by config"),
            };
            if keep {
                inputs.push(core::mem::replace(&mut cur, next));
                pool_routes.push(route);
            } else {
                cur = next;
            }
        }
        unreachable!("config ends in a dense layer")
    }
}
