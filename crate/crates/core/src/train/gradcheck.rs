//! Central finite-difference verification of the reverse pass.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::backward::{
    conv2d_backward, dense_backward, maxpool2d_backward, qconv2d_backward, relu_backward,
};
use super::init::init_model;
use super::loss::bce_with_logits;
use crate::encoding::{Encoding, Label};
use crate::error::Result;
use crate::layers::{
    conv2d_forward, dense_forward, maxpool2d_with_indices, qconv2d_forward, relu, ConvParams,
    DenseParams, InputSpec, LayerSpec, Model, ModelConfig, QConvParams,
};
use crate::tensor::{Features, QTensor, Shape3, Tensor};

/// Gradients whose analytic and numeric magnitudes are both below this are
/// treated as exactly zero (dead ReLU paths, pooled-out elements) and skipped.
pub const ZERO_GRADIENT: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct GradCheckReport {
    pub max_rel_error: f64,
    pub checked: usize,
    pub skipped: usize,
}

impl GradCheckReport {
    fn new() -> Self {
        Self {
            max_rel_error: 0.0,
            checked: 0,
            skipped: 0,
        }
    }

    fn record(&mut self, analytic: f64, numeric: f64) {
        if analytic.abs() < ZERO_GRADIENT && numeric.abs() < ZERO_GRADIENT {
            self.skipped += 1;
            return;
        }
        self.checked += 1;
        self.max_rel_error = self.max_rel_error.max(relative_error(analytic, numeric));
    }

    fn merge(&mut self, other: &GradCheckReport) {
        self.max_rel_error = self.max_rel_error.max(other.max_rel_error);
        self.checked += other.checked;
        self.skipped += other.skipped;
    }
}

/// `|a − n| / max(|a|, |n|)`, zero when both vanish.
pub fn relative_error(analytic: f64, numeric: f64) -> f64 {
    let denom = analytic.abs().max(numeric.abs());
    if denom == 0.0 {
        0.0
    } else {
        (analytic - numeric).abs() / denom
    }
}

/// `(f(x + h·e_i) − f(x − h·e_i)) / 2h`, restoring `x[i]` afterwards.
pub fn central_difference(
    x: &mut [f64],
    i: usize,
    h: f64,
    mut f: impl FnMut(&[f64]) -> f64,
) -> f64 {
    let orig = x[i];
    x[i] = orig + h;
    let plus = f(x);
    x[i] = orig - h;
    let minus = f(x);
    x[i] = orig;
    (plus - minus) / (2.0 * h)
}

fn model_loss(model: &Model<f64>, input: &Features<f64>, label: Label) -> f64 {
    let logit = model.forward(input).expect("input validated before check");
    bce_with_logits(logit, label).loss
}

/// Compares analytic parameter gradients of the full model loss against
/// central differences on `samples` randomly chosen parameters (all of them
/// when the model has fewer). Returns the largest relative error.
pub fn grad_check<R: Rng + ?Sized>(
    model: &Model<f64>,
    input: &Features<f64>,
    label: Label,
    h: f64,
    samples: usize,
    rng: &mut R,
) -> Result<GradCheckReport> {
    let trace = model.forward_traced(input)?;
    let lv = bce_with_logits(trace.logit, label);
    let (grads, _) = model.backward(&trace, lv.grad)?;
    let analytic: Vec<Vec<f64>> = grads.parameters().iter().map(|p| p.to_vec()).collect();

    let mut positions: Vec<(usize, usize)> = analytic
        .iter()
        .enumerate()
        .flat_map(|(b, buf)| (0..buf.len()).map(move |i| (b, i)))
        .collect();
    positions.shuffle(rng);
    positions.truncate(samples);

    let mut work = model.clone();
    let mut report = GradCheckReport::new();
    for (b, i) in positions {
        let orig = work.parameters()[b][i];
        work.parameters_mut()[b][i] = orig + h;
        let plus = model_loss(&work, input, label);
        work.parameters_mut()[b][i] = orig - h;
        let minus = model_loss(&work, input, label);
        work.parameters_mut()[b][i] = orig;
        report.record(analytic[b][i], (plus - minus) / (2.0 * h));
    }
    Ok(report)
}

/// One line of the verification suite.
#[derive(Clone, Debug, PartialEq)]
pub struct SuiteEntry {
    pub name: String,
    pub report: GradCheckReport,
}

fn uniform(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(lo..hi)).collect()
}

/// Values bounded away from zero so ReLU kinks stay outside `±h`.
fn away_from_zero(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n)
        .map(|_| {
            let m = rng.random_range(0.05..1.0);
            if rng.random::<bool>() {
                m
            } else {
                -m
            }
        })
        .collect()
}

/// Distinct, well separated values so max-pool winners are stable under `±h`.
fn separated(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..n).map(|i| i as f64 * 0.01 - 0.5).collect();
    v.shuffle(rng);
    v
}

/// Checks `L = Σ g ⊙ f(x)` for a layer `f` against central differences over
/// every element of `x`, given the analytic `∂L/∂x`.
fn check_vector(
    x: &[f64],
    analytic: &[f64],
    h: f64,
    mut loss: impl FnMut(&[f64]) -> f64,
) -> GradCheckReport {
    let mut report = GradCheckReport::new();
    let mut x = x.to_vec();
    for (i, &a) in analytic.iter().enumerate() {
        let n = central_difference(&mut x, i, h, &mut loss);
        report.record(a, n);
    }
    report
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn check_conv(rng: &mut ChaCha8Rng, h: f64) -> Result<GradCheckReport> {
    let (c, f, k) = (
        rng.random_range(1..4),
        rng.random_range(1..4),
        rng.random_range(1..4),
    );
    let (hh, ww) = (rng.random_range(k..k + 5), rng.random_range(k..k + 5));
    let shape = Shape3::new(c, hh, ww);
    let x = Tensor::from_vec(shape, uniform(rng, shape.len(), -1.0, 1.0))?;
    let p = ConvParams::from_parts(
        f,
        c,
        k,
        uniform(rng, f * c * k * k, -1.0, 1.0),
        uniform(rng, f, -1.0, 1.0),
    )?;
    let out_shape = p.output_shape(shape)?;
    let g = uniform(rng, out_shape.len(), -1.0, 1.0);
    let (gx, gp) = conv2d_backward(&x, &p, &Tensor::from_vec(out_shape, g.clone())?)?;

    let mut report = check_vector(x.data(), gx.data(), h, |xv| {
        let xt = Tensor::from_vec(shape, xv.to_vec()).unwrap();
        dot(conv2d_forward(&xt, &p).unwrap().data(), &g)
    });
    let w = p.weight().to_vec();
    report.merge(&check_vector(&w, gp.weight(), h, |wv| {
        let pp = ConvParams::from_parts(f, c, k, wv.to_vec(), p.bias().to_vec()).unwrap();
        dot(conv2d_forward(&x, &pp).unwrap().data(), &g)
    }));
    report.merge(&check_vector(p.bias(), gp.bias(), h, |bv| {
        let pp = ConvParams::from_parts(f, c, k, w.clone(), bv.to_vec()).unwrap();
        dot(conv2d_forward(&x, &pp).unwrap().data(), &g)
    }));
    Ok(report)
}

fn check_qconv(rng: &mut ChaCha8Rng, h: f64) -> Result<GradCheckReport> {
    let (c, f, k) = (
        rng.random_range(1..3),
        rng.random_range(1..3),
        rng.random_range(1..4),
    );
    let (hh, ww) = (rng.random_range(k..k + 4), rng.random_range(k..k + 4));
    let shape = Shape3::new(c, hh, ww);
    let real_shape = Shape3::new(4 * c, hh, ww);
    let x = QTensor::from_real(Tensor::from_vec(
        real_shape,
        uniform(rng, real_shape.len(), -1.0, 1.0),
    )?)?;
    let mut p = QConvParams::zeros(f, c, k);
    let w = uniform(rng, p.weight().len(), -1.0, 1.0);
    p.weight_mut().copy_from_slice(&w);
    let b = uniform(rng, 4 * f, -1.0, 1.0);
    p.bias_components_mut().copy_from_slice(&b);
    let out_shape = p.output_shape(shape)?;
    let g = uniform(rng, 4 * out_shape.len(), -1.0, 1.0);
    let gq = QTensor::from_real(Tensor::from_vec(
        Shape3::new(4 * f, out_shape.height, out_shape.width),
        g.clone(),
    )?)?;
    let (gx, gp) = qconv2d_backward(&x, &p, &gq)?;

    let mut report = check_vector(x.as_real().data(), gx.as_real().data(), h, |xv| {
        let xt = QTensor::from_real(Tensor::from_vec(real_shape, xv.to_vec()).unwrap()).unwrap();
        dot(qconv2d_forward(&xt, &p).unwrap().as_real().data(), &g)
    });
    report.merge(&check_vector(&w, gp.weight(), h, |wv| {
        let mut pp = p.clone();
        pp.weight_mut().copy_from_slice(wv);
        dot(qconv2d_forward(&x, &pp).unwrap().as_real().data(), &g)
    }));
    report.merge(&check_vector(&b, gp.bias_components(), h, |bv| {
        let mut pp = p.clone();
        pp.bias_components_mut().copy_from_slice(bv);
        dot(qconv2d_forward(&x, &pp).unwrap().as_real().data(), &g)
    }));
    Ok(report)
}

fn check_pool(rng: &mut ChaCha8Rng, h: f64) -> Result<GradCheckReport> {
    let shape = Shape3::new(
        rng.random_range(1..4),
        rng.random_range(2..9),
        rng.random_range(2..9),
    );
    let x = Tensor::from_vec(shape, separated(rng, shape.len()))?;
    let (y, routes) = maxpool2d_with_indices(&x, 2)?;
    let g = uniform(rng, y.data().len(), -1.0, 1.0);
    let gx = maxpool2d_backward(shape, &routes, &Tensor::from_vec(y.shape(), g.clone())?)?;
    Ok(check_vector(x.data(), gx.data(), h, |xv| {
        let xt = Tensor::from_vec(shape, xv.to_vec()).unwrap();
        dot(maxpool2d_with_indices(&xt, 2).unwrap().0.data(), &g)
    }))
}

fn check_relu(rng: &mut ChaCha8Rng, h: f64) -> Result<GradCheckReport> {
    let shape = Shape3::new(
        rng.random_range(1..4),
        rng.random_range(1..6),
        rng.random_range(1..6),
    );
    let x = Tensor::from_vec(shape, away_from_zero(rng, shape.len()))?;
    let g = uniform(rng, shape.len(), -1.0, 1.0);
    let gx = relu_backward(&x, &Tensor::from_vec(shape, g.clone())?)?;
    Ok(check_vector(x.data(), gx.data(), h, |xv| {
        dot(
            relu(&Tensor::from_vec(shape, xv.to_vec()).unwrap()).data(),
            &g,
        )
    }))
}

fn check_flatten(rng: &mut ChaCha8Rng, h: f64) -> Result<GradCheckReport> {
    let shape = Shape3::new(
        rng.random_range(1..3),
        rng.random_range(1..5),
        rng.random_range(1..5),
    );
    let x = QTensor::from_real(Tensor::from_vec(
        Shape3::new(4 * shape.channels, shape.height, shape.width),
        uniform(rng, 4 * shape.len(), -1.0, 1.0),
    )?)?;
    let g = uniform(rng, 4 * shape.len(), -1.0, 1.0);
    let gx = super::backward::flatten_backward(x.as_real().shape(), &g)?;
    Ok(check_vector(x.as_real().data(), gx.data(), h, |xv| {
        let xq = crate::layers::unflatten_quaternion(xv, shape).unwrap();
        dot(&crate::layers::flatten_to_real(&xq), &g)
    }))
}

fn check_dense(rng: &mut ChaCha8Rng, h: f64) -> Result<GradCheckReport> {
    let d = rng.random_range(1..40);
    let v = uniform(rng, d, -1.0, 1.0);
    let p = DenseParams::new(uniform(rng, d, -1.0, 1.0), rng.random_range(-1.0..1.0));
    let g = rng.random_range(-2.0..2.0);
    let (gv, gp) = dense_backward(&v, &p, g)?;
    let mut report = check_vector(&v, &gv, h, |vv| g * dense_forward(vv, &p).unwrap());
    report.merge(&check_vector(p.weight(), gp.weight(), h, |wv| {
        g * dense_forward(&v, &DenseParams::new(wv.to_vec(), p.bias())).unwrap()
    }));
    report.merge(&check_vector(&[p.bias()], &[gp.bias()], h, |bv| {
        g * dense_forward(&v, &DenseParams::new(p.weight().to_vec(), bv[0])).unwrap()
    }));
    Ok(report)
}

/// `conv → ReLU → pool` twice, then flatten and dense, on a `size × size` input.
pub fn tiny_config(quaternion: bool, channels: [usize; 2], size: usize) -> Result<ModelConfig> {
    let encoding = if quaternion {
        Encoding::RgbQuaternion
    } else {
        Encoding::RgbConcat
    };
    let mut layers = Vec::new();
    for filters in channels {
        layers.push(if quaternion {
            LayerSpec::QConv { filters, kernel: 3 }
        } else {
            LayerSpec::Conv { filters, kernel: 3 }
        });
        layers.push(LayerSpec::Relu);
        layers.push(LayerSpec::MaxPool { window: 2 });
    }
    layers.push(LayerSpec::Flatten);
    layers.push(LayerSpec::Dense);
    ModelConfig::new(
        InputSpec {
            encoding,
            height: size,
            width: size,
        },
        layers,
    )
}

fn check_model(rng: &mut ChaCha8Rng, quaternion: bool, h: f64) -> Result<GradCheckReport> {
    let config = tiny_config(quaternion, [4, 4], 12)?;
    let model: Model<f64> = init_model(&config, rng)?;
    let input = if quaternion {
        let s = Shape3::new(4, 12, 12);
        Features::Quaternion(QTensor::from_real(Tensor::from_vec(
            s,
            uniform(rng, s.len(), -1.0, 1.0),
        )?)?)
    } else {
        let s = Shape3::new(3, 12, 12);
        Features::Real(Tensor::from_vec(s, uniform(rng, s.len(), 0.0, 1.0))?)
    };
    let label = if rng.random::<bool>() {
        Label::Lymphoblast
    } else {
        Label::Healthy
    };
    grad_check(&model, &input, label, h, 200, rng)
}

/// Runs the finite-difference suite: every layer kind on `configs` random
/// configurations, then tiny end-to-end real and quaternion models.
pub fn run_suite(seed: u64, configs: usize, h: f64) -> Result<Vec<SuiteEntry>> {
    type Check = fn(&mut ChaCha8Rng, f64) -> Result<GradCheckReport>;
    let checks: [(&str, Check); 8] = [
        ("conv2d", check_conv),
        ("qconv2d", check_qconv),
        ("maxpool2d", check_pool),
        ("relu", check_relu),
        ("flatten", check_flatten),
        ("dense", check_dense),
        ("rvcnn-tiny", |r, h| check_model(r, false, h)),
        ("qvcnn-tiny", |r, h| check_model(r, true, h)),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = vec![];
    for (name, check) in checks {
        let mut report = GradCheckReport::new();
        for _ in 0..configs {
            report.merge(&check(&mut rng, h)?);
        }
        out.push(SuiteEntry {
            name: name.into(),
            report,
        });
    }
    Ok(out)
}
