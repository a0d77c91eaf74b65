//! Independent reference implementations used as test oracles.

#![allow(dead_code)]

use qvcnn_core::layers::{ConvParams, QConvParams};
use qvcnn_core::{QTensor, Quaternion, Shape3, Tensor};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
}

pub fn random_quaternion(rng: &mut ChaCha8Rng) -> Quaternion<f64> {
    Quaternion::new(
        rng.random_range(-1.0..1.0),
        rng.random_range(-1.0..1.0),
        rng.random_range(-1.0..1.0),
        rng.random_range(-1.0..1.0),
    )
}

pub fn random_qtensor(rng: &mut ChaCha8Rng, shape: Shape3) -> QTensor<f64> {
    let real = Shape3::new(4 * shape.channels, shape.height, shape.width);
    QTensor::from_real(Tensor::from_vec(real, random_vec(rng, real.len())).unwrap()).unwrap()
}

pub fn random_qconv(
    rng: &mut ChaCha8Rng,
    filters: usize,
    channels: usize,
    k: usize,
) -> QConvParams<f64> {
    let mut p = QConvParams::zeros(filters, channels, k);
    let w = random_vec(rng, p.weight().len());
    p.weight_mut().copy_from_slice(&w);
    let b = random_vec(rng, 4 * filters);
    p.bias_components_mut().copy_from_slice(&b);
    p
}

/// `max |a − b| / max |b|` over all elements.
pub fn rel_max(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let scale = b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let err = a
        .iter()
        .zip(b)
        .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
    if scale == 0.0 {
        err
    } else {
        err / scale
    }
}

pub fn qrel(a: Quaternion<f64>, b: Quaternion<f64>) -> f64 {
    let d = (a - b).norm();
    let s = a.norm().max(b.norm());
    if s == 0.0 {
        d
    } else {
        d / s
    }
}

/// Quaternion convolution by direct summation of Hamilton products over
/// every output pixel, tap and channel.
pub fn qconv_brute_force(x: &QTensor<f64>, p: &QConvParams<f64>) -> QTensor<f64> {
    let s = x.shape();
    let k = p.kernel();
    let out_shape = Shape3::new(p.filters(), s.height - k + 1, s.width - k + 1);
    let mut out = QTensor::zeros(out_shape);
    for f in 0..p.filters() {
        for oy in 0..out_shape.height {
            for ox in 0..out_shape.width {
                let mut acc = p.bias(f);
                for c in 0..p.channels() {
                    for dy in 0..k {
                        for dx in 0..k {
                            acc = acc.add(p.tap(f, c, dy, dx).hamilton(x.get(c, oy + dy, ox + dx)));
                        }
                    }
                }
                out.set(f, oy, ox, acc);
            }
        }
    }
    out
}

/// `BLOCK[r][s] = (a, sign)`: output component `r` receives `sign · W_a * x_s`.
/// Transcribed row by row from the expanded Hamilton product.
pub const BLOCK: [[(usize, f64); 4]; 4] = [
    [(0, 1.0), (1, -1.0), (2, -1.0), (3, -1.0)],
    [(1, 1.0), (0, 1.0), (3, -1.0), (2, 1.0)],
    [(2, 1.0), (3, 1.0), (0, 1.0), (1, -1.0)],
    [(3, 1.0), (2, -1.0), (1, 1.0), (0, 1.0)],
];

/// The real `(4F, 4C, k, k)` convolution equivalent to a quaternion one.
pub fn block_real_kernel(p: &QConvParams<f64>) -> ConvParams<f64> {
    let (f_n, c_n, k) = (p.filters(), p.channels(), p.kernel());
    let kk = k * k;
    let mut weight = vec![0.0; 16 * f_n * c_n * kk];
    let mut bias = vec![0.0; 4 * f_n];
    for r in 0..4 {
        for f in 0..f_n {
            bias[r * f_n + f] = p.bias(f).to_array()[r];
            for (s, &(a, sign)) in BLOCK[r].iter().enumerate() {
                for c in 0..c_n {
                    for t in 0..kk {
                        let (dy, dx) = (t / k, t % k);
                        let w = p.tap(f, c, dy, dx).to_array()[a];
                        let of = r * f_n + f;
                        let ic = s * c_n + c;
                        weight[(of * 4 * c_n + ic) * kk + t] = sign * w;
                    }
                }
            }
        }
    }
    ConvParams::from_parts(4 * f_n, 4 * c_n, k, weight, bias).unwrap()
}

/// Real cross-correlation by explicit loops.
pub fn conv_triple_loop(x: &Tensor<f64>, p: &ConvParams<f64>) -> Tensor<f64> {
    let s = x.shape();
    let k = p.kernel();
    let out_shape = Shape3::new(p.filters(), s.height - k + 1, s.width - k + 1);
    Tensor::from_fn(out_shape, |f, oy, ox| {
        let mut acc = p.bias()[f];
        for c in 0..p.channels() {
            for dy in 0..k {
                for dx in 0..k {
                    acc += p.weight()[((f * p.channels() + c) * k + dy) * k + dx]
                        * x.get(c, oy + dy, ox + dx);
                }
            }
        }
        acc
    })
}
