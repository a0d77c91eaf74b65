//! Single-plane valid cross-correlation kernels shared by the real and
//! quaternion convolutions and their reverse passes.

use alloc::vec;
use alloc::vec::Vec;

use crate::scalar::Scalar;

/// `out[oy, ox] += scale * Σ kernel[dy, dx] * x[oy + dy, ox + dx]`.
pub(crate) fn correlate_acc<T: Scalar>(
    out: &mut [T],
    x: &[T],
    width: usize,
    kernel: &[T],
    k: usize,
    scale: T,
) {
    let ow = width + 1 - k;
    let oh = out.len() / ow;
    let taps: Vec<T> = kernel.iter().map(|&w| w * scale).collect();
    for oy in 0..oh {
        let dst = &mut out[oy * ow..][..ow];
        for dy in 0..k {
            let row = &x[(oy + dy) * width..][..width];
            for dx in 0..k {
                let kv = taps[dy * k + dx];
                for (o, &v) in dst.iter_mut().zip(&row[dx..dx + ow]) {
                    *o = *o + kv * v;
                }
            }
        }
    }
}

/// Adjoint of [`correlate_acc`] with respect to `x`:
/// `gx[oy + dy, ox + dx] += scale * kernel[dy, dx] * gout[oy, ox]`.
pub(crate) fn correlate_input_grad_acc<T: Scalar>(
    gx: &mut [T],
    width: usize,
    gout: &[T],
    kernel: &[T],
    k: usize,
    scale: T,
) {
    let ow = width + 1 - k;
    let oh = gout.len() / ow;
    for dy in 0..k {
        for dx in 0..k {
            let kv = kernel[dy * k + dx] * scale;
            if kv == T::zero() {
                continue;
            }
            for oy in 0..oh {
                let src = &gout[oy * ow..][..ow];
                let dst = &mut gx[(oy + dy) * width + dx..][..ow];
                for (g, &v) in dst.iter_mut().zip(src) {
                    *g = *g + kv * v;
                }
            }
        }
    }
}

/// Adjoint of [`correlate_acc`] with respect to `kernel`:
/// `gk[dy, dx] += scale * Σ gout[oy, ox] * x[oy + dy, ox + dx]`.
pub(crate) fn correlate_kernel_grad_acc<T: Scalar>(
    gk: &mut [T],
    x: &[T],
    width: usize,
    gout: &[T],
    k: usize,
    scale: T,
) {
    let ow = width + 1 - k;
    let oh = gout.len() / ow;
    let mut lanes = vec![T::zero(); ow];
    for dy in 0..k {
        for dx in 0..k {
            lanes.fill(T::zero());
            for oy in 0..oh {
                let src = &x[(oy + dy) * width + dx..][..ow];
                let g = &gout[oy * ow..][..ow];
                for ((l, &a), &b) in lanes.iter_mut().zip(src).zip(g) {
                    *l = *l + a * b;
                }
            }
            let acc = lanes.iter().fold(T::zero(), |s, &l| s + l);
            gk[dy * k + dx] = gk[dy * k + dx] + scale * acc;
        }
    }
}
