use alloc::vec::Vec;
use num_traits::Float;

use super::image::{Raster, RgbImage};
use crate::error::{Error, Result};

/// Source coordinate and blend weight for one destination index, using
/// pixel-center alignment: `src = (dst + 0.5) · in/out − 0.5`, clamped to the
/// source extent.
fn taps(out_len: usize, in_len: usize) -> Vec<(usize, usize, f64)> {
    let scale = in_len as f64 / out_len as f64;
    (0..out_len)
        .map(|d| {
            let s = ((d as f64 + 0.5) * scale - 0.5).clamp(0.0, (in_len - 1) as f64);
            let i0 = Float::floor(s) as usize;
            let i1 = (i0 + 1).min(in_len - 1);
            (i0, i1, s - i0 as f64)
        })
        .collect()
}

/// Bilinear resize to `height × width`.
pub fn resize(img: &RgbImage, height: usize, width: usize) -> Result<RgbImage> {
    let src = &img.0;
    if src.height < 2 || src.width < 2 || height == 0 || width == 0 {
        return Err(Error::SpatialTooSmall {
            what: "resize",
            height: src.height,
            width: src.width,
            window: 2,
        });
    }
    if (height, width) == (src.height, src.width) {
        return Ok(img.clone());
    }
    let ys = taps(height, src.height);
    let xs = taps(width, src.width);
    let mut pixels = Vec::with_capacity(height * width);
    for &(y0, y1, fy) in &ys {
        for &(x0, x1, fx) in &xs {
            let (a, b, c, d) = (
                src.pixel(y0, x0),
                src.pixel(y0, x1),
                src.pixel(y1, x0),
                src.pixel(y1, x1),
            );
            pixels.push(core::array::from_fn(|ch| {
                let top = a[ch] + (b[ch] - a[ch]) * fx;
                let bottom = c[ch] + (d[ch] - c[ch]) * fx;
                (top + (bottom - top) * fy).clamp(0.0, 1.0)
            }));
        }
    }
    Ok(RgbImage(Raster {
        height,
        width,
        pixels,
    }))
}
