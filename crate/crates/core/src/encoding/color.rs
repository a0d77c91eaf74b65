use core::f64::consts::{FRAC_PI_3, TAU};
use num_traits::Float;

use super::image::{HsvImage, Raster, RgbImage};

/// Hexcone RGB → HSV with hue in radians. Achromatic pixels get hue 0.
pub fn rgb_pixel_to_hsv([r, g, b]: [f64; 3]) -> [f64; 3] {
    let max = r.max(g).max(b);
    let min = r.min(g).min(b);
    let delta = max - min;
    let s = if max > 0.0 { delta / max } else { 0.0 };
    if delta == 0.0 {
        return [0.0, s, max];
    }
    let sector = if max == r {
        let x = (g - b) / delta;
        if x < 0.0 {
            x + 6.0
        } else {
            x
        }
    } else if max == g {
        (b - r) / delta + 2.0
    } else {
        (r - g) / delta + 4.0
    };
    let mut h = sector * FRAC_PI_3;
    if h >= TAU {
        h -= TAU;
    }
    [h, s, max]
}

/// Inverse of [`rgb_pixel_to_hsv`]; outputs are clamped to `[0, 1]`.
pub fn hsv_pixel_to_rgb([h, s, v]: [f64; 3]) -> [f64; 3] {
    let h6 = h / FRAC_PI_3;
    let sector = Float::floor(h6);
    let f = h6 - sector;
    let p = v * (1.0 - s);
    let q = v * (1.0 - s * f);
    let t = v * (1.0 - s * (1.0 - f));
    let rgb = match (sector as i64).rem_euclid(6) {
        0 => [v, t, p],
        1 => [q, v, p],
        2 => [p, v, t],
        3 => [p, q, v],
        4 => [t, p, v],
        _ => [v, p, q],
    };
    rgb.map(|c| c.clamp(0.0, 1.0))
}

pub fn rgb_to_hsv(img: &RgbImage) -> HsvImage {
    let r = &img.0;
    HsvImage(Raster {
        height: r.height,
        width: r.width,
        pixels: r.pixels.iter().map(|&p| rgb_pixel_to_hsv(p)).collect(),
    })
}

pub fn hsv_to_rgb(img: &HsvImage) -> RgbImage {
    let r = &img.0;
    RgbImage(Raster {
        height: r.height,
        width: r.width,
        pixels: r.pixels.iter().map(|&p| hsv_pixel_to_rgb(p)).collect(),
    })
}
